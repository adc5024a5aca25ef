"""Landscape analysis over the control-parameter space.

Registration-time optimisation, the zero-entanglement boundary in the
eigenvalue plane, pre-image contours on the strong-angle square, and the
determinant mean/deviation fields.  Everything is driven by an immutable
transfer tensor, so per-point work items are independent; outputs are
assembled in input order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .chain import ChainSpec
from .measures import DELTA1_NORM, DELTA2_NORM, jacobian_x
from .states import initial_qubit_state
from .sweeps import (
    DEFAULT_ANGLE_STEP,
    DEFAULT_RULE,
    POSITIVE_TOL,
    Axis,
    ScalarField,
    SweepGrid,
    lambda_averaged_concurrence,
    mean_probability,
    score_field,
    transfer_fidelity,
    unit_axis,
)
from .transfer import TransferTensor, compute_transfer_tensor

_PAIRS = ((0, 1), (0, 2), (1, 2))


# ---------------------------------------------------------------------------
# registration time

@dataclass(frozen=True)
class RegistrationOptimum:
    t_star: float
    p_mean: float
    fidelity: float
    maxima: dict | None = None


def optimize_registration_time(
    spec: ChainSpec,
    t_range: tuple[float, float] = (0.0, 50.0),
    coarse_step: float = 0.01,
    xtol: float = 1e-4,
    maxima_grids: tuple[float, float] | None = None,
    lambda_rule: str = DEFAULT_RULE,
) -> RegistrationOptimum:
    """Locate the registration-probability maximum.

    Coarse scan over the range followed by golden-section refinement of the
    best bracket.  With ``maxima_grids = (lambda_step, angle_step)`` the
    eigenvalue-averaged concurrence and determinant means at the optimum are
    evaluated as well (considerably more expensive).
    """
    lo, hi = t_range
    if not hi > lo or not coarse_step > 0:
        raise ValueError("need a nonempty range and positive step")
    ts = np.arange(lo, hi + coarse_step / 2, coarse_step)
    tensors = (compute_transfer_tensor(spec, float(t)) for t in ts)
    scan = np.array(
        [(mean_probability(x), transfer_fidelity(x)) for x in tensors]
    )
    # the registration peak is the best interior local maximum: the pair
    # probability starts at its trivial ceiling of 1 before the excitation
    # leaves the ends, so the t = 0 plateau must not win.  Two-site lines
    # have constant pair probability; fall back to the transfer fidelity.
    objective = mean_probability
    values = scan[:, 0]
    best = _best_interior_peak(values)
    if best is None:
        objective = transfer_fidelity
        values = scan[:, 1]
        best = _best_interior_peak(values)
    if best is None:
        best = int(np.argmax(values))
    a = ts[max(best - 1, 0)]
    c = ts[min(best + 1, len(ts) - 1)]

    def negated(t: float) -> float:
        return -objective(compute_transfer_tensor(spec, float(t)))

    if a < ts[best] < c:
        res = optimize.minimize_scalar(
            negated, bracket=(a, ts[best], c), method="golden",
            options={"xtol": xtol},
        )
        t_star = float(res.x)
    else:
        t_star = float(ts[best])
    tensor = compute_transfer_tensor(spec, t_star)
    maxima = None
    if maxima_grids is not None:
        lambda_step, angle_step = maxima_grids
        d2f, d1f = mean_determinant_fields(tensor, lambda_step=lambda_step)
        maxima = {
            "p_mean": mean_probability(tensor),
            "c_mean": lambda_averaged_concurrence(
                tensor, lambda_step, angle_step, lambda_rule=lambda_rule
            ),
            "delta2_mean": field_average(d2f, lambda_rule),
            "delta1_mean": field_average(d1f, lambda_rule),
        }
    return RegistrationOptimum(
        t_star, mean_probability(tensor), transfer_fidelity(tensor), maxima
    )


def _best_interior_peak(values: np.ndarray) -> int | None:
    """Index of the best strict interior local maximum, if any.

    Peaks within relative 1e-6 of the highest count as ties and the
    earliest wins (periodic objectives revisit the same height forever).
    """
    if len(values) < 3 or np.ptp(values) < 1e-12:
        return None
    interior = np.nonzero(
        (values[1:-1] >= values[:-2]) & (values[1:-1] >= values[2:])
        & ((values[1:-1] > values[:-2]) | (values[1:-1] > values[2:]))
    )[0]
    if interior.size == 0:
        return None
    peaks = interior + 1
    best = values[peaks].max()
    cutoff = best - 1e-6 * max(abs(best), 1.0)
    return int(peaks[values[peaks] >= cutoff][0])


def field_average(field: ScalarField, rule: str = DEFAULT_RULE) -> float:
    """Quadrature average of a 2-axis field over both its axes."""
    w1 = field.grid.axes[0].weights(rule)
    w2 = field.grid.axes[1].weights(rule)
    return float(w1 @ field.values @ w2)


# ---------------------------------------------------------------------------
# zero-entanglement boundary

def entanglement_score(
    tensor: TransferTensor,
    lambda_s: float,
    lambda_r: float,
    step: float = DEFAULT_ANGLE_STEP,
    refine_step: float = 0.005,
) -> float:
    """Max Wootters score over the strong-angle square (phase angles zero).

    A single local-refinement pass around the coarse maximiser keeps the
    estimate stable even when the positive region shrinks to a near-point.
    """
    nodes = unit_axis("alpha1", step).nodes()
    coarse = score_field(tensor, lambda_s, lambda_r, nodes, nodes)
    i, j = np.unravel_index(np.argmax(coarse), coarse.shape)
    a_nodes = _window(nodes[i], step, refine_step)
    b_nodes = _window(nodes[j], step, refine_step)
    fine = score_field(tensor, lambda_s, lambda_r, a_nodes, b_nodes)
    return float(max(coarse.max(), fine.max()))


def _window(center: float, half_width: float, step: float) -> np.ndarray:
    lo = max(center - half_width, 0.0)
    hi = min(center + half_width, 1.0)
    n = max(int(round((hi - lo) / step)), 1)
    return lo + (hi - lo) * np.arange(n + 1) / n


def _bisect(predicate, lo: float, hi: float, tol: float) -> float | None:
    """Edge of a False->True predicate on [lo, hi]; None when constant."""
    p_lo, p_hi = predicate(lo), predicate(hi)
    if p_lo == p_hi:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if predicate(mid) == p_hi:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class BoundaryCurve:
    time: float
    points: tuple[tuple[float, float], ...]  # (lambda_r, lambda_s) on the frontier
    bisectrix_crossing: float | None
    lambda_s_min: float | None


def boundary_curve(
    tensor: TransferTensor,
    lambda_s_values: np.ndarray | None = None,
    angle_step: float = DEFAULT_ANGLE_STEP,
    refine_step: float = 0.005,
    tol: float = 1e-4,
) -> BoundaryCurve:
    """Frontier between never-entangled and entangleable eigenvalue pairs.

    Scans fixed-lambda_s rays (bisection in lambda_r over [1/2, 1]) plus the
    bisectrix.  The limiting lambda_s above which every lambda_r admits
    entanglement is located on the lambda_r = 1/2 ray.  Everything is
    restricted to the upper quadrant; the other quadrants follow from the
    lambda -> 1 - lambda symmetry.
    """
    if lambda_s_values is None:
        lambda_s_values = np.arange(0.5, 1.0 + 1e-12, 0.025)

    def entangled(lam_s: float, lam_r: float) -> bool:
        return (
            entanglement_score(tensor, lam_s, lam_r, angle_step, refine_step)
            > POSITIVE_TOL
        )

    points = []
    for lam_s in lambda_s_values:
        crossing = _bisect(lambda x: entangled(float(lam_s), x), 0.5, 1.0, tol)
        if crossing is not None:
            points.append((float(crossing), float(lam_s)))
    diag = _bisect(lambda x: entangled(x, x), 0.5, 1.0, tol)
    lam_s_min = _bisect(lambda x: entangled(x, 0.5), 0.5, 1.0, tol)
    return BoundaryCurve(tensor.time, tuple(points), diag, lam_s_min)


def boundary_point_evolution(
    spec: ChainSpec,
    t_values: np.ndarray,
    angle_step: float = DEFAULT_ANGLE_STEP,
    refine_step: float = 0.005,
    tol: float = 1e-4,
) -> list[tuple[float, float]]:
    """Bisectrix crossing of the boundary for each time (NaN when absent)."""
    out = []
    for t in t_values:
        tensor = compute_transfer_tensor(spec, float(t))

        def entangled(x: float) -> bool:
            return (
                entanglement_score(tensor, x, x, angle_step, refine_step)
                > POSITIVE_TOL
            )

        crossing = _bisect(entangled, 0.5, 1.0, tol)
        out.append((float(t), np.nan if crossing is None else float(crossing)))
    return out


# ---------------------------------------------------------------------------
# pre-image contours on the (beta1, alpha1) square

@dataclass(frozen=True)
class PreimageContour:
    lambda_r: float
    lambda_s: float
    polylines: tuple[np.ndarray, ...]  # each (k, 2) of (beta1, alpha1)
    area: float
    simply_connected: bool


def preimage_contours(
    tensor: TransferTensor,
    lambda_pairs,
    step: float = 0.005,
) -> list[PreimageContour]:
    """Zero-level frontier of the entangled region for each (lambda_r, lambda_s).

    The score field is sampled on the strong-angle square (phase angles
    zero); frontier points come from linear interpolation on grid-cell
    edges, and the enclosed area from cell-wise clipping of the positive
    region.
    """
    nodes = unit_axis("alpha1", step).nodes()
    out = []
    for lam_r, lam_s in lambda_pairs:
        field = score_field(tensor, float(lam_s), float(lam_r), nodes, nodes)
        segments = _marching_segments(nodes, nodes, field)
        polylines = [
            np.array([(b, a) for a, b in line]) for line in _join_segments(segments)
        ]
        area = _positive_area(nodes, nodes, field)
        out.append(
            PreimageContour(
                float(lam_r),
                float(lam_s),
                tuple(polylines),
                area,
                _simply_connected(field),
            )
        )
    return out


def shifted_boundary_scan(
    tensor: TransferTensor,
    boundary: BoundaryCurve,
    shift: float,
    step: float = 0.005,
) -> list[PreimageContour]:
    """Pre-image contours along the boundary displaced up the bisectrix.

    Points whose displaced coordinates leave the unit square are skipped.
    """
    if not shift > 0:
        raise ValueError("shift must be positive")
    d = shift / np.sqrt(2.0)
    pairs = []
    for lam_r, lam_s in boundary.points:
        p = (lam_r + d, lam_s + d)
        if 0.0 <= p[0] <= 1.0 and 0.0 <= p[1] <= 1.0:
            pairs.append(p)
    return preimage_contours(tensor, pairs, step)


def _marching_segments(a_nodes, b_nodes, field):
    """Level-zero segments, one or two per mixed-sign cell."""
    segments = []
    pos = field > 0.0
    for i in range(len(a_nodes) - 1):
        for j in range(len(b_nodes) - 1):
            corners = (
                (a_nodes[i], b_nodes[j], field[i, j]),
                (a_nodes[i + 1], b_nodes[j], field[i + 1, j]),
                (a_nodes[i + 1], b_nodes[j + 1], field[i + 1, j + 1]),
                (a_nodes[i], b_nodes[j + 1], field[i, j + 1]),
            )
            flags = [c[2] > 0.0 for c in corners]
            if all(flags) or not any(flags):
                continue
            crossings = []
            for k in range(4):
                c1, c2 = corners[k], corners[(k + 1) % 4]
                if (c1[2] > 0.0) != (c2[2] > 0.0):
                    t = c1[2] / (c1[2] - c2[2])
                    crossings.append(
                        (
                            k,
                            (
                                c1[0] + t * (c2[0] - c1[0]),
                                c1[1] + t * (c2[1] - c1[1]),
                            ),
                        )
                    )
            if len(crossings) == 2:
                segments.append((crossings[0][1], crossings[1][1]))
            else:
                # saddle cell: pair crossings around the corner whose sign
                # matches the cell-centre estimate
                center = sum(c[2] for c in corners) / 4.0
                pts = [p for _, p in crossings]
                if (center > 0.0) == flags[0]:
                    segments.append((pts[3], pts[0]))
                    segments.append((pts[1], pts[2]))
                else:
                    segments.append((pts[0], pts[1]))
                    segments.append((pts[2], pts[3]))
    return segments


def _join_segments(segments, decimals: int = 9):
    """Chain segments into polylines by matching endpoints."""
    if not segments:
        return []
    key = lambda p: (round(p[0], decimals), round(p[1], decimals))
    links: dict = {}
    for seg in segments:
        for p, q in ((seg[0], seg[1]), (seg[1], seg[0])):
            links.setdefault(key(p), []).append((p, q))
    used = set()
    lines = []
    for seg in segments:
        if (key(seg[0]), key(seg[1])) in used:
            continue
        line = [seg[0], seg[1]]
        used.add((key(seg[0]), key(seg[1])))
        used.add((key(seg[1]), key(seg[0])))
        for grow_end in (True, False):
            while True:
                tip = line[-1] if grow_end else line[0]
                nxt = None
                for p, q in links.get(key(tip), []):
                    if (key(p), key(q)) not in used:
                        nxt = q
                        used.add((key(p), key(q)))
                        used.add((key(q), key(p)))
                        break
                if nxt is None:
                    break
                if grow_end:
                    line.append(nxt)
                else:
                    line.insert(0, nxt)
        lines.append(line)
    lines.sort(key=len, reverse=True)
    return lines


def _positive_area(a_nodes, b_nodes, field) -> float:
    """Area of the positive region via per-cell polygon clipping."""
    total = 0.0
    for i in range(len(a_nodes) - 1):
        for j in range(len(b_nodes) - 1):
            corners = (
                (a_nodes[i], b_nodes[j], field[i, j]),
                (a_nodes[i + 1], b_nodes[j], field[i + 1, j]),
                (a_nodes[i + 1], b_nodes[j + 1], field[i + 1, j + 1]),
                (a_nodes[i], b_nodes[j + 1], field[i, j + 1]),
            )
            if all(c[2] <= 0.0 for c in corners):
                continue
            poly = []
            for k in range(4):
                c1, c2 = corners[k], corners[(k + 1) % 4]
                if c1[2] > 0.0:
                    poly.append((c1[0], c1[1]))
                if (c1[2] > 0.0) != (c2[2] > 0.0):
                    t = c1[2] / (c1[2] - c2[2])
                    poly.append(
                        (c1[0] + t * (c2[0] - c1[0]), c1[1] + t * (c2[1] - c1[1]))
                    )
            total += _shoelace(poly)
    return float(total)


def _shoelace(poly) -> float:
    if len(poly) < 3:
        return 0.0
    x = np.array([p[0] for p in poly])
    y = np.array([p[1] for p in poly])
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _simply_connected(field) -> bool:
    """One positive component and no holes (at grid resolution).

    A hole is a complement component that never touches the domain border;
    complement pieces cut off by a region reaching the border are fine.
    """
    pos = field > 0.0
    if _components(pos, count_only=True) > 1:
        return False
    for comp in _components(~pos):
        if not any(
            i in (0, pos.shape[0] - 1) or j in (0, pos.shape[1] - 1)
            for i, j in comp
        ):
            return False
    return True


def _components(mask, count_only: bool = False):
    """4-connected components of a boolean grid (list of node lists)."""
    mask = np.asarray(mask)
    seen = np.zeros_like(mask, dtype=bool)
    comps = []
    for i in range(mask.shape[0]):
        for j in range(mask.shape[1]):
            if mask[i, j] and not seen[i, j]:
                nodes = [(i, j)]
                stack = [(i, j)]
                seen[i, j] = True
                while stack:
                    a, b = stack.pop()
                    for da, db in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                        na, nb = a + da, b + db
                        if (
                            0 <= na < mask.shape[0]
                            and 0 <= nb < mask.shape[1]
                            and mask[na, nb]
                            and not seen[na, nb]
                        ):
                            seen[na, nb] = True
                            stack.append((na, nb))
                            nodes.append((na, nb))
                comps.append(nodes)
    if count_only:
        return len(comps)
    return comps


# ---------------------------------------------------------------------------
# determinant landscapes

def reverse_determinant_pair(tensor: TransferTensor, params) -> "DeterminantPair":
    """Determinant pair for the reversed transfer direction.

    Registration happens at the first site and the recovered angles are the
    receiver-side ones; by the end-swap symmetry of the tensor the same
    response-map machinery applies with the two parameter groups exchanged.
    """
    from .measures import DeterminantPair, delta1, delta2, jacobian_x as jx
    from .states import receiver_map

    rmap = receiver_map(tensor, params.lambda_s, params.alpha1, params.alpha2)
    jac = jx(params.lambda_r, params.beta1, params.beta2)
    return DeterminantPair(delta2(rmap, jac), delta1(rmap, jac))


def receiver_map_tables(
    tensor: TransferTensor, lambda_r: float, beta_nodes: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """|m| entries and |2x2 minors| of the receiver map on the beta grid.

    Returns (abs_m [n1, n2, 3, 3], minors [n1, n2, 3(row pair), 3(col pair)]).
    """
    b1, b2 = np.meshgrid(beta_nodes, beta_nodes, indexing="ij")
    shape = b1.shape
    rho = np.array(
        [
            initial_qubit_state(lambda_r, float(x), float(y))
            for x, y in zip(b1.ravel(), b2.ravel())
        ]
    )
    tt = np.einsum("abcdafgh,ndh->nbcfg", tensor.entries, rho)
    m = np.empty((rho.shape[0], 3, 3))
    d11 = tt[:, 1, 1, 1, 1] - tt[:, 1, 0, 1, 0]
    off1 = tt[:, 1, 0, 1, 1]
    d0 = tt[:, 0, 1, 1, 1] - tt[:, 0, 0, 1, 0]
    sum0 = tt[:, 0, 0, 1, 1] + tt[:, 0, 1, 1, 0]
    dif0 = tt[:, 0, 0, 1, 1] - tt[:, 0, 1, 1, 0]
    m[:, 0, 0], m[:, 0, 1], m[:, 0, 2] = d11.real, 2 * off1.real, -2 * off1.imag
    m[:, 1, 0], m[:, 1, 1], m[:, 1, 2] = d0.real, sum0.real, -dif0.imag
    m[:, 2, 0], m[:, 2, 1], m[:, 2, 2] = d0.imag, sum0.imag, dif0.real
    minors = np.empty((rho.shape[0], 3, 3))
    for a, (r1, r2) in enumerate(_PAIRS):
        for b, (c1, c2) in enumerate(_PAIRS):
            minors[:, a, b] = np.abs(
                m[:, r1, c1] * m[:, r2, c2] - m[:, r1, c2] * m[:, r2, c1]
            )
    return (
        np.abs(m).reshape(*shape, 3, 3),
        minors.reshape(*shape, 3, 3),
    )


def sender_jacobian_tables(
    lambda_s: float, alpha_nodes: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Angle sensitivities and |2x2 minors| of the x-Jacobian on the alpha grid.

    Returns (singles [n1, n2, 3], minors [n1, n2, 3(col pair)]).
    """
    n = len(alpha_nodes)
    singles = np.empty((n, n, 3))
    minors = np.empty((n, n, 3))
    for i, a1 in enumerate(alpha_nodes):
        for j, a2 in enumerate(alpha_nodes):
            jac = jacobian_x(lambda_s, float(a1), float(a2))
            singles[i, j] = np.abs(jac[:, 0]) + np.abs(jac[:, 1])
            for b, (c1, c2) in enumerate(_PAIRS):
                minors[i, j, b] = abs(
                    jac[c1, 0] * jac[c2, 1] - jac[c1, 1] * jac[c2, 0]
                )
    return singles, minors


def mean_determinant_fields(
    tensor: TransferTensor,
    lambda_step: float = 0.05,
    beta_step: float = 0.01,
    beta_rule: str = "mean",
    alpha_mode: str = "analytic",
    alpha_step: float = DEFAULT_ANGLE_STEP,
    alpha_rule: str = DEFAULT_RULE,
) -> tuple[ScalarField, ScalarField]:
    """Angle-averaged determinant fields over the (lambda_r, lambda_s) grid.

    The sender-angle averages are closed-form by default; ``alpha_mode =
    'grid'`` switches them to quadrature on the alpha grid (used by the
    separated-vs-direct consistency check).
    """
    lam_axis_r = Axis("lambda_r", 0.0, 1.0, lambda_step)
    lam_axis_s = Axis("lambda_s", 0.0, 1.0, lambda_step)
    lam_r_nodes = lam_axis_r.nodes()
    lam_s_nodes = lam_axis_s.nodes()
    beta_nodes = np.arange(0.0, 1.0 + beta_step / 2, beta_step)
    wb = Axis("beta1", 0.0, 1.0, beta_step).weights(beta_rule)

    # receiver side: per lambda_r, beta-averaged minors (kept per column
    # pair) and |m| column sums
    y_pair_cols = np.empty((len(lam_r_nodes), 3))
    y_single = np.empty((len(lam_r_nodes), 3))
    for k, lam_r in enumerate(lam_r_nodes):
        abs_m, minors = receiver_map_tables(tensor, float(lam_r), beta_nodes)
        y_pair_cols[k] = np.einsum("i,j,ijab->b", wb, wb, minors)
        y_single[k] = np.einsum("i,j,ijan->n", wb, wb, abs_m)
    y_pair = y_pair_cols.sum(axis=1)

    # sender side: per lambda_s, alpha-averaged minors and sensitivities
    x_pair = np.empty((len(lam_s_nodes), 3))
    x_single = np.empty((len(lam_s_nodes), 3))
    if alpha_mode == "analytic":
        for k, lam_s in enumerate(lam_s_nodes):
            lead = abs(1.0 - 2.0 * float(lam_s))
            x_pair[k] = np.pi / 2.0 * lead * lead
            x_single[k] = (lead, 6.0 / np.pi * lead, 6.0 / np.pi * lead)
    elif alpha_mode == "grid":
        alpha_nodes = np.arange(0.0, 1.0 + alpha_step / 2, alpha_step)
        wa = Axis("alpha1", 0.0, 1.0, alpha_step).weights(alpha_rule)
        for k, lam_s in enumerate(lam_s_nodes):
            singles, minors = sender_jacobian_tables(float(lam_s), alpha_nodes)
            x_pair[k] = np.einsum("i,j,ijb->b", wa, wa, minors)
            x_single[k] = np.einsum("i,j,ijn->n", wa, wa, singles)
    else:
        raise ValueError(f"unknown alpha_mode {alpha_mode!r}")

    # pair-minor alpha averages are column-pair independent in the analytic
    # mode; in grid mode they differ slightly, so contract per column pair
    if alpha_mode == "analytic":
        d2 = y_pair[:, None] * x_pair[None, :, 0] / DELTA2_NORM
    else:
        d2 = y_pair_cols @ x_pair.T / DELTA2_NORM
    d1 = np.einsum("rn,sn->rs", y_single, x_single) / DELTA1_NORM

    grid = SweepGrid((lam_axis_r, lam_axis_s))
    meta = {"n_nodes": tensor.n_nodes, "time": tensor.time}
    return (
        ScalarField(grid, d2, {**meta, "quantity": "delta2_mean"}),
        ScalarField(grid, d1, {**meta, "quantity": "delta1_mean"}),
    )


def determinant_stats(
    tensor: TransferTensor,
    lambda_s: float,
    lambda_r: float,
    step: float = DEFAULT_ANGLE_STEP,
    rule: str = DEFAULT_RULE,
) -> dict:
    """Grid means and the four angle deviations of both determinants.

    Works on the factorised tables, which is numerically identical to the
    full four-angle product grid but far cheaper.
    """
    nodes = np.arange(0.0, 1.0 + step / 2, step)
    w = Axis("alpha1", 0.0, 1.0, step).weights(rule)
    abs_m, y_min = receiver_map_tables(tensor, lambda_r, nodes)
    x_single, x_min = sender_jacobian_tables(lambda_s, nodes)

    def stats_for(y_tab, x_tab, norm):
        # y_tab: [b1, b2, term...], x_tab: [a1, a2, term...] sharing the
        # trailing contraction axes
        y_b2 = np.tensordot(y_tab, w, axes=([1], [0]))  # [b1, term...]
        y_b1 = np.tensordot(y_tab, w, axes=([0], [0]))  # [b2, term...]
        y_bar = np.tensordot(y_b1, w, axes=([0], [0]))  # [term...]
        x_a2 = np.tensordot(x_tab, w, axes=([1], [0]))
        x_a1 = np.tensordot(x_tab, w, axes=([0], [0]))
        x_bar = np.tensordot(x_a1, w, axes=([0], [0]))
        axes = len(y_bar.shape)
        contract = list(range(axes))

        def dot(a, b, left, right):
            return np.tensordot(a, b, axes=(left, right)) / norm

        mean = float(dot(y_bar, x_bar, contract, contract))
        partial = {
            "alpha1": dot(x_a2, y_bar, [i + 1 for i in contract], contract),
            "alpha2": dot(x_a1, y_bar, [i + 1 for i in contract], contract),
            "beta1": dot(y_b2, x_bar, [i + 1 for i in contract], contract),
            "beta2": dot(y_b1, x_bar, [i + 1 for i in contract], contract),
        }
        devs = {
            name: float(np.sqrt(w @ (mean - vec) ** 2))
            for name, vec in partial.items()
        }
        return mean, devs

    mean2, dev2 = stats_for(y_min, x_min[..., None, :].repeat(3, -2), DELTA2_NORM)
    mean1, dev1 = stats_for(abs_m, x_single[..., None, :].repeat(3, -2), DELTA1_NORM)
    return {
        "delta2_mean": mean2,
        "delta1_mean": mean1,
        "delta2_dev": dev2,
        "delta1_dev": dev1,
    }


def determinant_deviation_fields(
    tensor: TransferTensor,
    lambda_step: float = 0.05,
    angle_step: float = DEFAULT_ANGLE_STEP,
    rule: str = DEFAULT_RULE,
) -> dict:
    """ScalarField per (determinant, angle) deviation over the lambda grid."""
    lam_axis_r = Axis("lambda_r", 0.0, 1.0, lambda_step)
    lam_axis_s = Axis("lambda_s", 0.0, 1.0, lambda_step)
    grid = SweepGrid((lam_axis_r, lam_axis_s))
    names = ("alpha1", "alpha2", "beta1", "beta2")
    values = {
        (k, nm): np.empty((len(lam_axis_r.nodes()), len(lam_axis_s.nodes())))
        for k in (1, 2)
        for nm in names
    }
    for i, lam_r in enumerate(lam_axis_r.nodes()):
        for j, lam_s in enumerate(lam_axis_s.nodes()):
            stats = determinant_stats(
                tensor, float(lam_s), float(lam_r), angle_step, rule
            )
            for nm in names:
                values[(2, nm)][i, j] = stats["delta2_dev"][nm]
                values[(1, nm)][i, j] = stats["delta1_dev"][nm]
    meta = {"n_nodes": tensor.n_nodes, "time": tensor.time}
    return {
        key: ScalarField(
            grid, vals, {**meta, "quantity": f"delta{key[0]}_dev:{key[1]}"}
        )
        for key, vals in values.items()
    }


# ---------------------------------------------------------------------------
# exports

def write_boundary(curve: BoundaryCurve, path) -> None:
    lines = [f"# time={float(curve.time)!r}"]
    if curve.bisectrix_crossing is not None:
        lines.append(f"# bisectrix_crossing={float(curve.bisectrix_crossing)!r}")
    if curve.lambda_s_min is not None:
        lines.append(f"# lambda_s_min={float(curve.lambda_s_min)!r}")
    lines.append("lambda_r,lambda_s")
    for lam_r, lam_s in curve.points:
        lines.append(f"{float(lam_r)!r},{float(lam_s)!r}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def write_contours(contours, path) -> None:
    lines = []
    for idx, c in enumerate(contours):
        lines.append(
            f"# contour {idx}: lambda_r={float(c.lambda_r)!r} lambda_s={float(c.lambda_s)!r} "
            f"area={float(c.area)!r} simply_connected={c.simply_connected}"
        )
    lines.append("contour_id,beta1,alpha1")
    for idx, c in enumerate(contours):
        for line in c.polylines:
            for b1, a1 in line:
                lines.append(f"{idx},{float(b1)!r},{float(a1)!r}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
