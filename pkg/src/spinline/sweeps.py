"""Grid quadrature over the control-parameter space.

Means over angle parameters approximate unit-interval integrals on a
regular grid (default step 0.05, trapezoid weights).  Heavy quantities go
through the kernel backend on whole grids at once; reductions always run in
a fixed axis order so results do not depend on worker scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import kernels
from .measures import wootters_score
from .states import ANGLE_NAMES, ControlParams
from .transfer import TransferTensor

AXIS_NAMES = ("lambda_s", "lambda_r", *ANGLE_NAMES, "t")

DEFAULT_ANGLE_STEP = 0.05
DEFAULT_RULE = "trapezoid"

#: numerical-zero guard for "the concurrence is positive"
POSITIVE_TOL = 1e-10


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown axis {self.name!r}")
        if not self.step > 0 or not self.stop > self.start:
            raise ValueError("need stop > start and step > 0")
        if self.name != "t" and not (0.0 <= self.start and self.stop <= 1.0):
            raise ValueError(f"axis {self.name} must stay within [0, 1]")
        n = (self.stop - self.start) / self.step
        if abs(n - round(n)) > 1e-9:
            raise ValueError("step must divide the axis span")

    def nodes(self) -> np.ndarray:
        n = int(round((self.stop - self.start) / self.step))
        return self.start + self.step * np.arange(n + 1)

    def weights(self, rule: str = DEFAULT_RULE) -> np.ndarray:
        m = len(self.nodes())
        if m == 1:
            return np.array([1.0])
        if rule == "trapezoid":
            w = np.ones(m)
            w[0] = w[-1] = 0.5
            return w / (m - 1)
        if rule == "mean":
            return np.full(m, 1.0 / m)
        raise ValueError(f"unknown quadrature rule {rule!r}")


def unit_axis(name: str, step: float = DEFAULT_ANGLE_STEP) -> Axis:
    return Axis(name, 0.0, 1.0, step)


@dataclass(frozen=True)
class SweepGrid:
    axes: tuple[Axis, ...]

    def axis(self, name: str) -> Axis:
        for ax in self.axes:
            if ax.name == name:
                return ax
        raise KeyError(name)

    def names(self) -> tuple[str, ...]:
        return tuple(ax.name for ax in self.axes)


def angle_grid(step: float = DEFAULT_ANGLE_STEP) -> SweepGrid:
    return SweepGrid(tuple(unit_axis(name, step) for name in ANGLE_NAMES))


@dataclass
class ScalarField:
    """Sampled scalar quantity on a 2-axis grid."""

    grid: SweepGrid
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = tuple(len(ax.nodes()) for ax in self.grid.axes)
        if self.values.shape != shape:
            raise ValueError(f"values shape {self.values.shape} != grid {shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")

    def write_csv(self, path) -> None:
        ax1, ax2 = self.grid.axes
        lines = [f"# {k}={v}" for k, v in sorted(self.metadata.items())]
        lines.append(f"# axis1={ax1.name}")
        lines.append(f"# axis2={ax2.name}")
        lines.append("axis1,axis2,value")
        for i, u in enumerate(ax1.nodes()):
            for j, v in enumerate(ax2.nodes()):
                lines.append(f"{float(u)!r},{float(v)!r},{float(self.values[i, j])!r}")
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# generic quadrature over callables

def mean_over(
    func,
    vary: tuple[str, ...],
    grid: SweepGrid,
    fixed: ControlParams,
    rule: str = DEFAULT_RULE,
) -> float:
    """Quadrature mean of func(ControlParams) over the listed angle axes."""
    bad = set(vary) - set(ANGLE_NAMES)
    if bad:
        raise ValueError(f"can only average over angle axes, got {sorted(bad)}")
    axes = [grid.axis(name) for name in vary]
    node_lists = [ax.nodes() for ax in axes]
    weight_lists = [ax.weights(rule) for ax in axes]
    total = 0.0
    for combo in product(*(range(len(n)) for n in node_lists)):
        override = {
            name: float(nodes[i])
            for name, nodes, i in zip(vary, node_lists, combo)
        }
        params = _replace(fixed, override)
        w = 1.0
        for weights, i in zip(weight_lists, combo):
            w *= weights[i]
        total += w * func(params)
    return float(total)


def std_dev(
    func,
    gamma: str,
    grid: SweepGrid,
    fixed: ControlParams,
    rule: str = DEFAULT_RULE,
) -> float:
    """Deviation of the three-angle partial mean along the fourth angle."""
    if gamma not in ANGLE_NAMES:
        raise ValueError(f"gamma must be an angle axis, got {gamma!r}")
    others = tuple(n for n in ANGLE_NAMES if n != gamma)
    ax = grid.axis(gamma)
    nodes, weights = ax.nodes(), ax.weights(rule)
    partial = np.array(
        [
            mean_over(func, others, grid, _replace(fixed, {gamma: float(g)}), rule)
            for g in nodes
        ]
    )
    mean = float(weights @ partial)
    return float(np.sqrt(weights @ (mean - partial) ** 2))


def _replace(params: ControlParams, override: dict) -> ControlParams:
    values = {
        name: override.get(name, getattr(params, name))
        for name in ("lambda_s", "lambda_r", *ANGLE_NAMES)
    }
    return ControlParams(**values)


# ---------------------------------------------------------------------------
# kernel-backed grids

def _state_stack(lam: float, a1_nodes: np.ndarray, a2_nodes: np.ndarray) -> np.ndarray:
    """Qubit states over the (a1, a2) node product, flattened row-major."""
    a1, a2 = np.meshgrid(a1_nodes, a2_nodes, indexing="ij")
    a1, a2 = a1.ravel(), a2.ravel()
    lead = 1.0 - 2.0 * lam
    x1 = 0.5 * (1.0 + lead * np.cos(np.pi * a1))
    off = -0.5 * lead * np.sin(np.pi * a1) * np.exp(-2j * np.pi * a2)
    rho = np.empty((a1.size, 2, 2), dtype=np.complex128)
    rho[:, 0, 0] = 1.0 - x1
    rho[:, 0, 1] = off
    rho[:, 1, 0] = np.conj(off)
    rho[:, 1, 1] = x1
    return rho


def score_grid(
    tensor: TransferTensor,
    lambda_s: float,
    lambda_r: float,
    step: float = DEFAULT_ANGLE_STEP,
) -> np.ndarray:
    """Unclipped Wootters scores on the full (alpha1, alpha2, beta1, beta2) grid."""
    nodes = unit_axis("alpha1", step).nodes()
    m = len(nodes)
    rho_s = _state_stack(lambda_s, nodes, nodes)
    rho_r = _state_stack(lambda_r, nodes, nodes)
    return kernels.pair_scores(tensor.entries, rho_s, rho_r).reshape(m, m, m, m)


def score_field(
    tensor: TransferTensor,
    lambda_s: float,
    lambda_r: float,
    alpha1_nodes: np.ndarray,
    beta1_nodes: np.ndarray,
) -> np.ndarray:
    """Scores on an (alpha1, beta1) grid with the phase angles at zero."""
    zero = np.zeros(1)
    rho_s = _state_stack(lambda_s, np.asarray(alpha1_nodes, dtype=float), zero)
    rho_r = _state_stack(lambda_r, np.asarray(beta1_nodes, dtype=float), zero)
    return kernels.pair_scores(tensor.entries, rho_s, rho_r)


def _angle_weights(step: float, rule: str) -> np.ndarray:
    return unit_axis("alpha1", step).weights(rule)


@dataclass(frozen=True)
class ConcurrenceStats:
    mean: float
    deviations: dict


def concurrence_stats(
    tensor: TransferTensor,
    lambda_s: float,
    lambda_r: float,
    step: float = DEFAULT_ANGLE_STEP,
    rule: str = DEFAULT_RULE,
) -> ConcurrenceStats:
    """Mean concurrence and its four angle deviations from one grid pass."""
    values = np.clip(score_grid(tensor, lambda_s, lambda_r, step), 0.0, None)
    w = _angle_weights(step, rule)
    mean = float(np.einsum("i,j,k,l,ijkl->", w, w, w, w, values))
    devs = {}
    for axis, name in enumerate(ANGLE_NAMES):
        partial = _partial_mean(values, axis, w)
        devs[name] = float(np.sqrt(w @ (mean - partial) ** 2))
    return ConcurrenceStats(mean, devs)


def _partial_mean(values: np.ndarray, keep_axis: int, w: np.ndarray) -> np.ndarray:
    out = values
    for axis in reversed(range(values.ndim)):
        if axis != keep_axis:
            out = np.tensordot(out, w, axes=([axis], [0]))
    return out


def mean_concurrence(
    tensor: TransferTensor,
    lambda_s: float,
    lambda_r: float,
    step: float = DEFAULT_ANGLE_STEP,
    rule: str = DEFAULT_RULE,
) -> float:
    values = np.clip(score_grid(tensor, lambda_s, lambda_r, step), 0.0, None)
    w = _angle_weights(step, rule)
    return float(np.einsum("i,j,k,l,ijkl->", w, w, w, w, values))


def witness(
    tensor: TransferTensor,
    lambda_s: float,
    lambda_r: float,
    step: float = DEFAULT_ANGLE_STEP,
    rule: str = DEFAULT_RULE,
) -> float:
    """Weighted fraction of the (alpha1, beta1) square with positive concurrence."""
    nodes = unit_axis("alpha1", step).nodes()
    scores = score_field(tensor, lambda_s, lambda_r, nodes, nodes)
    w = _angle_weights(step, rule)
    indicator = (scores > POSITIVE_TOL).astype(float)
    return float(w @ indicator @ w)


def lambda_averaged_concurrence(
    tensor: TransferTensor,
    lambda_step: float = 0.05,
    angle_step: float = DEFAULT_ANGLE_STEP,
    rule: str = DEFAULT_RULE,
    lambda_rule: str | None = None,
    fold: bool = True,
) -> float:
    """Mean concurrence averaged over both eigenvalue parameters.

    With ``fold`` the exact end-swap and lambda -> 1-lambda symmetries reduce
    the grid to its upper quadrant; the unfolded path evaluates every node
    pair and exists as a cross-check.  ``lambda_rule`` defaults to the angle
    rule.
    """
    ax = Axis("lambda_s", 0.0, 1.0, lambda_step)
    nodes, w = ax.nodes(), ax.weights(lambda_rule or rule)
    m = len(nodes)
    table = np.full((m, m), np.nan)
    if fold:
        half = [i for i, v in enumerate(nodes) if v >= 0.5 - 1e-12]
        cache: dict[tuple[int, int], float] = {}
        for ii, i in enumerate(half):
            for j in half[ii:]:
                cache[(i, j)] = mean_concurrence(
                    tensor, nodes[i], nodes[j], angle_step, rule
                )
        for i in range(m):
            for j in range(m):
                fi = max(i, m - 1 - i)
                fj = max(j, m - 1 - j)
                key = (min(fi, fj), max(fi, fj))
                table[i, j] = cache[key]
    else:
        for i in range(m):
            for j in range(m):
                table[i, j] = mean_concurrence(
                    tensor, nodes[i], nodes[j], angle_step, rule
                )
    return float(w @ table @ w)


# ---------------------------------------------------------------------------
# tensor-only scalars

def mean_probability(tensor: TransferTensor) -> float:
    """End-pair excitation registration probability (1 at t = 0)."""
    e = tensor.entries
    return float(
        2.0
        / 3.0
        * (
            e[0, 1, 1, 0, 0, 1, 1, 0].real
            + e[1, 0, 1, 0, 1, 0, 1, 0].real
            + e[1, 0, 1, 1, 1, 0, 1, 1].real
            + 0.5 * e[1, 1, 1, 1, 1, 1, 1, 1].real
        )
    )


def transfer_fidelity(tensor: TransferTensor) -> float:
    """Peak fidelity of pure one-excitation transfer between the ends."""
    return float(tensor.entries[0, 1, 1, 0, 0, 1, 1, 0].real)


def normalized_curves(series: dict) -> tuple[dict, dict]:
    """Scale every quantity of a time series by its maximum.

    ``series`` maps 't' and quantity names to equal-length arrays.  Returns
    (normalized series, per-quantity record of (t_at_max, max)).
    """
    t = np.asarray(series["t"], dtype=float)
    if t.size == 0:
        raise ValueError("empty series")
    normalized: dict = {"t": t}
    maxima: dict = {}
    for name, values in series.items():
        if name == "t":
            continue
        v = np.asarray(values, dtype=float)
        if v.shape != t.shape:
            raise ValueError(f"series {name!r} length mismatch")
        peak = v.max()
        if peak <= 0.0:
            raise ValueError(f"series {name!r} has no positive values to scale by")
        i = int(np.argmax(v))
        normalized[name] = v / peak
        maxima[name] = (float(t[i]), float(peak))
    return normalized, maxima
