"""Correlation measures: Wootters concurrence and determinant solvability.

The determinant pair (delta2, delta1) quantifies whether the two sender
angle parameters can be recovered from the receiver's state: delta2 governs
joint recovery of both, delta1 recovery of a single one.  Both are sums of
absolute values of Jacobian products and are nonnegative by construction;
the sums are deliberately not divided by their term count, since every term
is an independent solvability route.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .states import ReceiverAffineMap

#: normalisation constants fixing the unit-map averages
DELTA2_NORM = np.pi / 2.0
DELTA1_NORM = 0.5 + 6.0 / np.pi

_PAIRS = ((0, 1), (0, 2), (1, 2))
_SIGN = np.array([-1.0, 1.0, 1.0, -1.0])


class DeterminantPair(NamedTuple):
    delta2: float
    delta1: float


def wootters_score(rho: np.ndarray) -> float:
    """Unclipped 2*max(lam) - sum(lam); concurrence is its positive part."""
    rho = np.asarray(rho, dtype=np.complex128)
    flip = _SIGN[:, None] * _SIGN[None, :]
    rho_tilde = flip * np.conj(rho[::-1, ::-1])
    ev = np.linalg.eigvals(rho @ rho_tilde)
    lam = np.sqrt(np.clip(ev.real, 0.0, None))
    return float(2.0 * lam.max() - lam.sum())


def concurrence(rho: np.ndarray, psd_tol: float = 1e-10) -> float:
    """Wootters concurrence of a two-qubit density matrix."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (4, 4):
        raise ValueError("expected a 4x4 density matrix")
    if abs(np.trace(rho) - 1.0) > 1e-8 or np.abs(rho - rho.conj().T).max() > 1e-8:
        raise ValueError("not a unit-trace Hermitian matrix")
    if np.linalg.eigvalsh(rho).min() < -psd_tol:
        raise ValueError("matrix is not positive semidefinite within tolerance")
    return max(0.0, wootters_score(rho))


def entanglement_of_formation(c: float) -> float:
    """Binary entropy of (1 + sqrt(1 - C^2))/2, in bits."""
    if not 0.0 <= c <= 1.0:
        raise ValueError("concurrence must lie in [0, 1]")
    p = 0.5 * (1.0 + np.sqrt(1.0 - c * c))
    if p in (0.0, 1.0):
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


def jacobian_x(lambda_s: float, alpha1: float, alpha2: float) -> np.ndarray:
    """(3, 2) matrix of x-vector derivatives w.r.t. the two sender angles.

    Angles are in [0, 1] units, so the chain rule contributes the half-turn
    and full-turn factors pi and 2*pi.
    """
    lead = 1.0 - 2.0 * lambda_s
    s1, c1 = np.sin(np.pi * alpha1), np.cos(np.pi * alpha1)
    s2, c2 = np.sin(2 * np.pi * alpha2), np.cos(2 * np.pi * alpha2)
    return np.array(
        [
            [-np.pi / 2 * lead * s1, 0.0],
            [-np.pi / 2 * lead * c1 * c2, np.pi * lead * s1 * s2],
            [np.pi / 2 * lead * c1 * s2, np.pi * lead * s1 * c2],
        ]
    )


def delta2(rmap: ReceiverAffineMap, jac: np.ndarray) -> float:
    """Normalised sum over all 2x2 minor products (both angles recoverable)."""
    m = rmap.m
    total = 0.0
    for n, mm in _PAIRS:
        jmin = abs(jac[n, 0] * jac[mm, 1] - jac[n, 1] * jac[mm, 0])
        if jmin == 0.0:
            continue
        for i, j in _PAIRS:
            ymin = abs(m[i, n] * m[j, mm] - m[i, mm] * m[j, n])
            total += ymin * jmin
    return total / DELTA2_NORM


def delta1(rmap: ReceiverAffineMap, jac: np.ndarray) -> float:
    """Normalised sum of |dy/dx| times single-angle sensitivities."""
    singles = np.abs(jac[:, 0]) + np.abs(jac[:, 1])
    return float(np.abs(rmap.m).sum(axis=0) @ singles) / DELTA1_NORM


def determinant_pair(rmap: ReceiverAffineMap, jac: np.ndarray) -> DeterminantPair:
    return DeterminantPair(delta2(rmap, jac), delta1(rmap, jac))


def info_correlation(d: DeterminantPair, eps: float = 1e-8) -> int:
    """Number of recoverable sender angle parameters: 2, 1 or 0."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    if d.delta2 > eps:
        return 2
    if d.delta1 > eps:
        return 1
    return 0


def analytic_alpha_averages(lambda_s: float) -> tuple[float, tuple[float, float, float]]:
    """Closed-form sender-angle averages of the Jacobian magnitudes.

    Returns the common pair-minor average (same for every x-row pair) and
    the three single-row sensitivities.
    """
    if not 0.0 <= lambda_s <= 1.0:
        raise ValueError("lambda_s outside [0, 1]")
    lead = abs(1.0 - 2.0 * lambda_s)
    pair = np.pi / 2.0 * lead * lead
    singles = (lead, 6.0 / np.pi * lead, 6.0 / np.pi * lead)
    return float(pair), singles
