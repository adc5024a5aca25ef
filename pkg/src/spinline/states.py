"""Initial states, the sender's x-vector and the receiver's affine response.

All six control parameters live in [0, 1]; angle parameters are kept in
these units everywhere and converted to radians only inside trigonometric
evaluation (the first angle spans half a turn, the phase angle a full turn).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .transfer import TransferTensor, reduced_receiver_tensor

ANGLE_NAMES = ("alpha1", "alpha2", "beta1", "beta2")


@dataclass(frozen=True)
class ControlParams:
    """Eigenvalue (lambda) and eigenvector (angle) parameters of the end states."""

    lambda_s: float
    lambda_r: float
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float

    def __post_init__(self):
        for name in ("lambda_s", "lambda_r", *ANGLE_NAMES):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")

    def sender_state(self) -> np.ndarray:
        return initial_qubit_state(self.lambda_s, self.alpha1, self.alpha2)

    def receiver_state(self) -> np.ndarray:
        return initial_qubit_state(self.lambda_r, self.beta1, self.beta2)


class BlochX(NamedTuple):
    """Real parameters (x1, x2, x3) of a qubit density matrix."""

    x1: float
    x2: float
    x3: float


def _check_unit(name: str, v: float) -> None:
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"{name}={v} outside [0, 1]")


def unitary_from_angles(a1: float, a2: float) -> np.ndarray:
    """Eigenvector matrix of an end state from its two angle parameters."""
    _check_unit("a1", a1)
    _check_unit("a2", a2)
    c, s = np.cos(np.pi * a1 / 2), np.sin(np.pi * a1 / 2)
    phase = np.exp(2j * np.pi * a2)
    return np.array([[c, -s / phase], [s * phase, c]])


def initial_qubit_state(lam: float, a1: float, a2: float) -> np.ndarray:
    """U diag(lam, 1-lam) U^dagger for the angle unitary above."""
    _check_unit("lambda", lam)
    u = unitary_from_angles(a1, a2)
    return (u * np.array([lam, 1.0 - lam])) @ u.conj().T


def bloch_x(lambda_s: float, alpha1: float, alpha2: float) -> BlochX:
    """x-parameters of the sender state; rho = [[1-x1, x2+ix3], [x2-ix3, x1]]."""
    for name, v in (("lambda_s", lambda_s), ("alpha1", alpha1), ("alpha2", alpha2)):
        _check_unit(name, v)
    lead = 1.0 - 2.0 * lambda_s
    x1 = 0.5 * (1.0 + lead * np.cos(alpha1 * np.pi))
    x2 = -0.5 * lead * np.sin(alpha1 * np.pi) * np.cos(2 * alpha2 * np.pi)
    x3 = 0.5 * lead * np.sin(alpha1 * np.pi) * np.sin(2 * alpha2 * np.pi)
    return BlochX(float(x1), float(x2), float(x3))


def state_from_x(x: BlochX | np.ndarray) -> np.ndarray:
    x1, x2, x3 = x
    return np.array([[1.0 - x1, x2 + 1j * x3], [x2 - 1j * x3, x1]])


def rho_sr(
    tensor: TransferTensor, rho_s0: np.ndarray, rho_r0: np.ndarray
) -> np.ndarray:
    """Joint sender-receiver density matrix at the tensor's time."""
    for rho in (rho_s0, rho_r0):
        _check_density_input(rho)
    rho = np.einsum("abcdefgh,cg,dh->abef", tensor.entries, rho_s0, rho_r0)
    return rho.reshape(4, 4)


def _check_density_input(rho: np.ndarray, tol: float = 1e-8) -> None:
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise ValueError("expected a 2x2 density matrix")
    if abs(np.trace(rho) - 1) > tol or np.abs(rho - rho.conj().T).max() > tol:
        raise ValueError("not a unit-trace Hermitian matrix")


def trace_out_sender(rho4: np.ndarray) -> np.ndarray:
    r = rho4.reshape(2, 2, 2, 2)
    return np.einsum("abac->bc", r)


def trace_out_receiver(rho4: np.ndarray) -> np.ndarray:
    r = rho4.reshape(2, 2, 2, 2)
    return np.einsum("abcb->ac", r)


@dataclass(frozen=True)
class ReceiverAffineMap:
    """Receiver response y = c + m @ x to the sender's x-vector.

    All entries are real; the map is fixed by the line (tensor) and the
    receiver's own initial state.
    """

    c: np.ndarray  # (3,)
    m: np.ndarray  # (3, 3)

    def apply(self, x) -> np.ndarray:
        return self.c + self.m @ np.asarray(x, dtype=float)

    def receiver_state(self, x) -> np.ndarray:
        y = self.apply(x)
        return np.array(
            [[1.0 - y[0], y[1] + 1j * y[2]], [y[1] - 1j * y[2], y[0]]]
        )


def receiver_map(
    tensor: TransferTensor, lambda_r: float, beta1: float, beta2: float
) -> ReceiverAffineMap:
    """Affine map assembled from the sender-traced tensor.

    Index convention of the traced tensor tt: [iN, l1, jN, k1].
    """
    rho_r0 = initial_qubit_state(lambda_r, beta1, beta2)
    tt = reduced_receiver_tensor(tensor, rho_r0)
    c = np.array(
        [tt[1, 0, 1, 0].real, tt[0, 0, 1, 0].real, tt[0, 0, 1, 0].imag]
    )
    d11 = tt[1, 1, 1, 1] - tt[1, 0, 1, 0]
    off1 = tt[1, 0, 1, 1]
    d0 = tt[0, 1, 1, 1] - tt[0, 0, 1, 0]
    sum0 = tt[0, 0, 1, 1] + tt[0, 1, 1, 0]
    dif0 = tt[0, 0, 1, 1] - tt[0, 1, 1, 0]
    m = np.array(
        [
            [d11.real, 2 * off1.real, -2 * off1.imag],
            [d0.real, sum0.real, -dif0.imag],
            [d0.imag, sum0.imag, dif0.real],
        ]
    )
    return ReceiverAffineMap(c, m)
