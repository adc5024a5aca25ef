"""Pure-numpy kernel backend: batched assembly and gufunc eigenvalues."""

import numpy as np

_SIGN = np.array([-1.0, 1.0, 1.0, -1.0])


def scores_from_states(rho: np.ndarray) -> np.ndarray:
    """Unclipped Wootters scores of a (..., 4, 4) stack of density matrices."""
    flip = _SIGN[:, None] * _SIGN[None, :]
    rho_tilde = flip * np.conj(rho[..., ::-1, ::-1])
    ev = np.linalg.eigvals(rho @ rho_tilde)
    lam = np.sqrt(np.clip(ev.real, 0.0, None))
    return 2.0 * lam.max(axis=-1) - lam.sum(axis=-1)


def pair_scores(entries, rho_s_stack, rho_r_stack):
    rho = np.einsum(
        "abcdefgh,icg,jdh->ijabef", entries, rho_s_stack, rho_r_stack, optimize=True
    )
    n_s, n_r = rho.shape[:2]
    return scores_from_states(rho.reshape(n_s, n_r, 4, 4))
