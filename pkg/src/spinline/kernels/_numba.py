"""Numba kernel backend: fused assembly + eigenvalues, parallel over nodes.

Each grid node writes only its own output slot, so the result is independent
of the thread count.
"""

import numpy as np
from numba import njit, prange


@njit(cache=True)
def _score_one(entries, rs, rr, rho, rho_tilde):
    # joint 4x4 state: row (i1, iN), column (j1, jN), sender bit leading
    for a in range(2):
        for b in range(2):
            for e in range(2):
                for f in range(2):
                    acc = 0.0 + 0.0j
                    for c in range(2):
                        for g in range(2):
                            rs_cg = rs[c, g]
                            if rs_cg != 0.0:
                                for d in range(2):
                                    for h in range(2):
                                        acc += (
                                            entries[a, b, c, d, e, f, g, h]
                                            * rs_cg
                                            * rr[d, h]
                                        )
                    rho[2 * a + b, 2 * e + f] = acc
    for i in range(4):
        si = -1.0 if i == 0 or i == 3 else 1.0
        for j in range(4):
            sj = -1.0 if j == 0 or j == 3 else 1.0
            rho_tilde[i, j] = si * sj * np.conj(rho[3 - i, 3 - j])
    ev = np.linalg.eigvals(np.dot(rho, rho_tilde))
    top = 0.0
    total = 0.0
    for k in range(4):
        lam = np.sqrt(max(ev[k].real, 0.0))
        total += lam
        if lam > top:
            top = lam
    return 2.0 * top - total


@njit(parallel=True, cache=True)
def pair_scores(entries, rho_s_stack, rho_r_stack):
    n_s = rho_s_stack.shape[0]
    n_r = rho_r_stack.shape[0]
    out = np.empty((n_s, n_r))
    for flat in prange(n_s * n_r):
        i = flat // n_r
        j = flat - i * n_r
        rho = np.empty((4, 4), dtype=np.complex128)
        rho_tilde = np.empty((4, 4), dtype=np.complex128)
        out[i, j] = _score_one(
            entries, rho_s_stack[i], rho_r_stack[j], rho, rho_tilde
        )
    return out
