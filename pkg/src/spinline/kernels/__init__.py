"""Hot numeric kernels with selectable backend.

The expensive inner loop of every sweep is: assemble the 4x4 joint state
for one (sender state, receiver state) pair, then get the Wootters spectrum
of rho * rho_tilde.  Two implementations exist:

* ``numba``  - @njit(parallel=True) loop, fuses assembly and eigenvalues;
* ``numpy``  - vectorised einsum assembly plus gufunc-batched eigvals.

Selection: environment variable ``SPINLINE_BACKEND`` in {auto, numba, numpy}
(default auto = numba when importable, else numpy).  Both backends fill an
output slot per grid node independently, so results are identical bit for
bit regardless of thread count.
"""

from __future__ import annotations

import os

import numpy as np

from . import _numpy

_FORCED = os.environ.get("SPINLINE_BACKEND", "auto").strip().lower()
if _FORCED not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"SPINLINE_BACKEND={_FORCED!r} not one of auto/numba/numpy"
    )

_impl = _numpy
_name = "numpy"
if _FORCED in ("auto", "numba"):
    try:
        from . import _numba

        _impl = _numba
        _name = "numba"
    except ImportError:
        if _FORCED == "numba":
            raise
_HAS_NUMBA = _name == "numba"


def backend_name() -> str:
    return _name


def use_backend(name: str) -> None:
    """Switch backend at runtime (mainly for tests and benchmarks)."""
    global _impl, _name
    if name == "numpy":
        _impl, _name = _numpy, "numpy"
    elif name == "numba":
        from . import _numba

        _impl, _name = _numba, "numba"
    else:
        raise ValueError(f"unknown backend {name!r}")


def set_num_threads(n: int) -> None:
    """Cap worker threads of the active backend (no-op for numpy)."""
    if _name == "numba":
        import numba

        numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))


def pair_scores(entries, rho_s_stack, rho_r_stack):
    """Unclipped Wootters scores for every (sender, receiver) state pair.

    entries: (2,)*8 complex transfer tensor; stacks: (n, 2, 2) complex.
    Returns (n_s, n_r) float64 of 2*max(lam) - sum(lam); concurrence is the
    positive part.
    """
    entries = np.ascontiguousarray(entries, dtype=np.complex128)
    rho_s_stack = np.ascontiguousarray(rho_s_stack, dtype=np.complex128)
    rho_r_stack = np.ascontiguousarray(rho_r_stack, dtype=np.complex128)
    return _impl.pair_scores(entries, rho_s_stack, rho_r_stack)
