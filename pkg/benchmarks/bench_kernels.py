"""Benchmark the sweep kernel backends against each other.

Times the Wootters-score kernel on a representative four-angle sweep grid
(the dominant cost of every concurrence landscape) for both the numba and
the pure-numpy backend, and verifies that they agree to roundoff.
"""

import argparse
import time

import numpy as np

from spinline import kernels
from spinline.chain import ChainSpec
from spinline.sweeps import _state_stack, unit_axis
from spinline.transfer import compute_transfer_tensor


def run(n: int, t: float, step: float, repeats: int) -> None:
    tensor = compute_transfer_tensor(ChainSpec(n), t)
    nodes = unit_axis("alpha1", step).nodes()
    rho_s = _state_stack(1.0, nodes, nodes)
    rho_r = _state_stack(0.8, nodes, nodes)
    total = rho_s.shape[0] * rho_r.shape[0]
    print(f"chain N={n}, t={t}, angle step {step}: "
          f"{rho_s.shape[0]} x {rho_r.shape[0]} = {total} grid nodes")

    results = {}
    timings = {}
    for backend in ("numpy", "numba"):
        try:
            kernels.use_backend(backend)
        except ImportError:
            print(f"{backend:>6}: unavailable")
            continue
        kernels.pair_scores(tensor.entries, rho_s[:4], rho_r[:4])  # warm up
        best = np.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            results[backend] = kernels.pair_scores(tensor.entries, rho_s, rho_r)
            best = min(best, time.perf_counter() - t0)
        timings[backend] = best
        print(f"{backend:>6}: {best:8.3f} s  ({best / total * 1e6:7.2f} us/node)")
    if len(results) == 2:
        diff = np.abs(results["numpy"] - results["numba"]).max()
        speedup = timings["numpy"] / timings["numba"]
        print(f"max |numpy - numba| = {diff:.2e}")
        print(f"numba speedup: {speedup:.2f}x")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=40)
    parser.add_argument("--time", type=float, default=43.442)
    parser.add_argument("--step", type=float, default=0.05)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    run(args.n, args.time, args.step, args.repeats)


if __name__ == "__main__":
    main()
