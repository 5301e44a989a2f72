"""Timing comparison of the two Newton kernel backends.

Both code paths always exist in gaudin.kernels: the numba-compiled loop
kernels (used by default when numba imports and GAUDIN_PURE_NUMPY is unset)
and the vectorized numpy fallback.  This script times multistart Newton runs
of both on the same batches of random starts, after a warmup call so that
JIT compilation is not counted.

Usage: python benchmarks/bench_kernels.py [--starts 400] [--seed 0]
"""

import argparse
import time
from fractions import Fraction

import numpy as np

from gaudin import kernels
from gaudin.master import GaudinProblem

INSTANCES = [
    ("2 sites, 1 var,  N=1", GaudinProblem(
        1, [[1, 0], [1, 0]], [1], [Fraction(0), Fraction(1)])),
    ("2 sites, 2 vars, N=1", GaudinProblem(
        1, [[2, 0], [2, 0]], [2], [Fraction(0), Fraction(1)])),
    ("2 sites, 2 vars, N=2", GaudinProblem(
        2, [[2, 1, 0], [2, 1, 0]], [1, 1], [Fraction(0), Fraction(1)])),
    ("2 sites, 4 vars, N=1", GaudinProblem(
        1, [[4, 0], [4, 0]], [4], [Fraction(0), Fraction(1)])),
    ("3 sites, 3 vars, N=1", GaudinProblem(
        1, [[3, 0], [2, 0], [1, 0]], [3],
        [Fraction(0), Fraction(1), Fraction(3)])),
]


def run_batch(newton, starts, cmat, zc, A):
    converged = 0
    t0 = time.perf_counter()
    for t_start in starts:
        _, ok, _ = newton(t_start, cmat, zc, A, 200, 1e-12, 1e-8)
        converged += bool(ok)
    return time.perf_counter() - t0, converged


def numba_newton(t0, cmat, zc, A, max_iter, tol, margin):
    try:
        return kernels._newton_loops(np.ascontiguousarray(t0), cmat, zc, A,
                                     max_iter, tol, margin)
    except np.linalg.LinAlgError:
        return t0, False, np.inf


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--starts", type=int, default=400)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    have_numba = kernels.HAS_NUMBA and not kernels.PURE_NUMPY
    print(f"active dispatch: {kernels.backend_name()}  "
          f"(numba available: {kernels.HAS_NUMBA})")
    print(f"{'instance':<22} {'starts':>6} {'numpy':>9} "
          f"{'numba':>9} {'speedup':>8}  converged")
    for label, problem in INSTANCES:
        cmat, A, zc = problem.arrays()
        n = problem.n_vars
        radius = 2.0 * max(abs(z) for z in zc)
        starts = [(radius * (rng.uniform(-1, 1, n)
                             + 1j * rng.uniform(-1, 1, n))).astype(
                                 np.complex128)
                  for _ in range(args.starts)]
        t_np, conv_np = run_batch(kernels.newton_numpy, starts, cmat, zc, A)
        if have_numba:
            run_batch(numba_newton, starts[:1], cmat, zc, A)   # JIT warmup
            t_nb, conv_nb = run_batch(numba_newton, starts, cmat, zc, A)
            print(f"{label:<22} {args.starts:>6} {t_np:>8.3f}s "
                  f"{t_nb:>8.3f}s {t_np / t_nb:>7.1f}x  "
                  f"{conv_np} vs {conv_nb} of {args.starts}")
        else:
            print(f"{label:<22} {args.starts:>6} {t_np:>8.3f}s "
                  f"{'-':>9} {'-':>8}  {conv_np} of {args.starts}")


if __name__ == "__main__":
    main()
