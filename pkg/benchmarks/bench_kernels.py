"""Benchmark the accelerated kernels against their numpy fallbacks.

Times both implementations of each hot kernel in one process (the jit
path is warmed up first so compilation stays out of the numbers).  Run
from the repository root:

    python3 benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import timeit

import numpy as np

from confvan._accel import HAS_NUMBA, _pair_sep_scan_numpy, _trig_poly_eval_numpy

if HAS_NUMBA:
    from confvan._accel import _pair_sep_scan_numba, _trig_poly_eval_numba


def best_of(func, repeats):
    return min(timeit.repeat(func, repeat=repeats, number=1))


def bench_trig_poly(rng, repeats):
    cases = [("small poly, dense grid", 33, 200_000),
             ("large poly, dense grid", 2049, 20_000)]
    for label, n_coef, n_pts in cases:
        coeffs = np.ascontiguousarray(
            rng.normal(size=n_coef) + 1j * rng.normal(size=n_coef))
        omegas = np.ascontiguousarray(rng.uniform(-0.5, 0.5, size=n_pts))
        t_np = best_of(lambda: _trig_poly_eval_numpy(coeffs, omegas), repeats)
        row = f"trig_poly_eval   {label:24s} numpy {t_np * 1e3:9.2f} ms"
        if HAS_NUMBA:
            _trig_poly_eval_numba(coeffs[:2], omegas[:2])  # warm the jit
            t_nb = best_of(lambda: _trig_poly_eval_numba(coeffs, omegas),
                           repeats)
            row += f"   numba {t_nb * 1e3:9.2f} ms   speedup {t_np / t_nb:5.1f}x"
        print(row)


def bench_pair_scan(rng, repeats):
    cases = [("few pairs, long scan", 28, 500_000),
             ("many pairs, long scan", 496, 100_000)]
    for label, n_pairs, n_lam in cases:
        diffs = np.ascontiguousarray(rng.uniform(-4.0, 4.0, size=n_pairs))
        is_intra = np.ascontiguousarray(rng.random(n_pairs) < 0.5)
        lambdas = np.ascontiguousarray(np.linspace(0.0, 64.0, n_lam))
        t_np = best_of(lambda: _pair_sep_scan_numpy(diffs, is_intra, lambdas),
                       repeats)
        row = f"pair_sep_scan    {label:24s} numpy {t_np * 1e3:9.2f} ms"
        if HAS_NUMBA:
            _pair_sep_scan_numba(diffs[:2], is_intra[:2], lambdas[:2])
            t_nb = best_of(
                lambda: _pair_sep_scan_numba(diffs, is_intra, lambdas),
                repeats)
            row += f"   numba {t_nb * 1e3:9.2f} ms   speedup {t_np / t_nb:5.1f}x"
        print(row)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repetitions per case (default 5)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if not HAS_NUMBA:
        print("numba inactive (not installed or CONFVAN_DISABLE_NUMBA=1); "
              "timing the numpy path only")
    rng = np.random.default_rng(args.seed)
    bench_trig_poly(rng, args.repeats)
    bench_pair_scan(rng, args.repeats)


if __name__ == "__main__":
    main()
