"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each kernel runs on the same inputs under both backends; results are checked
for agreement before timings are printed.
"""
import argparse
import time

import numpy as np

from ffrestrict.energy import _rich
from ffrestrict.field import PrimeContext, membership_table
from ffrestrict.kernels import get_backend
from ffrestrict.verifier import random_base, rng_for


def cases(quick):
    rng = rng_for(2024, 0)
    p3, p2 = (7, 31) if quick else (11, 61)
    ctx3, ctx2 = PrimeContext(p3), PrimeContext(p2)
    B3 = np.ascontiguousarray(random_base(rng, p3, 3, 120 if quick else 400))
    B2 = np.ascontiguousarray(random_base(rng, p2, 2, 150 if quick else 600))
    table = membership_table(B3, p3)
    keys, iso, _ = _rich(B3, p3, 4)
    supp = np.ascontiguousarray(random_base(rng, p3, 3, 100))
    w = rng.normal(size=len(supp)) + 0j
    normals = random_base(rng, p3, 3, 200)
    normals = normals[normals.any(axis=1)]
    offsets = rng.integers(0, p3, len(normals))
    mults = np.ones(len(normals), np.int64)
    p4 = 43 if quick else 83
    B4 = np.ascontiguousarray(random_base(rng, p4, 2, 400))
    return {
        "pair_sum_counts": lambda k: k.pair_sum_counts(B3, B3, p3),
        "rectangle_scan": lambda k: k.rectangle_scan(B3, table, p3, ctx3.inverse, keys, iso),
        "right_triangle_count": lambda k: k.right_triangle_count(B2, p2),
        "pair_line_keys": lambda k: np.sort(k.pair_line_keys(B2, p2, ctx2.inverse)),
        "charsum": lambda k: k.charsum(supp, w, p3, 3, -1, ctx3.character),
        "plane_incidences": lambda k: k.plane_incidences(B3, normals, offsets, mults, p3),
        "perp_decomposition": lambda k: k.perp_decomposition(
            B4, p4, PrimeContext(p4).inverse, 3.0, 6.0),
    }


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args()
    nb, npy = get_backend("numba"), get_backend("numpy")
    print(f"{'kernel':<22}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, fn in cases(args.quick).items():
        fn(nb)  # compile
        t_nb, a = best_of(lambda: fn(nb), args.repeat)
        t_np, b = best_of(lambda: fn(npy), args.repeat)
        if not np.allclose(np.asarray(a), np.asarray(b), rtol=1e-9, atol=1e-9):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<22}{t_nb * 1e3:>12.2f}{t_np * 1e3:>12.2f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
