#!/usr/bin/env python3
"""Hankel order estimate vs. true translation dimension on seeded fixtures.

Prints one row per fixture where the estimate misses, then a summary, and the
worst row-scaled determinant magnitude per order for two non-examples.
"""

import argparse
import math

import numpy as np

from exprecog.exppoly import translation_space_dimension
from exprecog.fixtures import fixture_set
from exprecog.hankel import default_grid, estimate_order, popoviciu_test
from exprecog.oracle import FunctionOracle


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--grid-size", type=int, default=12)
    ap.add_argument("--tol", type=float, default=1e-8)
    args = ap.parse_args()

    fixtures = fixture_set(args.count, seed=args.seed)
    exact = 0
    for i, (p, n) in enumerate(fixtures):
        f = FunctionOracle.from_exppoly(p)
        grid = default_grid(p.dim, args.grid_size, tol=args.tol)
        k = estimate_order(f, 8, grid)
        exact += k == n
        if k != n:
            below = popoviciu_test(f, n - 1, grid).worst_magnitude
            print(f"fixture {i:3d}  d={p.dim}  true={n}  estimate={k}  magnitude at n-1: {below:.2e}")
    print(f"exact: {exact}/{len(fixtures)}")
    assert all(translation_space_dimension(p) == n for p, n in fixtures)

    print("\nworst magnitude by order (default grid)")
    cases = {
        "exp(t^2)": FunctionOracle.from_callable(1, lambda t: math.exp(t * t)),
        "exp(x1*x2)": FunctionOracle(2, lambda P: np.exp(P[:, 0] * P[:, 1])),
    }
    for name, f in cases.items():
        grid = default_grid(f.dim, args.grid_size, tol=args.tol)
        mags = [popoviciu_test(f, n, grid).worst_magnitude for n in range(1, 7)]
        print(f"{name:12s}", "  ".join(f"{m:.1e}" for m in mags))


if __name__ == "__main__":
    main()
