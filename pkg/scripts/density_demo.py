#!/usr/bin/env python3
"""Hit rate of the generator search as the budget grows, dense vs. lattice."""

import argparse

import numpy as np

from exprecog.kronecker import GeneratorSet, density_probe, generators_in_ball


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=0.02)
    ap.add_argument("--targets", type=int, default=100)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    sets = {
        "{1, sqrt2}": GeneratorSet.from_theta([np.sqrt(2)]),
        "d=2 ball(0,1)": generators_in_ball(np.zeros(2), 1.0, 2),
        "d=2 ball((5,5),1)": generators_in_ball([5.0, 5.0], 1.0, 2),
        "Z only": GeneratorSet.coordinate_lattice(1),
    }
    budgets = [10, 100, 1000, 10_000]
    print(f"{'set':20s}" + "".join(f"{b:>10d}" for b in budgets))
    for name, g in sets.items():
        rates = [density_probe(g, args.targets, args.eps, b, args.seed).hit_rate for b in budgets]
        print(f"{name:20s}" + "".join(f"{r:10.2f}" for r in rates))


if __name__ == "__main__":
    main()
