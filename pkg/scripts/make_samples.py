#!/usr/bin/env python3
"""Write samples of a closed-form expression on a lattice, for `exprecog --input`."""

import argparse

import numpy as np

from exprecog.expr import evaluate_expression, parse_expression
from exprecog.samples import write_samples


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("expr")
    ap.add_argument("out", help="output path, .csv or .json")
    ap.add_argument("--step", type=float, default=0.25)
    ap.add_argument("--count", type=int, default=17, help="points per axis")
    ap.add_argument("--dim", type=int, default=1)
    args = ap.parse_args()

    axis = (np.arange(args.count) - args.count // 2) * args.step
    pts = np.stack(np.meshgrid(*[axis] * args.dim, indexing="ij"), -1).reshape(-1, args.dim)
    write_samples(args.out, pts, evaluate_expression(parse_expression(args.expr, args.dim), pts))
    print(f"wrote {len(pts)} samples to {args.out}")


if __name__ == "__main__":
    main()
