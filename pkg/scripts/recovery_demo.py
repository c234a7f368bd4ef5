#!/usr/bin/env python3
"""Recover a few one-variable models and report exponents and held-out error."""

import argparse
import math

import numpy as np

from exprecog.fixtures import fixture_set
from exprecog.oracle import FunctionOracle, SampledOracle
from exprecog.prony import RecoveredExpPoly1D, RecoveryConfig, recover_1d


def show(name, r):
    if isinstance(r, RecoveredExpPoly1D):
        lams = ", ".join(f"{l.real:+.6f}{l.imag:+.6f}i (x{m})" for l, m in r.exponents)
        print(f"{name:22s} order {r.order}  held-out {r.fit_residual:.1e}  exponents {lams}")
    else:
        print(f"{name:22s} rejected at {r.stage}: {r.detail}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fixtures", type=int, default=20)
    args = ap.parse_args()

    show("3*2^x + 1", recover_1d(FunctionOracle.from_callable(1, lambda t: 3 * 2**t + 1)))
    show("x^2 e^x", recover_1d(FunctionOracle.from_callable(1, lambda t: t * t * math.exp(t))))
    show("exp(t^2)", recover_1d(FunctionOracle.from_callable(1, lambda t: math.exp(t * t))))

    # cos(3x) seen only on two lattices; step 1.5 aliases 3i without the second one
    for h in (0.5, 1.5):
        h2 = h * (1 + math.sqrt(5)) / 2
        x = np.unique(np.round(np.concatenate([np.arange(-12, 13) * h, np.arange(-8, 9) * h2]), 12))
        s = SampledOracle(x, np.cos(3 * x))
        show(f"cos 3x, h={h}", recover_1d(s, 4, RecoveryConfig(step=h, confirm_step=h2)))
        show(f"cos 3x, h={h}, no 2nd", recover_1d(s, 4, RecoveryConfig(step=h, confirm=False)))

    worst = 0.0
    for p, n in fixture_set(args.fixtures, dims=(1,)):
        r = recover_1d(FunctionOracle.from_exppoly(p))
        worst = max(worst, r.fit_residual if isinstance(r, RecoveredExpPoly1D) else math.inf)
    print(f"{args.fixtures} random fixtures: worst held-out relative error {worst:.1e}")


if __name__ == "__main__":
    main()
