"""Seeded random exponential polynomials used by tests and experiment scripts.

One-variable fixtures mix exponents of multiplicity 1-3 (polynomial parts of
degree up to 2).  Two-variable fixtures use polynomial parts of degree <= 1,
for which the translation-space dimension equals the order seen along a
generic line, so the Hankel order estimate can hit it exactly.
"""

from __future__ import annotations

import numpy as np

from .exppoly import ExpPoly, MultivariatePolynomial

MIN_SEPARATION = 1.0


def _draw_exponents(rng, count, dim, re_bound, im_bound, complex_prob):
    lams: list[np.ndarray] = []
    while len(lams) < count:
        lam = rng.uniform(-re_bound, re_bound, dim).astype(complex)
        if rng.random() < complex_prob:
            lam = lam + 1j * rng.uniform(-im_bound, im_bound, dim)
        if all(np.max(np.abs(lam - other)) >= MIN_SEPARATION for other in lams):
            lams.append(lam)
    return lams


def _coefficient(rng, complex_prob=0.3):
    mag = rng.uniform(0.5, 5.0) * rng.choice([-1.0, 1.0])
    if rng.random() < complex_prob:
        return mag * np.exp(1j * rng.uniform(0, 2 * np.pi))
    return mag


def random_exppoly_1d(rng, dimension: int, re_bound=1.0, im_bound=3.0,
                      max_multiplicity=3, complex_prob=0.7) -> ExpPoly:
    """Random one-variable ExpPoly with translation dimension exactly ``dimension``."""
    mults = []
    remaining = dimension
    while remaining:
        m = int(rng.integers(1, min(max_multiplicity, remaining) + 1))
        mults.append(m)
        remaining -= m
    lams = _draw_exponents(rng, len(mults), 1, re_bound, im_bound, complex_prob)
    pairs = []
    for m, lam in zip(mults, lams):
        coeffs = [rng.uniform(-5, 5) for _ in range(m - 1)] + [_coefficient(rng)]
        pairs.append((coeffs, lam[0]))
    return ExpPoly.from_1d(pairs)


def random_exppoly_2d(rng, dimension: int, re_bound=1.0, im_bound=3.0,
                      complex_prob=0.7) -> ExpPoly:
    """Random two-variable ExpPoly, polynomial parts of degree <= 1."""
    sizes = []
    remaining = dimension
    while remaining:
        m = int(rng.integers(1, min(2, remaining) + 1))
        sizes.append(m)
        remaining -= m
    lams = _draw_exponents(rng, len(sizes), 2, re_bound, im_bound, complex_prob)
    terms = []
    for m, lam in zip(sizes, lams):
        if m == 1:
            poly = MultivariatePolynomial.constant(2, _coefficient(rng))
        else:
            b = rng.uniform(-1, 1, 2)
            b = b / np.abs(b).max() * _coefficient(rng)
            poly = MultivariatePolynomial(2, {(0, 0): rng.uniform(-5, 5), (1, 0): b[0], (0, 1): b[1]})
        terms.append((poly, tuple(lam)))
    return ExpPoly(2, tuple(terms))


def fixture_set(count: int = 100, seed: int = 2024, max_dimension: int = 6,
                dims=(1, 2), **kwargs) -> list[tuple[ExpPoly, int]]:
    """``count`` seeded fixtures as ``(ExpPoly, translation dimension)`` pairs.

    Dimensions cycle through 1..max_dimension; variable counts alternate over ``dims``.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        d = dims[i % len(dims)]
        n = 1 + (i // len(dims)) % max_dimension
        if d == 1:
            p = random_exppoly_1d(rng, n, **kwargs)
        else:
            p = random_exppoly_2d(rng, n, **{k: v for k, v in kwargs.items() if k != "max_multiplicity"})
        out.append((p, n))
    return out
