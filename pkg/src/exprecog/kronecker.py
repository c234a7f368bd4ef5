"""Finite generator sets of dense additive subgroups of R^d inside any ball.

``(1/N)(Z^d + theta Z)`` is dense when ``{1, theta_1, ..., theta_d}`` is
linearly independent over Q.  With ``theta`` the square roots of the first
``d`` primes and ``N`` large the generators ``e_i/N`` and ``theta/N`` fit in
any ball around 0; for a ball around ``x0`` the set ``{x0, x0 + h_i}`` works
because the group it generates contains every ``h_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

X0_BUDGET = 8


def _primes(count: int) -> list[int]:
    out, k = [], 2
    while len(out) < count:
        if all(k % p for p in out if p * p <= k):
            out.append(k)
        k += 1
    return out


def default_theta(d: int) -> np.ndarray:
    """Square roots of the first ``d`` primes."""
    if d < 1:
        raise InvalidArgument("d must be >= 1")
    return np.sqrt(np.array(_primes(d), dtype=float))


@dataclass(frozen=True)
class GeneratorSet:
    """Generators of ``t*x0 + (1/N)(Z^d + theta Z)``-type groups.

    ``generators`` is ``[e_1/N, ..., e_d/N, theta/N]`` for a ball at the origin,
    or ``[x0, x0 + e_1/N, ..., x0 + e_d/N, x0 + theta/N]`` otherwise.  ``theta``
    may be None for a plain coordinate lattice (not dense; used as a control).
    """

    dim: int
    generators: np.ndarray
    scale: float
    theta: np.ndarray | None
    center: np.ndarray
    radius: float

    @property
    def offset(self) -> np.ndarray | None:
        """``x0`` when the set includes it as its own generator, else None."""
        return self.center if np.any(self.center) else None

    @classmethod
    def from_theta(cls, theta, scale: float = 1.0) -> GeneratorSet:
        """Origin-centered set ``{scale*e_i} + {scale*theta}``; radius is set to enclose them."""
        theta = None if theta is None else np.atleast_1d(np.asarray(theta, dtype=float))
        d = len(theta) if theta is not None else 1
        gens = [scale * e for e in np.eye(d)]
        if theta is not None:
            gens.append(scale * theta)
        gens = np.array(gens)
        radius = float(np.nextafter(np.linalg.norm(gens, axis=1).max(), np.inf))
        return cls(d, gens, float(scale), theta, np.zeros(d), radius)

    @classmethod
    def coordinate_lattice(cls, d: int, scale: float = 1.0) -> GeneratorSet:
        gs = cls.from_theta(np.zeros(d), scale)
        return cls(d, gs.generators[:d], gs.scale, None, gs.center, gs.radius)


def generators_in_ball(x0, eps: float, d: int | None = None) -> GeneratorSet:
    """Generators of a dense subgroup of R^d, all strictly inside ``B(x0, eps)``."""
    if not eps > 0:
        raise InvalidArgument("eps must be positive")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if d is None:
        d = len(x0)
    if x0.shape == (1,) and d > 1 and x0[0] == 0:
        x0 = np.zeros(d)
    if x0.shape != (d,):
        raise InvalidArgument(f"center has length {len(x0)}, expected {d}")
    theta = default_theta(d)
    if not np.any(x0):
        longest = max(1.0, float(np.linalg.norm(theta)))
        big_n = math.floor(longest / eps) + 1
        # guard against rounding at the boundary
        while longest / big_n >= eps:
            big_n += 1
        gs = GeneratorSet.from_theta(theta, 1.0 / big_n)
        return GeneratorSet(d, gs.generators, gs.scale, theta, x0, float(eps))
    inner = generators_in_ball(np.zeros(d), eps / 2, d)
    gens = np.vstack([x0[None, :], x0[None, :] + inner.generators])
    return GeneratorSet(d, gens, inner.scale, theta, x0, float(eps))


@dataclass(frozen=True)
class ApproximationResult:
    coefficients: tuple[int, ...]
    achieved: np.ndarray
    error: float
    budget_exhausted: bool


def _sweep(budget: int) -> np.ndarray:
    """0, 1, -1, 2, -2, ..., budget, -budget."""
    m = np.arange(1, budget + 1)
    return np.concatenate([[0], np.column_stack([m, -m]).ravel()])


def approximate(target, g: GeneratorSet, eps: float, budget: int,
                x0_budget: int = X0_BUDGET) -> ApproximationResult:
    """Integer combination of ``g.generators`` within sup-distance ``eps`` of ``target``.

    Sweeps the theta-coefficient over ``0, 1, -1, ..., +-budget`` (and the
    x0-multiplier over ``+-x0_budget`` when the set carries an offset),
    rounding the coordinate coefficients.  Returns the first hit along the
    sweep, or the best combination seen flagged ``budget_exhausted``.
    """
    if not eps > 0:
        raise InvalidArgument("eps must be positive")
    if budget < 1:
        raise InvalidArgument("budget must be >= 1")
    target = np.atleast_1d(np.asarray(target, dtype=float))
    if target.shape != (g.dim,):
        raise InvalidArgument(f"target has length {len(target)}, expected {g.dim}")
    ms = _sweep(budget) if g.theta is not None else np.array([0])
    offset = g.offset
    ts = _sweep(x0_budget) if offset is not None else np.array([0])
    theta_step = g.scale * g.theta if g.theta is not None else np.zeros(g.dim)
    x0 = offset if offset is not None else np.zeros(g.dim)

    # per x0-multiple: first hit along the sweep, else the closest point; then
    # the smallest of those, which keeps the error monotone in the budget
    best, best_hit = None, False
    for t in ts:
        rest = target - t * x0
        base = rest[None, :] - ms[:, None] * theta_step[None, :]
        lattice = np.rint(base / g.scale)
        achieved = t * x0 + ms[:, None] * theta_step[None, :] + lattice * g.scale
        errs = np.abs(target[None, :] - achieved).max(axis=1)
        hits = np.nonzero(errs <= eps)[0]
        idx = int(hits[0]) if hits.size else int(np.argmin(errs))
        cand = (float(errs[idx]), int(t), int(ms[idx]), lattice[idx].astype(int))
        if best is None or cand[0] < best[0]:
            best, best_hit = cand, bool(hits.size)
    return _result(g, target, best, hit=best_hit)


def _result(g: GeneratorSet, target: np.ndarray, cand, hit: bool) -> ApproximationResult:
    _, t, m, lattice = cand
    coeffs = [int(c) for c in lattice]
    if g.theta is not None:
        coeffs.append(m)
    if g.offset is not None:
        # x0 itself absorbs whatever multiple of x0 the shifted generators do not supply
        coeffs = [t - sum(coeffs)] + coeffs
    coeffs = tuple(coeffs)
    achieved = np.asarray(coeffs, dtype=float) @ g.generators
    return ApproximationResult(coeffs, achieved, float(np.abs(achieved - target).max()), not hit)


@dataclass(frozen=True)
class DensityReport:
    hit_rate: float
    worst_error: float
    num_targets: int


def density_probe(g: GeneratorSet, num_targets: int, eps: float, budget: int,
                  seed: int = 42) -> DensityReport:
    """Fraction of uniform targets in ``[0,1]^d`` that ``approximate`` reaches within eps."""
    if num_targets == 0:
        return DensityReport(1.0, 0.0, 0)
    targets = np.random.default_rng(seed).uniform(0.0, 1.0, (num_targets, g.dim))
    errors = [approximate(t, g, eps, budget).error for t in targets]
    hits = sum(e <= eps for e in errors)
    return DensityReport(hits / num_targets, float(max(errors)), num_targets)
