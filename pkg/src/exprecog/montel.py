"""Finite-step verification of the Montel-type span conditions.

For generators ``h_1..h_s`` of a dense subgroup, the bound
``dim span{f, tau_h f, ..., tau_h^n f} <= n`` at every ``h_i`` forces ``f`` to
be an exponential polynomial.  Here the span dimension is the numerical rank
of the sample matrix ``[f(x_j + k h)]_{k, j}`` on a finite point grid, so a
"certified" verdict is numerical evidence, not a proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import HypothesisViolation, InvalidArgument, InvalidInput
from .hankel import DEFAULT_TOL, numerical_rank
from .kronecker import GeneratorSet, generators_in_ball
from .oracle import FunctionOracle, line_restriction
from .prony import NotExponentialPolynomial, RecoveredExpPoly1D, RecoveryConfig, recover_1d

CERTIFIED = "certified"
REFUTED = "refuted"
INCONCLUSIVE = "inconclusive"
CERTIFICATE_NOTE = "certified (numerical): rank evidence on finitely many samples, not a proof"


def default_sample_grid(dim: int, size: int, seed: int = 42, radius: float = 1.0) -> np.ndarray:
    return np.random.default_rng(seed).uniform(-radius, radius, (size, dim))


@dataclass
class MontelHypothesis:
    generators: GeneratorSet
    orders: list[int]
    sample_grid: np.ndarray
    rank_tol: float = DEFAULT_TOL
    seed: int = 42

    def __post_init__(self):
        self.orders = [int(n) for n in self.orders]
        self.sample_grid = np.atleast_2d(np.asarray(self.sample_grid, dtype=float))
        if len(self.orders) != len(self.generators.generators):
            raise InvalidArgument("need exactly one order per generator")
        if any(n < 1 for n in self.orders):
            raise InvalidArgument("orders must be >= 1")
        if len(self.sample_grid) < max(self.orders) + 5:
            raise InvalidArgument(f"sample grid needs at least {max(self.orders) + 5} points")
        if self.sample_grid.shape[1] != self.generators.dim:
            raise InvalidArgument("sample grid dimension differs from generators")
        if not self.rank_tol > 0:
            raise InvalidArgument("rank_tol must be positive")

    @classmethod
    def build(cls, generators: GeneratorSet, orders: int | Sequence[int],
              grid_size: int | None = None, rank_tol: float = DEFAULT_TOL,
              seed: int = 42) -> MontelHypothesis:
        """Hypothesis with a seeded grid of ``max(24, 2*max(orders) + 5)`` points in [-1,1]^d."""
        if isinstance(orders, int):
            orders = [orders] * len(generators.generators)
        size = grid_size or max(24, 2 * max(orders) + 5)
        grid = default_sample_grid(generators.dim, size, seed)
        return cls(generators, list(orders), grid, rank_tol, seed)

    def doubled(self) -> MontelHypothesis:
        """Same hypothesis with as many extra seeded points appended to the grid."""
        lo, hi = self.sample_grid.min(axis=0), self.sample_grid.max(axis=0)
        extra = np.random.default_rng(self.seed + 1).uniform(lo, hi, self.sample_grid.shape)
        return MontelHypothesis(self.generators, self.orders,
                                np.vstack([self.sample_grid, extra]), self.rank_tol, self.seed + 1)


@dataclass(frozen=True)
class SpanTest:
    observed_rank: int
    passed: bool


def span_dimension_test(f: FunctionOracle, h, n: int, grid, rank_tol: float = DEFAULT_TOL) -> SpanTest:
    """Rank of rows ``(f(x_j + k h))_j`` for k = 0..n; passes iff rank <= n."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    if f.dim == 1 and grid.shape[0] == 1 and grid.shape[1] != 1:
        grid = grid.T
    if len(grid) < n + 5:
        raise InvalidArgument(f"grid needs at least {n + 5} points")
    h = np.atleast_1d(np.asarray(h, dtype=float))
    k = np.arange(n + 1)
    pts = grid[None, :, :] + k[:, None, None] * h[None, None, :]
    rows = f.evaluate_many(pts.reshape(-1, f.dim)).reshape(n + 1, len(grid))
    rank = numerical_rank(_equilibrate(rows), rank_tol)
    return SpanTest(rank, rank <= n)


def _equilibrate(m: np.ndarray, sweeps: int = 3) -> np.ndarray:
    """Alternate row and column sup-norm scaling; rank is unchanged, its
    numerical estimate no longer depends on how far apart the translates sit."""
    m = np.array(m, dtype=complex)
    if not np.all(np.isfinite(m)):
        return m
    for _ in range(sweeps):
        r = np.abs(m).max(axis=1, keepdims=True)
        m = m / np.where(r > 0, r, 1.0)
        c = np.abs(m).max(axis=0, keepdims=True)
        m = m / np.where(c > 0, c, 1.0)
    return m


@dataclass
class GeneratorCheck:
    generator: np.ndarray
    order: int
    observed_rank: int
    passed: bool
    doubled_rank: int | None = None


@dataclass
class MontelReport:
    per_generator: list[GeneratorCheck]
    conclusion: str
    note: str = CERTIFICATE_NOTE

    @property
    def certified(self) -> bool:
        return self.conclusion == CERTIFIED


def montel_verify(f: FunctionOracle, hyp: MontelHypothesis) -> MontelReport:
    """Certified iff every generator passes; refuted iff some failure survives grid doubling."""
    if f.dim != hyp.generators.dim:
        raise InvalidArgument(f"oracle dim {f.dim} != generator dim {hyp.generators.dim}")
    checks = []
    for g, n in zip(hyp.generators.generators, hyp.orders):
        try:
            t = span_dimension_test(f, g, n, hyp.sample_grid, hyp.rank_tol)
        except InvalidInput:
            # overflow along this generator: no evidence either way
            checks.append(GeneratorCheck(np.array(g), n, -1, False))
            continue
        checks.append(GeneratorCheck(np.array(g), n, t.observed_rank, t.passed))
    if all(c.passed for c in checks):
        return MontelReport(checks, CERTIFIED)
    doubled = hyp.doubled()
    robust = False
    for c in checks:
        if not c.passed and c.observed_rank >= 0:
            t = span_dimension_test(f, c.generator, c.order, doubled.sample_grid, hyp.rank_tol)
            c.doubled_rank = t.observed_rank
            robust |= t.observed_rank >= c.order + 1
    return MontelReport(checks, REFUTED if robust else INCONCLUSIVE)


@dataclass
class RadoReport:
    passed: bool
    worst_residual: float
    witness: tuple[np.ndarray, np.ndarray] | None


def rado_test(f: FunctionOracle, coeffs: Callable | np.ndarray, steps, x_grid,
              tol: float = DEFAULT_TOL) -> RadoReport:
    """Check ``sum_k a_k(h) f(x + k h) = 0`` on ``x_grid x steps``.

    ``coeffs`` is either a function ``h -> (a_0, ..., a_n)`` or an array with
    one coefficient row per step.  Residuals are relative to the largest term
    ``|a_k(h) f(x + k h)|`` at each ``(x, h)``.
    """
    steps = np.asarray(steps, dtype=float)
    steps = steps.reshape(len(steps), f.dim)
    xs = np.asarray(x_grid, dtype=float).reshape(-1, f.dim)
    if callable(coeffs):
        table = np.array([np.asarray(coeffs(h if f.dim > 1 else h[0]), dtype=complex) for h in steps])
    else:
        table = np.asarray(coeffs, dtype=complex)
    if table.ndim != 2 or table.shape[0] != len(steps):
        raise InvalidArgument("need one coefficient vector per step")
    if not np.any(table):
        raise HypothesisViolation("coefficient vector a(h) vanishes at every tested step")
    n = table.shape[1] - 1
    k = np.arange(n + 1)
    worst, witness = 0.0, None
    for h, a in zip(steps, table):
        pts = xs[:, None, :] + k[None, :, None] * h[None, None, :]
        vals = f.evaluate_many(pts.reshape(-1, f.dim)).reshape(len(xs), n + 1)
        terms = vals * a[None, :]
        scale = np.abs(terms).max(axis=1)
        resid = np.where(scale > 0, np.abs(terms.sum(axis=1)) / np.where(scale > 0, scale, 1.0), 0.0)
        j = int(np.argmax(resid))
        if witness is None or resid[j] > worst:
            worst, witness = float(resid[j]), (xs[j].copy(), h.copy())
    return RadoReport(worst <= tol, worst, witness)


@dataclass
class Certificate:
    montel: MontelReport
    model: RecoveredExpPoly1D | NotExponentialPolynomial | None = None
    line_models: list[tuple[np.ndarray, RecoveredExpPoly1D | NotExponentialPolynomial]] = field(default_factory=list)


def certify(f: FunctionOracle, hyp: MontelHypothesis,
            recovery_config: RecoveryConfig | None = None) -> Certificate:
    """Montel verification plus recovery: of ``f`` itself in one variable, or of
    its restrictions to the generator lines through the origin otherwise."""
    report = montel_verify(f, hyp)
    cert = Certificate(report)
    if not report.certified:
        return cert
    n_max = max(hyp.orders)
    if f.dim == 1:
        cert.model = recover_1d(f, n_max, recovery_config)
    else:
        for g in hyp.generators.generators:
            line = line_restriction(f, np.zeros(f.dim), g)
            cert.line_models.append((np.array(g), recover_1d(line, n_max, recovery_config)))
    return cert


def default_generators(dim: int) -> GeneratorSet:
    return generators_in_ball(np.zeros(dim), 1.0, dim)
