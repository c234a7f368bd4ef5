"""Recurrence fitting and Prony-style recovery of one-variable exponential polynomials.

Pipeline: Hankel order estimate -> least-squares recurrence at step h ->
companion-matrix roots mu -> exponents lam = log(mu)/h (aliasing fixed with a
second, incommensurate step) -> least-squares polynomial coefficients ->
validation on held-out samples.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateOrderError, DegenerateRootError, InvalidArgument
from .exppoly import ExpPoly
from .hankel import TestGrid, default_grid, estimate_order, lattice_grid
from .oracle import FunctionOracle, SampledOracle

GOLDEN = (1 + math.sqrt(5)) / 2
DEFAULT_STEP = 0.5
RECURRENCE_RANK_TOL = 1e-11
CONDITION_LIMIT = 1e12


class ConditioningWarning(UserWarning):
    pass


@dataclass(frozen=True)
class RecurrenceCoefficients:
    """``sum_k a[k] f(x + k h) = 0`` with ``a[n] == 1``.

    ``step_domain_bound`` is the largest step the coefficients were fitted at;
    nothing is claimed about other steps.
    """

    h: float
    n: int
    a: np.ndarray
    step_domain_bound: float
    residual: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        if self.n < 1 or a.shape != (self.n + 1,):
            raise InvalidArgument("need n >= 1 and n+1 coefficients")
        if a[-1] != 1:
            raise InvalidArgument("recurrence must be normalized with a_n = 1")
        object.__setattr__(self, "a", a)


@dataclass(frozen=True)
class CharacteristicRoots:
    clusters: tuple[tuple[complex, int], ...]

    @property
    def n(self) -> int:
        return sum(m for _, m in self.clusters)


def _as_1d_oracle(f: FunctionOracle):
    if f.dim != 1:
        raise InvalidArgument("one-variable oracle required")


def _window_matrix(f: FunctionOracle, x: np.ndarray, h: float, n: int) -> np.ndarray:
    pts = x[:, None] + np.arange(n + 1)[None, :] * h
    return f.evaluate_many(pts.reshape(-1, 1)).reshape(len(x), n + 1)


def fit_recurrence(f: FunctionOracle, n: int, h: float, x_points,
                   rank_tol: float = RECURRENCE_RANK_TOL) -> RecurrenceCoefficients:
    _as_1d_oracle(f)
    x = np.asarray(x_points, dtype=float).reshape(-1)
    if n < 1:
        raise InvalidArgument("order n must be >= 1")
    if h == 0:
        raise InvalidArgument("step h must be nonzero")
    if len(x) < n + 4:
        raise InvalidArgument(f"need at least {n + 4} base points, got {len(x)}")
    vals = _window_matrix(f, x, h, n)
    design, rhs = vals[:, :n], -vals[:, n]
    s = np.linalg.svd(design, compute_uv=False)
    if s[0] == 0 or s[-1] <= rank_tol * s[0]:
        detected = 0 if s[0] == 0 else int(np.sum(s > rank_tol * s[0]))
        raise DegenerateOrderError(n, detected)
    sol, *_ = np.linalg.lstsq(design, rhs, rcond=None)
    residual = np.linalg.norm(design @ sol - rhs) / max(np.linalg.norm(rhs), np.finfo(float).tiny)
    return RecurrenceCoefficients(float(h), n, np.append(sol, 1.0), abs(float(h)), float(residual))


@dataclass(frozen=True)
class RecurrenceCheck:
    passed: bool
    worst_residual: float
    worst_x: float | None


def verify_recurrence(f: FunctionOracle, rec: RecurrenceCoefficients, grid,
                      tol: float = 1e-9) -> RecurrenceCheck:
    """Relative residual ``|sum a_k f(x+kh)| / max_k |a_k f(x+kh)|`` at each grid x."""
    _as_1d_oracle(f)
    x = np.asarray(grid, dtype=float).reshape(-1)
    terms = _window_matrix(f, x, rec.h, rec.n) * rec.a[None, :]
    scale = np.abs(terms).max(axis=1)
    resid = np.abs(terms.sum(axis=1)) / np.where(scale > 0, scale, 1.0)
    resid = np.where(scale > 0, resid, 0.0)
    if len(x) == 0:
        return RecurrenceCheck(True, 0.0, None)
    worst = int(np.argmax(resid))
    return RecurrenceCheck(bool(np.all(resid <= tol)), float(resid[worst]), float(x[worst]))


def companion_roots(a) -> np.ndarray:
    """All roots of the monic ``a_0 + a_1 z + ... + z^n`` as companion eigenvalues."""
    a = np.asarray(a, dtype=complex)
    n = len(a) - 1
    comp = np.zeros((n, n), dtype=complex)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -a[:n]
    return np.linalg.eigvals(comp)


def cluster_roots(roots, tol: float) -> CharacteristicRoots:
    """Single-linkage clustering at relative distance ``tol``; centers are means."""
    roots = np.asarray(roots, dtype=complex)
    groups = [[r] for r in roots]
    merged = True
    while merged:
        merged = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                ci, cj = np.mean(groups[i]), np.mean(groups[j])
                close_centers = abs(ci - cj) <= tol * max(abs(ci), abs(cj))
                close_members = any(
                    abs(r - s) <= tol * max(abs(r), abs(s)) for r in groups[i] for s in groups[j]
                )
                if close_centers or close_members:
                    groups[i] = groups[i] + groups.pop(j)
                    merged = True
                    break
            if merged:
                break
    clusters = sorted(((complex(np.mean(g)), len(g)) for g in groups),
                      key=lambda c: (round(c[0].real, 12), round(c[0].imag, 12)))
    return CharacteristicRoots(tuple(clusters))


def characteristic_roots(rec: RecurrenceCoefficients, cluster_tol: float = 1e-6) -> CharacteristicRoots:
    return cluster_roots(companion_roots(rec.a), cluster_tol)


def roots_to_exponents(roots: CharacteristicRoots, h: float, confirm_step: float | None = None,
                       confirm_roots: CharacteristicRoots | None = None, max_alias: int = 8,
                       confirm_tol: float = 1e-3) -> tuple[list[tuple[complex, int]], bool | None]:
    """Invert ``mu = exp(lam h)``.

    Without confirmation the principal branch is used, so ``|Im lam| <= pi/|h|``
    is assumed.  With ``confirm_step`` and the roots fitted at that step, each
    ``lam`` is shifted by the multiple of ``2 pi i / h`` whose prediction
    ``exp(lam h')`` lands on a confirm root.  Returns ``(exponents, resolved)``;
    ``resolved`` is None when no confirmation was attempted.
    """
    if h == 0:
        raise InvalidArgument("step h must be nonzero")
    centers = np.array([mu for mu, _ in roots.clusters], dtype=complex)
    if centers.size and np.any(np.abs(centers) <= 1e-12 * max(1.0, np.abs(centers).max())):
        raise DegenerateRootError("zero characteristic root: no exponent maps to it")
    principal = [(complex(np.log(mu) / h), m) for mu, m in roots.clusters]
    if confirm_step is None:
        return principal, None
    if confirm_roots is None:
        raise InvalidArgument("confirm_step given without the roots fitted at that step")
    targets = np.array([mu for mu, _ in confirm_roots.clusters], dtype=complex)
    ks = sorted(range(-max_alias, max_alias + 1), key=abs)
    out, resolved = [], True
    for lam, m in principal:
        best = None
        for k in ks:
            cand = lam + 2j * np.pi * k / h
            pred = np.exp(cand * confirm_step)
            dist = np.min(np.abs(targets - pred) / np.maximum(np.abs(targets), abs(pred)))
            if best is None or dist < best[0]:
                best = (dist, cand)
        if best is not None and best[0] <= confirm_tol:
            out.append((complex(best[1]), m))
        else:
            resolved = False
            out.append((lam, m))
    return out, resolved


@dataclass
class CoefficientFit:
    model: ExpPoly
    condition: float
    ill_conditioned: bool


def fit_polynomial_coefficients(xs, values, exponents) -> CoefficientFit:
    """Least squares for ``c_{k,j}`` in ``sum_k sum_{j<m_k} c_{k,j} x^j exp(lam_k x)``."""
    xs = np.asarray(xs, dtype=float).reshape(-1)
    values = np.asarray(values, dtype=complex).reshape(-1)
    total = sum(m for _, m in exponents)
    if len(xs) < total + 2:
        raise InvalidArgument(f"need at least {total + 2} samples, got {len(xs)}")
    cols = [xs ** j * np.exp(lam * xs) for lam, m in exponents for j in range(m)]
    if not cols:
        return CoefficientFit(ExpPoly.zero(1), 1.0, False)
    design = np.stack(cols, axis=1)
    norms = np.linalg.norm(design, axis=0)
    norms = np.where(norms > 0, norms, 1.0)
    scaled = design / norms
    s = np.linalg.svd(scaled, compute_uv=False)
    condition = float(s[0] / s[-1]) if s[-1] > 0 else math.inf
    sol, *_ = np.linalg.lstsq(scaled, values, rcond=None)
    sol = sol / norms
    pairs, pos = [], 0
    for lam, m in exponents:
        pairs.append((list(sol[pos:pos + m]), lam))
        pos += m
    ill = condition > CONDITION_LIMIT
    if ill:
        warnings.warn(f"coefficient design condition {condition:.3g} exceeds {CONDITION_LIMIT:g}",
                      ConditioningWarning, stacklevel=2)
    return CoefficientFit(ExpPoly.from_1d(pairs), condition, ill)


@dataclass
class RecoveryConfig:
    step: float | None = None           # 0.5 for closed-form oracles, inferred for samples
    confirm: bool = True
    confirm_step: float | None = None   # step * golden ratio; samples need an explicit value
    cluster_tol: float = 1e-6
    cluster_ladder: tuple[float, ...] = (1e-5, 1e-4, 1e-3, 1e-2)
    accept_tol: float = 1e-6
    holdout_fraction: float = 0.2
    num_samples: int = 50
    sample_span: tuple[float, float] = (-2.0, 2.0)
    window_span: tuple[float, float] = (-1.0, 1.0)
    seed: int = 42
    grid: TestGrid | None = None
    max_alias: int = 8


@dataclass
class RecoveredExpPoly1D:
    model: ExpPoly
    fit_residual: float
    aliasing_resolved: bool
    order: int
    step: float
    exponents: list[tuple[complex, int]] = field(default_factory=list)
    condition: float = 1.0


@dataclass
class NotExponentialPolynomial:
    stage: str
    detail: str
    order: int | None = None


def infer_step(points) -> float:
    """Most frequent gap between consecutive sorted sample abscissae (ties: smallest)."""
    x = np.unique(np.asarray(points, dtype=float).reshape(-1))
    if len(x) < 2:
        raise InvalidArgument("need at least two distinct sample points")
    gaps = np.round(np.diff(x), 9)
    vals, counts = np.unique(gaps[gaps > 0], return_counts=True)
    return float(vals[np.argmax(counts)])


def _relative_error(model: ExpPoly, xs: np.ndarray, values: np.ndarray) -> float:
    scale = np.abs(values).max(initial=0.0)
    err = np.abs(model(xs[:, None]) - values).max(initial=0.0) if len(xs) else 0.0
    if scale == 0:
        return float(err)
    return float(err / scale)


class _Plan:
    """Where the pipeline samples ``f``: recurrence windows plus a train/held-out split."""

    def __init__(self, f: FunctionOracle, config: RecoveryConfig):
        rng = np.random.default_rng(config.seed)
        self.sampled = isinstance(f, SampledOracle)
        if self.sampled:
            self.h = config.step if config.step is not None else infer_step(f.points)
            self.h_confirm = config.confirm_step if config.confirm else None
            self.grid = config.grid or lattice_grid(f, [self.h], seed=config.seed)
            xs = f.points[:, 0].copy()
            values = f.values.copy()
        else:
            self.h = config.step if config.step is not None else DEFAULT_STEP
            self.h_confirm = None
            if config.confirm:
                self.h_confirm = config.confirm_step if config.confirm_step is not None else self.h * GOLDEN
            self.grid = config.grid or default_grid(1, seed=config.seed)
            xs = rng.uniform(*config.sample_span, config.num_samples)
            values = f.evaluate_many(xs[:, None])
            self.window_pool = rng.uniform(*config.window_span, 200)
        order = rng.permutation(len(xs))
        n_hold = int(round(config.holdout_fraction * len(xs)))
        self.hold_x, self.hold_v = xs[order[:n_hold]], values[order[:n_hold]]
        self.train_x, self.train_v = xs[order[n_hold:]], values[order[n_hold:]]
        self.f = f

    def bases(self, n: int, h: float) -> np.ndarray:
        if self.sampled:
            pts = self.f.points
            ok = np.ones(len(pts), dtype=bool)
            for k in range(1, n + 1):
                ok &= self.f.contains(pts + k * h)
            return pts[ok, 0]
        return self.window_pool[:4 * n + 8]


def _attempt(plan: _Plan, n: int, config: RecoveryConfig):
    try:
        rec = fit_recurrence(plan.f, n, plan.h, plan.bases(n, plan.h))
    except (DegenerateOrderError, InvalidArgument) as exc:
        return NotExponentialPolynomial("recurrence", str(exc), n)
    raw = companion_roots(rec.a)
    raw_confirm = None
    if plan.h_confirm is not None:
        try:
            rec_c = fit_recurrence(plan.f, n, plan.h_confirm, plan.bases(n, plan.h_confirm))
            raw_confirm = companion_roots(rec_c.a)
        except (DegenerateOrderError, InvalidArgument):
            raw_confirm = None

    candidates, seen = [], set()
    failure = None
    for tol in (config.cluster_tol,) + tuple(t for t in config.cluster_ladder if t > config.cluster_tol):
        roots = cluster_roots(raw, tol)
        key = tuple(m for _, m in roots.clusters)
        if key in seen:
            continue
        seen.add(key)
        try:
            if raw_confirm is not None:
                exps, resolved = roots_to_exponents(
                    roots, plan.h, plan.h_confirm, cluster_roots(raw_confirm, tol), config.max_alias)
            else:
                exps, resolved = roots_to_exponents(roots, plan.h)
                resolved = False
        except DegenerateRootError as exc:
            failure = NotExponentialPolynomial("roots", str(exc), n)
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConditioningWarning)
            fit = fit_polynomial_coefficients(plan.train_x, plan.train_v, exps)
        resid = _relative_error(fit.model, plan.hold_x, plan.hold_v)
        candidates.append((len(roots.clusters), resid, fit, exps, bool(resolved)))

    passing = [c for c in candidates if c[1] <= config.accept_tol]
    if not passing:
        if failure is not None and not candidates:
            return failure
        best = min((c[1] for c in candidates), default=math.inf)
        return NotExponentialPolynomial(
            "validation", f"held-out relative error {best:.3g} > {config.accept_tol:g}", n)
    nclust, resid, fit, exps, resolved = min(passing, key=lambda c: (c[0], c[1]))
    return RecoveredExpPoly1D(fit.model, resid, resolved, n, plan.h, exps, fit.condition)


def recover_1d(f: FunctionOracle, n_max: int = 8, config: RecoveryConfig | None = None):
    """Recover ``f`` as a one-variable ExpPoly, or explain which stage failed.

    Orders above the Hankel estimate are tried in turn when validation fails,
    since the estimate can undershoot but never overshoot for true
    exponential polynomials.
    """
    _as_1d_oracle(f)
    if n_max < 1:
        raise InvalidArgument("n_max must be >= 1")
    config = config or RecoveryConfig()
    plan = _Plan(f, config)
    n0 = estimate_order(f, n_max, plan.grid)
    if n0 is None:
        return NotExponentialPolynomial(
            "order", f"Popoviciu determinant does not vanish for any n <= {n_max}")
    if n0 == 0:
        resid = _relative_error(ExpPoly.zero(1), plan.hold_x, plan.hold_v)
        if resid <= config.accept_tol:
            return RecoveredExpPoly1D(ExpPoly.zero(1), resid, True, 0, plan.h)
        return NotExponentialPolynomial("validation", "nonzero values off the order-0 grid", 0)
    first_failure = None
    for n in range(n0, n_max + 1):
        result = _attempt(plan, n, config)
        if isinstance(result, RecoveredExpPoly1D):
            return result
        first_failure = first_failure or result
    return first_failure
