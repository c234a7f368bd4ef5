"""Hankel windows of shifted samples and the Popoviciu determinant test.

A window at base point ``x`` with step ``h`` and order ``n`` is the
``(n+1) x (n+1)`` matrix with entries ``f(x + (i+j) h)``.  The Popoviciu
equation asks for its determinant to vanish for every ``x`` and ``h``; here
it is checked on a finite grid with a scale-free zero test: each row is
divided by its sup-norm before taking the determinant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, InvalidInput
from .oracle import FunctionOracle, SampledOracle

DEFAULT_TOL = 1e-8
DEFAULT_SEED = 42
MIN_STEP_NORM = 1e-3


@dataclass(frozen=True)
class HankelWindow:
    x: np.ndarray
    h: np.ndarray
    n: int
    entries: np.ndarray

    @property
    def samples(self) -> np.ndarray:
        """The ``2n+1`` values ``f(x + k h)`` the window was built from."""
        return np.concatenate([self.entries[0], self.entries[1:, -1]])


@dataclass(frozen=True)
class DeterminantReport:
    raw_det: complex
    row_scaled_det_magnitude: float
    vanishing: bool

    @property
    def verdict(self) -> str:
        return "vanishing" if self.vanishing else "non-vanishing"


def _hankel_index(n: int) -> np.ndarray:
    i = np.arange(n + 1)
    return i[:, None] + i[None, :]


def _window_values(f: FunctionOracle, xs: np.ndarray, hs: np.ndarray, n: int) -> np.ndarray:
    """Values ``f(x_p + k h_p)`` for k = 0..2n, shape ``(P, 2n+1)``, one oracle batch."""
    k = np.arange(2 * n + 1)
    pts = xs[:, None, :] + k[None, :, None] * hs[:, None, :]
    return f.evaluate_many(pts.reshape(-1, f.dim)).reshape(len(xs), 2 * n + 1)


def _determinants(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Raw determinants and row-sup-scaled determinant magnitudes of a stack."""
    if not np.all(np.isfinite(mats)):
        raise InvalidInput("Hankel window has non-finite entries")
    size = mats.shape[-1]
    peak = np.abs(mats).max(axis=(1, 2))
    safe_peak = np.where(peak > 0, peak, 1.0)
    # global rescale keeps LU away from overflow; the verdict is scale-free
    sign, logabs = np.linalg.slogdet(mats / safe_peak[:, None, None])
    with np.errstate(over="ignore", under="ignore"):
        raw = sign * np.exp(logabs + size * np.log(safe_peak))
    raw = np.where(peak > 0, raw, 0)

    rows = np.abs(mats).max(axis=2)
    zero_row = np.any(rows == 0, axis=1)
    scaled = mats / np.where(rows > 0, rows, 1.0)[:, :, None]
    mags = np.abs(np.linalg.det(scaled))
    mags = np.where(zero_row, 0.0, mags)
    return raw.astype(complex), mags


def build_hankel(f: FunctionOracle, x, h, n: int) -> HankelWindow:
    if n < 0:
        raise InvalidArgument("order n must be non-negative")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h = np.atleast_1d(np.asarray(h, dtype=float))
    if x.shape != (f.dim,) or h.shape != (f.dim,):
        raise InvalidArgument(f"x and h must have length {f.dim}")
    vals = _window_values(f, x[None, :], h[None, :], n)[0]
    return HankelWindow(x, h, n, vals[_hankel_index(n)])


def determinant_report(w: HankelWindow, tol: float = DEFAULT_TOL) -> DeterminantReport:
    if not tol > 0:
        raise InvalidArgument("tol must be positive")
    raw, mags = _determinants(w.entries[None, :, :])
    return DeterminantReport(complex(raw[0]), float(mags[0]), bool(mags[0] <= tol))


@dataclass
class TestGrid:
    """Product grid of base points and steps standing in for "all x, h"."""

    __test__ = False

    base_points: np.ndarray
    steps: np.ndarray
    seed: int = DEFAULT_SEED
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        self.base_points = np.atleast_2d(np.asarray(self.base_points, dtype=float))
        self.steps = np.atleast_2d(np.asarray(self.steps, dtype=float))
        if self.base_points.shape[1] != self.steps.shape[1]:
            raise InvalidArgument("base points and steps differ in dimension")
        if not self.tol > 0:
            raise InvalidArgument("tol must be positive")

    @property
    def dim(self) -> int:
        return self.base_points.shape[1]

    def pairs(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        xs = np.repeat(self.base_points, len(self.steps), axis=0)
        hs = np.tile(self.steps, (len(self.base_points), 1))
        return xs, hs


def default_grid(dim: int, size: int = 12, seed: int = DEFAULT_SEED,
                 tol: float = DEFAULT_TOL, radius: float = 1.0) -> TestGrid:
    """``size`` base points and ``size`` steps uniform in ``[-radius, radius]^dim``.

    Steps shorter than 1e-3 are redrawn.
    """
    rng = np.random.default_rng(seed)
    base = rng.uniform(-radius, radius, (size, dim))
    steps = []
    while len(steps) < size:
        s = rng.uniform(-radius, radius, dim)
        if np.linalg.norm(s) >= MIN_STEP_NORM:
            steps.append(s)
    return TestGrid(base, np.array(steps), seed, tol)


@dataclass
class LatticeGrid(TestGrid):
    """Windows on a sample table: base points are stored samples ``x`` with
    every ``x + k h`` (k <= 2n) also stored, for a fixed step ``h``."""

    oracle: SampledOracle = None
    max_pairs: int = 144

    def pairs(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        pts = self.oracle.points
        xs_list, hs_list = [], []
        for step in self.steps:
            ok_step = np.ones(len(pts), dtype=bool)
            for k in range(1, 2 * n + 1):
                ok_step &= self.oracle.contains(pts + k * step)
            xs_list.append(pts[ok_step])
            hs_list.append(np.repeat(step[None, :], ok_step.sum(), axis=0))
        xs = np.concatenate(xs_list)
        hs = np.concatenate(hs_list)
        if len(xs) > self.max_pairs:
            keep = np.sort(np.random.default_rng(self.seed).choice(len(xs), self.max_pairs, replace=False))
            xs, hs = xs[keep], hs[keep]
        return xs, hs


def lattice_grid(oracle: SampledOracle, steps, seed: int = DEFAULT_SEED,
                 tol: float = DEFAULT_TOL, max_pairs: int = 144) -> LatticeGrid:
    steps = np.atleast_2d(np.asarray(steps, dtype=float))
    if steps.shape[1] != oracle.dim:
        steps = steps.reshape(-1, oracle.dim)
    return LatticeGrid(oracle.points[:1], steps, seed, tol, oracle=oracle, max_pairs=max_pairs)


@dataclass
class PopoviciuReport:
    passed: bool
    n: int
    worst_window: HankelWindow | None
    worst_magnitude: float
    worst_raw_det: complex
    magnitudes: np.ndarray = field(repr=False)


def popoviciu_test(f: FunctionOracle, n: int, grid: TestGrid) -> PopoviciuReport:
    """Pass iff every grid window has row-scaled determinant magnitude <= grid.tol."""
    if n < 0:
        raise InvalidArgument("order n must be non-negative")
    if grid.dim != f.dim:
        raise InvalidArgument(f"grid dimension {grid.dim} != oracle dimension {f.dim}")
    xs, hs = grid.pairs(n)
    if len(xs) == 0:
        raise InvalidInput(f"grid has no complete windows at order {n}")
    vals = _window_values(f, xs, hs, n)
    mats = vals[:, _hankel_index(n)]
    raw, mags = _determinants(mats)
    worst = int(np.argmax(mags))
    window = HankelWindow(xs[worst], hs[worst], n, mats[worst])
    return PopoviciuReport(
        passed=bool(np.all(mags <= grid.tol)),
        n=n,
        worst_window=window,
        worst_magnitude=float(mags[worst]),
        worst_raw_det=complex(raw[worst]),
        magnitudes=mags,
    )


def estimate_order(f: FunctionOracle, n_max: int, grid: TestGrid) -> int | None:
    """Smallest ``n <= n_max`` passing the Popoviciu test, or ``None``."""
    if n_max < 0:
        raise InvalidArgument("n_max must be non-negative")
    for n in range(n_max + 1):
        if len(grid.pairs(n)[0]) == 0:
            return None
        if popoviciu_test(f, n, grid).passed:
            return n
    return None


def numerical_rank(m, rel_tol: float = DEFAULT_TOL) -> int:
    """Number of singular values above ``rel_tol`` times the largest one."""
    if not rel_tol > 0:
        raise InvalidArgument("rel_tol must be positive")
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        return 0
    if not np.all(np.isfinite(m)):
        raise InvalidInput("matrix has non-finite entries")
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))
