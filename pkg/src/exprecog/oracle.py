"""Uniform point-evaluation interface over symbolic forms and sample tables."""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.spatial import cKDTree

from .errors import InvalidArgument, OracleDomainError
from .exppoly import ExpPoly, RonkinForm, _as_points, _as_vector

PROVENANCES = ("closed-form", "sampled-data", "exppoly", "ronkin", "line-restriction", "callable")


class FunctionOracle:
    """A function R^dim -> C with a vectorized evaluation path.

    ``func`` receives an ``(m, dim)`` float array and returns ``m`` complex
    values.  ``exppoly`` is set when an exact symbolic form is known.
    """

    def __init__(self, dim: int, func: Callable[[np.ndarray], np.ndarray],
                 provenance: str = "callable", exppoly: ExpPoly | None = None):
        if dim < 1:
            raise InvalidArgument("dim must be positive")
        if provenance not in PROVENANCES:
            raise InvalidArgument(f"unknown provenance {provenance!r}")
        self.dim = dim
        self._func = func
        self.provenance = provenance
        self.exppoly = exppoly

    @classmethod
    def from_exppoly(cls, p: ExpPoly) -> FunctionOracle:
        return cls(p.dim, p.evaluate, "exppoly", exppoly=p)

    @classmethod
    def from_ronkin(cls, r: RonkinForm) -> FunctionOracle:
        return cls(r.dim, r.evaluate, "ronkin")

    @classmethod
    def from_callable(cls, dim: int, f: Callable, vectorized: bool = False) -> FunctionOracle:
        """Wrap a plain Python function.

        Non-vectorized functions are called once per point with a length-``dim``
        array (or a float when ``dim == 1``).
        """
        if vectorized:
            return cls(dim, lambda pts: np.asarray(f(pts), dtype=complex))

        def loop(pts):
            args = pts[:, 0] if dim == 1 else pts
            return np.array([f(a) for a in args], dtype=complex)
        return cls(dim, loop)

    def evaluate_many(self, points) -> np.ndarray:
        pts, _ = _as_points(points, self.dim)
        out = np.asarray(self._func(pts), dtype=complex).reshape(pts.shape[0])
        return out

    def __call__(self, x) -> complex:
        return complex(self.evaluate_many(_as_vector(x, self.dim, "x"))[0])


class SampledOracle(FunctionOracle):
    """Lookup oracle over a finite sample table; off-table queries raise.

    A query matches a stored point when every coordinate agrees within
    ``match_tol * max(1, |coordinate|)``.
    """

    def __init__(self, points, values, match_tol: float = 1e-9):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        vals = np.asarray(values, dtype=complex).reshape(-1)
        if pts.shape[0] != vals.shape[0]:
            raise InvalidArgument("points and values differ in length")
        self.points = pts
        self.values = vals
        self.match_tol = match_tol
        self._tree = cKDTree(pts)
        super().__init__(pts.shape[1], self._lookup, "sampled-data")

    def _lookup(self, pts: np.ndarray) -> np.ndarray:
        dist, idx = self._tree.query(pts, p=np.inf)
        bound = self.match_tol * np.maximum(1.0, np.abs(pts).max(axis=1))
        bad = np.nonzero(~(dist <= bound))[0]
        if bad.size:
            raise OracleDomainError(pts[bad[0]])
        return self.values[idx]

    def contains(self, pts) -> np.ndarray:
        """Boolean mask: which query points have a stored sample."""
        pts, _ = _as_points(pts, self.dim)
        dist, _ = self._tree.query(pts, p=np.inf)
        return dist <= self.match_tol * np.maximum(1.0, np.abs(pts).max(axis=1))


class CountingOracle(FunctionOracle):
    """Wraps another oracle and counts evaluated points."""

    def __init__(self, inner: FunctionOracle):
        self.inner = inner
        self.calls = 0

        def counted(pts):
            self.calls += pts.shape[0]
            return inner.evaluate_many(pts)
        super().__init__(inner.dim, counted, inner.provenance, inner.exppoly)


def line_restriction(f: FunctionOracle, x0, h0) -> FunctionOracle:
    """The one-variable oracle ``t -> f(x0 + t*h0)``.

    When ``f`` carries an exact ExpPoly the result does too, with exponents
    ``lam . h0``.
    """
    x0 = _as_vector(x0, f.dim, "x0")
    h0 = _as_vector(h0, f.dim, "h0")
    if not np.any(h0):
        raise InvalidArgument("line direction h0 must be nonzero")

    def restricted(t: np.ndarray) -> np.ndarray:
        return f.evaluate_many(x0[None, :] + t[:, :1] * h0[None, :])

    symbolic = f.exppoly.restrict_to_line(x0, h0) if f.exppoly is not None else None
    return FunctionOracle(1, restricted, "line-restriction", exppoly=symbolic)
