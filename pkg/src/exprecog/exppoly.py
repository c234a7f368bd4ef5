"""Symbolic exponential polynomials and Ronkin forms.

An exponential polynomial in d variables is a finite sum
``sum_k P_k(x) * exp(lam_k . x)`` with polynomial coefficients ``P_k`` and
constant complex exponent vectors ``lam_k``.  A Ronkin form has the same
shape but each exponent is a multilinear polynomial in ``x``.

Everything here is immutable and complex-valued; real inputs are embedded
with zero imaginary part.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidArgument

COEFF_REL_DROP = 1e-14
EXPONENT_MERGE_TOL = 1e-12
RANK_PIVOT_TOL = 1e-10

Index = tuple[int, ...]


def _as_points(x, dim: int) -> tuple[np.ndarray, bool]:
    """Return ``(points of shape (m, dim), was_single_point)``."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    single = arr.ndim == 1
    if single:
        if arr.shape[0] != dim:
            raise InvalidArgument(f"point has length {arr.shape[0]}, expected {dim}")
        return arr.reshape(1, dim), True
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise InvalidArgument(f"points have shape {arr.shape}, expected (m, {dim})")
    return arr, False


def _as_vector(v, dim: int, name: str, dtype=float) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(v, dtype=dtype))
    if arr.shape != (dim,):
        raise InvalidArgument(f"{name} has shape {arr.shape}, expected ({dim},)")
    return arr


def _normalize_terms(terms: Mapping[Index, complex]) -> dict[Index, complex]:
    nonzero = {k: complex(c) for k, c in terms.items() if c != 0}
    if not nonzero:
        return {}
    cutoff = COEFF_REL_DROP * max(abs(c) for c in nonzero.values())
    return {k: c for k, c in sorted(nonzero.items()) if abs(c) >= cutoff}


@dataclass(frozen=True, eq=False)
class MultivariatePolynomial:
    """Polynomial in ``dim`` variables stored as ``{multi-index: coefficient}``."""

    dim: int
    terms: Mapping[Index, complex]

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidArgument("dim must be positive")
        for alpha in self.terms:
            if len(alpha) != self.dim or any(a < 0 for a in alpha):
                raise InvalidArgument(f"bad multi-index {alpha} for dim {self.dim}")
        object.__setattr__(self, "terms", _normalize_terms(self.terms))

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> MultivariatePolynomial:
        return cls(dim, {})

    @classmethod
    def constant(cls, dim: int, c: complex) -> MultivariatePolynomial:
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def variable(cls, dim: int, i: int) -> MultivariatePolynomial:
        """The coordinate function ``x_i`` (0-based ``i``)."""
        alpha = [0] * dim
        alpha[i] = 1
        return cls(dim, {tuple(alpha): 1.0})

    @classmethod
    def from_coeffs_1d(cls, coeffs: Sequence[complex]) -> MultivariatePolynomial:
        """One-variable polynomial from ascending coefficients ``c_0 + c_1 x + ...``."""
        return cls(1, {(j,): c for j, c in enumerate(coeffs)})

    # queries ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(a) for a in self.terms), default=-1)

    def coeffs_1d(self) -> list[complex]:
        if self.dim != 1:
            raise InvalidArgument("coeffs_1d needs a one-variable polynomial")
        out = [0j] * (self.degree + 1)
        for (j,), c in self.terms.items():
            out[j] = c
        return out

    def __call__(self, x):
        pts, single = _as_points(x, self.dim)
        out = np.zeros(pts.shape[0], dtype=complex)
        for alpha, c in self.terms.items():
            out += c * np.prod(pts ** np.asarray(alpha), axis=1)
        return out[0] if single else out

    evaluate = __call__

    # algebra ------------------------------------------------------------
    def _check(self, other: MultivariatePolynomial):
        if other.dim != self.dim:
            raise InvalidArgument(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: MultivariatePolynomial) -> MultivariatePolynomial:
        self._check(other)
        acc = dict(self.terms)
        for k, c in other.terms.items():
            acc[k] = acc.get(k, 0) + c
        return MultivariatePolynomial(self.dim, acc)

    def __neg__(self) -> MultivariatePolynomial:
        return self.scale(-1)

    def __sub__(self, other: MultivariatePolynomial) -> MultivariatePolynomial:
        return self + (-other)

    def __mul__(self, other: MultivariatePolynomial) -> MultivariatePolynomial:
        self._check(other)
        acc: dict[Index, complex] = {}
        for (a, c), (b, d) in itertools.product(self.terms.items(), other.terms.items()):
            k = tuple(i + j for i, j in zip(a, b))
            acc[k] = acc.get(k, 0) + c * d
        return MultivariatePolynomial(self.dim, acc)

    def scale(self, c: complex) -> MultivariatePolynomial:
        return MultivariatePolynomial(self.dim, {k: c * v for k, v in self.terms.items()})

    def shift(self, h) -> MultivariatePolynomial:
        """Return the polynomial ``x -> P(x + h)``."""
        h = _as_vector(h, self.dim, "h")
        acc: dict[Index, complex] = {}
        for alpha, c in self.terms.items():
            ranges = [range(a + 1) for a in alpha]
            for beta in itertools.product(*ranges):
                w = c
                for a, b, hi in zip(alpha, beta, h):
                    w *= comb(a, b) * hi ** (a - b)
                acc[beta] = acc.get(beta, 0) + w
        return MultivariatePolynomial(self.dim, acc)

    def derivative(self, i: int) -> MultivariatePolynomial:
        acc = {}
        for alpha, c in self.terms.items():
            if alpha[i] == 0:
                continue
            beta = list(alpha)
            beta[i] -= 1
            acc[tuple(beta)] = c * alpha[i]
        return MultivariatePolynomial(self.dim, acc)

    def restrict_to_line(self, x0, h0) -> MultivariatePolynomial:
        """One-variable polynomial ``t -> P(x0 + t*h0)``."""
        x0 = _as_vector(x0, self.dim, "x0")
        h0 = _as_vector(h0, self.dim, "h0")
        linear = [
            MultivariatePolynomial.from_coeffs_1d([x0[i], h0[i]]) for i in range(self.dim)
        ]
        one = MultivariatePolynomial.constant(1, 1.0)
        out = MultivariatePolynomial.zero(1)
        for alpha, c in self.terms.items():
            term = one
            for i, a in enumerate(alpha):
                for _ in range(a):
                    term = term * linear[i]
            out = out + term.scale(c)
        return out

    def allclose(self, other: MultivariatePolynomial, rtol=1e-12, atol=0.0) -> bool:
        if other.dim != self.dim:
            return False
        scale = max([abs(c) for c in self.terms.values()] + [abs(c) for c in other.terms.values()] + [0.0])
        for k in set(self.terms) | set(other.terms):
            if abs(self.terms.get(k, 0) - other.terms.get(k, 0)) > rtol * scale + atol:
                return False
        return True

    def __repr__(self):
        return f"MultivariatePolynomial(dim={self.dim}, terms={dict(self.terms)})"


def _elimination_rank(m: np.ndarray, pivot_tol: float = RANK_PIVOT_TOL) -> int:
    """Rank by Gaussian elimination with complete pivoting on row-normalized data."""
    a = np.array(m, dtype=complex)
    if a.size == 0:
        return 0
    norms = np.abs(a).max(axis=1)
    a = a[norms > 0] / norms[norms > 0, None]
    rank = 0
    while a.size:
        i, j = np.unravel_index(np.argmax(np.abs(a)), a.shape)
        if abs(a[i, j]) <= pivot_tol:
            break
        rank += 1
        pivot_row = a[i] / a[i, j]
        a = a - np.outer(a[:, j], pivot_row)
        a = np.delete(np.delete(a, i, axis=0), j, axis=1)
    return rank


def derivative_span_dimension(poly: MultivariatePolynomial) -> int:
    """Dimension of span{d^alpha P : all multi-indices alpha}.

    This equals the dimension of the span of all translates of ``P``.
    """
    if poly.is_zero():
        return 0
    maxdeg = [max(alpha[i] for alpha in poly.terms) for i in range(poly.dim)]
    derivs = []
    for alpha in itertools.product(*(range(m + 1) for m in maxdeg)):
        q = poly
        for i, a in enumerate(alpha):
            for _ in range(a):
                q = q.derivative(i)
        if not q.is_zero():
            derivs.append(q)
    monomials = sorted({k for q in derivs for k in q.terms})
    col = {k: j for j, k in enumerate(monomials)}
    mat = np.zeros((len(derivs), len(monomials)), dtype=complex)
    for r, q in enumerate(derivs):
        for k, c in q.terms.items():
            mat[r, col[k]] = c
    return _elimination_rank(mat)


@dataclass(frozen=True, eq=False)
class ExpPoly:
    """Exponential polynomial ``sum_k P_k(x) exp(lam_k . x)``.

    ``terms`` holds ``(poly, exponent)`` pairs; exponents closer than
    ``EXPONENT_MERGE_TOL`` componentwise are merged and zero polynomials dropped.
    """

    dim: int
    terms: tuple[tuple[MultivariatePolynomial, tuple[complex, ...]], ...] = ()

    def __post_init__(self):
        merged: list[list] = []
        for poly, lam in self.terms:
            if poly.dim != self.dim:
                raise InvalidArgument(f"polynomial dim {poly.dim} != {self.dim}")
            lam = tuple(complex(v) for v in _as_vector(lam, self.dim, "exponent", complex))
            for entry in merged:
                if max(abs(a - b) for a, b in zip(entry[1], lam)) < EXPONENT_MERGE_TOL:
                    entry[0] = entry[0] + poly
                    break
            else:
                merged.append([poly, lam])
        object.__setattr__(
            self, "terms", tuple((p, lam) for p, lam in merged if not p.is_zero())
        )

    @classmethod
    def zero(cls, dim: int) -> ExpPoly:
        return cls(dim, ())

    @classmethod
    def exponential(cls, lam, coeff: complex = 1.0) -> ExpPoly:
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        d = lam.shape[0]
        return cls(d, ((MultivariatePolynomial.constant(d, coeff), tuple(lam)),))

    @classmethod
    def polynomial(cls, poly: MultivariatePolynomial) -> ExpPoly:
        return cls(poly.dim, ((poly, (0j,) * poly.dim),))

    @classmethod
    def from_1d(cls, pairs: Iterable[tuple[Sequence[complex], complex]]) -> ExpPoly:
        """Build a one-variable ExpPoly from ``[(ascending poly coeffs, lam), ...]``."""
        return cls(1, tuple(
            (MultivariatePolynomial.from_coeffs_1d(c), (lam,)) for c, lam in pairs
        ))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def exponents(self) -> list[tuple[complex, ...]]:
        return [lam for _, lam in self.terms]

    def __call__(self, x):
        pts, single = _as_points(x, self.dim)
        out = np.zeros(pts.shape[0], dtype=complex)
        for poly, lam in self.terms:
            out += poly(pts) * np.exp(pts @ np.asarray(lam))
        return out[0] if single else out

    evaluate = __call__

    def _check(self, other: ExpPoly):
        if other.dim != self.dim:
            raise InvalidArgument(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: ExpPoly) -> ExpPoly:
        self._check(other)
        return ExpPoly(self.dim, self.terms + other.terms)

    def __neg__(self) -> ExpPoly:
        return self.scale(-1)

    def __sub__(self, other: ExpPoly) -> ExpPoly:
        return self + (-other)

    def __mul__(self, other: ExpPoly) -> ExpPoly:
        self._check(other)
        terms = []
        for (p, a), (q, b) in itertools.product(self.terms, other.terms):
            terms.append((p * q, tuple(x + y for x, y in zip(a, b))))
        return ExpPoly(self.dim, tuple(terms))

    def scale(self, c: complex) -> ExpPoly:
        return ExpPoly(self.dim, tuple((p.scale(c), lam) for p, lam in self.terms))

    def shift(self, h) -> ExpPoly:
        """Exact ExpPoly for ``x -> p(x + h)``; the exponent set is unchanged."""
        h = _as_vector(h, self.dim, "h")
        return ExpPoly(self.dim, tuple(
            (p.shift(h).scale(np.exp(np.dot(lam, h))), lam) for p, lam in self.terms
        ))

    def restrict_to_line(self, x0, h0) -> ExpPoly:
        """One-variable ExpPoly for ``t -> p(x0 + t*h0)``; exponents become ``lam . h0``."""
        x0 = _as_vector(x0, self.dim, "x0")
        h0 = _as_vector(h0, self.dim, "h0")
        return ExpPoly(1, tuple(
            (p.restrict_to_line(x0, h0).scale(np.exp(np.dot(lam, x0))), (np.dot(lam, h0),))
            for p, lam in self.terms
        ))

    def allclose(self, other: ExpPoly, rtol=1e-12, lam_tol=1e-12) -> bool:
        """Term-by-term comparison after matching exponents."""
        if other.dim != self.dim or len(other.terms) != len(self.terms):
            return False
        unused = list(other.terms)
        for p, lam in self.terms:
            for idx, (q, mu) in enumerate(unused):
                if max(abs(a - b) for a, b in zip(lam, mu)) <= lam_tol:
                    if not p.allclose(q, rtol=rtol):
                        return False
                    del unused[idx]
                    break
            else:
                return False
        return True

    def __repr__(self):
        parts = [f"({dict(p.terms)})*exp({lam})" for p, lam in self.terms]
        return f"ExpPoly(dim={self.dim}: " + " + ".join(parts or ["0"]) + ")"


def evaluate(p: ExpPoly, x):
    return p(x)


def shift(p: ExpPoly, h) -> ExpPoly:
    return p.shift(h)


def add(p: ExpPoly, q: ExpPoly) -> ExpPoly:
    return p + q


def multiply(p: ExpPoly, q: ExpPoly) -> ExpPoly:
    return p * q


def translation_space_dimension(p: ExpPoly) -> int:
    """dim span{tau_h p : h in R^d}.

    Translates never mix distinct exponents, so the dimension splits as a sum
    over exponents of the derivative-span dimension of each polynomial part.
    """
    return sum(derivative_span_dimension(poly) for poly, _ in p.terms)


# --- Ronkin forms -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RonkinExponent:
    """Multilinear exponent ``constant + sum_S c_S prod_{i in S} x_i``.

    Subsets ``S`` are strictly increasing tuples of 0-based variable indices.
    """

    dim: int
    constant: complex = 0j
    coefficients: Mapping[Index, complex] = None

    def __post_init__(self):
        coeffs = {}
        for s, c in (self.coefficients or {}).items():
            s = tuple(s)
            if not s or any(b <= a for a, b in zip(s, s[1:])) or s[0] < 0 or s[-1] >= self.dim:
                raise InvalidArgument(f"invalid variable subset {s} for dim {self.dim}")
            if c != 0:
                coeffs[s] = complex(c)
        object.__setattr__(self, "coefficients", dict(sorted(coeffs.items())))
        object.__setattr__(self, "constant", complex(self.constant))

    @classmethod
    def linear(cls, lam, constant: complex = 0j) -> RonkinExponent:
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        return cls(lam.shape[0], constant, {(i,): c for i, c in enumerate(lam)})

    def total_degree(self) -> int:
        return max((len(s) for s in self.coefficients), default=0)

    def linear_part(self) -> np.ndarray:
        lam = np.zeros(self.dim, dtype=complex)
        for s, c in self.coefficients.items():
            if len(s) == 1:
                lam[s[0]] = c
        return lam

    def __call__(self, x):
        pts, single = _as_points(x, self.dim)
        out = np.full(pts.shape[0], self.constant, dtype=complex)
        for s, c in self.coefficients.items():
            out += c * np.prod(pts[:, list(s)], axis=1)
        return out[0] if single else out

    def __add__(self, other: RonkinExponent) -> RonkinExponent:
        acc = dict(self.coefficients)
        for s, c in other.coefficients.items():
            acc[s] = acc.get(s, 0) + c
        return RonkinExponent(self.dim, self.constant + other.constant, acc)


@dataclass(frozen=True, eq=False)
class RonkinForm:
    """``sum_k P_k(x) exp(lam_k(x))`` with multilinear exponents ``lam_k``."""

    dim: int
    terms: tuple[tuple[MultivariatePolynomial, RonkinExponent], ...] = ()

    def __post_init__(self):
        for p, e in self.terms:
            if p.dim != self.dim or e.dim != self.dim:
                raise InvalidArgument("term dimension mismatch")
        object.__setattr__(self, "terms", tuple(self.terms))

    @classmethod
    def from_exppoly(cls, p: ExpPoly) -> RonkinForm:
        return cls(p.dim, tuple((poly, RonkinExponent.linear(lam)) for poly, lam in p.terms))

    def __call__(self, x):
        pts, single = _as_points(x, self.dim)
        out = np.zeros(pts.shape[0], dtype=complex)
        for poly, e in self.terms:
            out += poly(pts) * np.exp(e(pts))
        return out[0] if single else out

    evaluate = __call__


@dataclass(frozen=True)
class RonkinRejection:
    """A Ronkin form with some exponent of total degree > 1.

    ``witness`` is a direction h0 along which ``t -> f(t*h0)`` carries an
    ``exp(c t^N)`` factor with N > 1, so it is not an exponential polynomial.
    """

    offending_terms: tuple[int, ...]
    degree: int
    monomial: Index
    witness: tuple[float, ...]


def ronkin_total_degrees(r: RonkinForm) -> list[int]:
    return [e.total_degree() for _, e in r.terms]


def ronkin_to_exppoly(r: RonkinForm) -> ExpPoly | RonkinRejection:
    degrees = ronkin_total_degrees(r)
    offending = tuple(k for k, deg in enumerate(degrees) if deg > 1)
    if offending:
        k0 = offending[0]
        exponent = r.terms[k0][1]
        top = degrees[k0]
        # largest coefficient among the top-degree monomials; ties by index order
        monomial = max(
            (s for s in exponent.coefficients if len(s) == top),
            key=lambda s: abs(exponent.coefficients[s]),
        )
        witness = tuple(1.0 if j in monomial else 0.0 for j in range(r.dim))
        return RonkinRejection(offending, top, monomial, witness)
    return ExpPoly(r.dim, tuple(
        (poly.scale(np.exp(e.constant)), tuple(e.linear_part())) for poly, e in r.terms
    ))
