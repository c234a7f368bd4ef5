import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import exppolys
from exprecog.errors import InvalidInput, OracleDomainError
from exprecog.exppoly import ExpPoly, MultivariatePolynomial as MP, translation_space_dimension
from exprecog.hankel import (TestGrid, build_hankel, default_grid, determinant_report, estimate_order,
                             lattice_grid, numerical_rank, popoviciu_test)
from exprecog.oracle import CountingOracle, FunctionOracle, SampledOracle

E = math.e


def closed(dim, f):
    return FunctionOracle.from_callable(dim, f)


exp_x = closed(1, math.exp)
ident = closed(1, lambda t: t)
gauss = closed(1, lambda t: math.exp(t * t))


def test_build_hankel_entries():
    assert np.allclose(build_hankel(exp_x, 0.0, 1.0, 1).entries, [[1, E], [E, E * E]])
    assert np.allclose(build_hankel(ident, 0.0, 1.0, 1).entries, [[0, 1], [1, 2]])
    w = build_hankel(exp_x, 0.4, 0.3, 0)
    assert w.entries.shape == (1, 1) and w.entries[0, 0] == pytest.approx(math.exp(0.4))


@pytest.mark.parametrize("n", [0, 1, 3, 5])
def test_build_hankel_uses_2n_plus_1_evaluations(n):
    f = CountingOracle(exp_x)
    build_hankel(f, 0.1, 0.2, n)
    assert f.calls == 2 * n + 1


def test_determinant_reports():
    r = determinant_report(build_hankel(exp_x, 0.0, 1.0, 1))
    assert abs(r.raw_det) <= 1e-12 and r.verdict == "vanishing"
    r = determinant_report(build_hankel(ident, 0.0, 1.0, 1))
    assert r.raw_det == pytest.approx(-1.0) and r.verdict == "non-vanishing"
    r = determinant_report(build_hankel(gauss, 0.0, 1.0, 1))
    assert r.raw_det.real == pytest.approx(E**4 - E**2, rel=1e-12)
    assert r.verdict == "non-vanishing"


def test_non_finite_window_is_input_error():
    with pytest.raises(InvalidInput):
        determinant_report(build_hankel(closed(1, lambda t: math.inf), 0.0, 1.0, 1))


def test_popoviciu_examples():
    affine = FunctionOracle.from_exppoly(ExpPoly.polynomial(MP.variable(2, 0) + MP.variable(2, 1)))
    assert popoviciu_test(affine, 2, default_grid(2)).passed
    zero = FunctionOracle.from_exppoly(ExpPoly.zero(1))
    assert all(popoviciu_test(zero, n, default_grid(1)).passed for n in range(4))
    q = closed(2, lambda x: math.exp(x[0] * x[1]))
    grid = TestGrid([[0.0, 0.0]], [[1.0, 1.0]])
    r = popoviciu_test(q, 1, grid)
    assert not r.passed
    scaled = (E**4 - E**2) / (E * E**4)  # rows [1, e], [e, e^4]
    assert r.worst_magnitude == pytest.approx(scaled, rel=1e-12)


def test_estimate_order_examples():
    f = closed(1, lambda t: 3 * 2**t + 1)
    assert estimate_order(f, 5, default_grid(1)) == 2
    assert estimate_order(closed(1, lambda t: 7.0), 5, default_grid(1)) == 1
    assert estimate_order(gauss, 4, default_grid(1)) is None


def test_numerical_rank_examples():
    assert numerical_rank(np.eye(3)) == 3
    assert numerical_rank(np.zeros((3, 3))) == 0
    rng = np.random.default_rng(5)
    u, v = rng.normal(size=4), rng.normal(size=4)
    s = np.linalg.svd(np.outer(u, v), compute_uv=False)
    assert s[1] / s[0] < 1e-8
    assert numerical_rank(np.outer(u, v)) == 1


@given(exppolys(max_dimension=5))
def test_popoviciu_vanishes_at_translation_dimension(p):
    n = translation_space_dimension(p)
    r = popoviciu_test(FunctionOracle.from_exppoly(p), n, default_grid(p.dim))
    assert r.passed and r.magnitudes.max() <= 1e-8


@given(exppolys(max_dimension=4))
def test_popoviciu_fails_below_translation_dimension(p):
    n = translation_space_dimension(p)
    r = popoviciu_test(FunctionOracle.from_exppoly(p), n - 1, default_grid(p.dim))
    if r.passed:
        return  # degenerate sample: every window vanishes already at n - 1
    assert r.worst_magnitude > 1e-8


@given(exppolys(max_dimension=4), st.floats(0.01, 100), st.floats(0, 2 * math.pi))
def test_row_scaled_magnitude_is_scale_invariant(p, c, phase):
    c = c * np.exp(1j * phase)
    f = FunctionOracle.from_exppoly(p)
    g = FunctionOracle.from_exppoly(p.scale(c))
    x, h = np.full(p.dim, 0.3), np.full(p.dim, 0.45)
    for n in range(translation_space_dimension(p) + 1):
        a = determinant_report(build_hankel(f, x, h, n))
        b = determinant_report(build_hankel(g, x, h, n))
        assert a.verdict == b.verdict
        assert abs(a.row_scaled_det_magnitude - b.row_scaled_det_magnitude) <= 1e-12


def test_estimate_order_never_exceeds_translation_dimension():
    from exprecog.fixtures import fixture_set
    for p, n in fixture_set(50, seed=7):
        k = estimate_order(FunctionOracle.from_exppoly(p), 8, default_grid(p.dim))
        assert k is not None and k <= n


def test_default_grid_is_seeded_and_bounded():
    a, b = default_grid(2, seed=3), default_grid(2, seed=3)
    assert np.array_equal(a.base_points, b.base_points) and np.array_equal(a.steps, b.steps)
    assert np.abs(a.base_points).max() <= 1 and np.abs(a.steps).max() <= 1
    assert np.linalg.norm(a.steps, axis=1).min() >= 1e-3


def test_lattice_grid_on_samples():
    x = np.arange(-10, 11) * 0.25
    s = SampledOracle(x, 3 * 2**x + 1)
    grid = lattice_grid(s, [0.25])
    assert estimate_order(s, 5, grid) == 2
    xs, hs = grid.pairs(2)
    assert len(xs) == len(x) - 4
    with pytest.raises(OracleDomainError):
        s(0.1)
