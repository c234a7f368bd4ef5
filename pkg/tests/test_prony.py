import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import rel_close
from exprecog.errors import DegenerateOrderError, InvalidArgument
from exprecog.exppoly import ExpPoly, translation_space_dimension
from exprecog.fixtures import fixture_set
from exprecog.oracle import FunctionOracle, SampledOracle
from exprecog.prony import (CharacteristicRoots, NotExponentialPolynomial, RecoveredExpPoly1D,
                            RecoveryConfig, RecurrenceCoefficients, characteristic_roots,
                            cluster_roots, companion_roots, fit_polynomial_coefficients,
                            fit_recurrence, recover_1d, roots_to_exponents, verify_recurrence)

E = math.e
LN2 = math.log(2)
XS = np.linspace(-1, 1, 9)


def closed(f):
    return FunctionOracle.from_callable(1, f)


def two_pow():
    return closed(lambda t: 3 * 2**t + 1)


def test_fit_recurrence_examples():
    assert np.allclose(fit_recurrence(closed(math.exp), 1, 1.0, XS).a, [-E, 1])
    assert np.allclose(fit_recurrence(two_pow(), 2, 1.0, XS).a, [2, -3, 1])
    assert np.allclose(fit_recurrence(closed(lambda t: t), 2, 0.37, XS).a, [1, -2, 1])


def test_fit_recurrence_rank_deficiency():
    with pytest.raises(DegenerateOrderError) as info:
        fit_recurrence(closed(math.exp), 3, 0.5, XS)
    assert info.value.requested == 3


def test_recurrence_normalization_enforced():
    with pytest.raises(InvalidArgument):
        RecurrenceCoefficients(1.0, 1, np.array([1.0, 2.0]), 1.0)


def test_verify_recurrence_examples():
    grid = np.arange(-2, 3.0)
    ok = verify_recurrence(closed(math.exp), RecurrenceCoefficients(1.0, 1, [-E, 1], 1.0), grid)
    assert ok.passed
    sq = closed(lambda t: t * t)
    bad = verify_recurrence(sq, RecurrenceCoefficients(1.0, 2, [1, -2, 1], 1.0), grid)
    assert not bad.passed
    assert verify_recurrence(sq, RecurrenceCoefficients(1.0, 3, [-1, 3, -3, 1], 1.0), grid).passed


def _rec(a):
    return RecurrenceCoefficients(1.0, len(a) - 1, np.array(a, dtype=complex), 1.0)


def test_characteristic_roots_examples():
    (mu, m), = characteristic_roots(_rec([-E, 1])).clusters
    assert mu == pytest.approx(E) and m == 1
    c = characteristic_roots(_rec([2, -3, 1])).clusters
    assert [m for _, m in c] == [1, 1] and np.allclose([mu for mu, _ in c], [1, 2])
    # the double root splits by ~sqrt(machine eps); a looser tolerance merges it
    (mu, m), = characteristic_roots(_rec([1, -2, 1]), cluster_tol=1e-6).clusters
    assert mu == pytest.approx(1) and m == 2


@settings(max_examples=1000)
@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=8),
       st.sampled_from([1e-8, 1e-6, 1e-3]))
def test_multiplicities_sum_to_order(a, tol):
    assert characteristic_roots(_rec(a + [1]), tol).n == len(a)


def test_roots_to_exponents_examples():
    exps, resolved = roots_to_exponents(CharacteristicRoots(((E, 1),)), 1.0)
    assert exps[0][0] == pytest.approx(1.0) and resolved is None
    exps, _ = roots_to_exponents(CharacteristicRoots(((1.0, 2),)), 1.0)
    assert exps == [(0j, 2)]
    exps, _ = roots_to_exponents(CharacteristicRoots(((-1.0 + 0j, 1),)), 1.0)
    assert exps[0][0] == pytest.approx(1j * math.pi)


@pytest.mark.parametrize("h", [1.0, 1.5, 2.5])
def test_confirm_step_resolves_aliasing(h):
    lam, h2 = 3j, h * (1 + math.sqrt(5)) / 2
    roots = CharacteristicRoots(((np.exp(lam * h), 1),))
    plain, _ = roots_to_exponents(roots, h)
    if 3 * h > math.pi:  # principal branch lands on the alias
        assert abs(plain[0][0].imag - 3) > 1
    confirm = CharacteristicRoots(((np.exp(lam * h2), 1),))
    exps, resolved = roots_to_exponents(roots, h, h2, confirm)
    assert resolved and abs(exps[0][0].imag - 3) <= 1e-6


def test_fit_coefficients_examples():
    x = np.arange(6.0)
    fit = fit_polynomial_coefficients(x, np.exp(x), [(1.0, 1)])
    assert fit.model.terms[0][0].coeffs_1d()[0] == pytest.approx(1.0)
    fit = fit_polynomial_coefficients(x, 3 * 2**x + 1, [(LN2, 1), (0.0, 1)])
    got = {round(lam[0].real, 6): poly.coeffs_1d()[0] for poly, lam in fit.model.terms}
    assert got[round(LN2, 6)] == pytest.approx(3) and got[0.0] == pytest.approx(1)
    fit = fit_polynomial_coefficients(x, x * np.exp(x), [(1.0, 2)])
    assert np.allclose(fit.model.terms[0][0].coeffs_1d(), [0, 1], atol=1e-10)


def test_recover_examples():
    r = recover_1d(two_pow(), 5)
    assert isinstance(r, RecoveredExpPoly1D) and r.fit_residual <= 1e-8
    lams = sorted(round(l.real, 8) for l, _ in r.exponents)
    assert lams == [0.0, round(LN2, 8)]
    r = recover_1d(closed(lambda t: math.exp(t * t)), 4)
    assert isinstance(r, NotExponentialPolynomial) and r.stage == "order"
    r = recover_1d(closed(lambda t: 0.0))
    assert isinstance(r, RecoveredExpPoly1D) and r.model.terms == ()


def test_recover_multiplicity():
    r = recover_1d(closed(lambda t: t * t * math.exp(t)), 6)
    assert isinstance(r, RecoveredExpPoly1D)
    assert len(r.exponents) == 1 and r.exponents[0][1] == 3
    assert r.exponents[0][0] == pytest.approx(1.0, abs=1e-6)


def test_recover_complex_exponents_from_samples():
    h, h2 = 0.5, 0.5 * (1 + math.sqrt(5)) / 2
    x = np.unique(np.round(np.concatenate([np.arange(-12, 13) * h, np.arange(-8, 9) * h2]), 12))
    s = SampledOracle(x, np.cos(3 * x))
    r = recover_1d(s, 4, RecoveryConfig(step=h, confirm_step=h2))
    assert isinstance(r, RecoveredExpPoly1D) and r.aliasing_resolved
    assert sorted(round(l.imag, 6) for l, _ in r.exponents) == [-3.0, 3.0]


def test_recover_aliased_frequency_from_samples():
    # step 1.5 puts 3i outside the principal strip |Im| < pi/h
    h, h2 = 1.5, 1.5 * (1 + math.sqrt(5)) / 2
    x = np.unique(np.round(np.concatenate([np.arange(-10, 11) * h, np.arange(-7, 8) * h2]), 12))
    s = SampledOracle(x, np.cos(3 * x))
    r = recover_1d(s, 4, RecoveryConfig(step=h, confirm_step=h2))
    assert isinstance(r, RecoveredExpPoly1D) and r.aliasing_resolved
    assert sorted(round(l.imag, 6) for l, _ in r.exponents) == [-3.0, 3.0]


def test_round_trip_fixtures():
    fixtures = fixture_set(100, seed=11, dims=(1,), im_bound=2.0)
    rng = np.random.default_rng(0)
    for p, n in fixtures:
        r = recover_1d(FunctionOracle.from_exppoly(p), 8)
        assert isinstance(r, RecoveredExpPoly1D), (p, r)
        x = rng.uniform(-2, 2, (50, 1))
        assert rel_close(r.model(x), p(x), 1e-6)


def test_fitted_recurrence_verifies_on_fixtures():
    for p, n in fixture_set(30, seed=3, dims=(1,)):
        f = FunctionOracle.from_exppoly(p)
        rec = fit_recurrence(f, n, 0.5, np.linspace(-1, 1, 4 * n + 8))
        assert verify_recurrence(f, rec, np.linspace(-3, 3, 41)).passed


def test_shift_consistency():
    rng = np.random.default_rng(1)
    for p, _ in fixture_set(20, seed=5, dims=(1,), im_bound=2.0):
        a = recover_1d(FunctionOracle.from_exppoly(p))
        b = recover_1d(FunctionOracle.from_exppoly(p.shift([1.0])))
        x = rng.uniform(-2, 2, (50, 1))
        assert rel_close(b.model(x), a.model.shift([1.0])(x), 1e-6)


def test_companion_matches_numpy_roots():
    a = np.array([2.0, -1.0, 0.5, 1.0])
    assert np.allclose(np.sort_complex(companion_roots(a)), np.sort_complex(np.roots(a[::-1])))
    c = cluster_roots([1.0, 1.0 + 1e-9, 2.0], 1e-6)
    assert [m for _, m in c.clusters] == [2, 1]
