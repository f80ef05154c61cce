import math

import pytest

from hardy_means.errors import BracketInvalid, InsufficientSamples, NonFinite
from hardy_means.numerics import (
    CONVERGED, DIVERGED, Interval, extrapolate_limit, find_root_monotone, integrate_finite,
    integrate_unit_improper,
)


def test_interval_rejects_bad_endpoints():
    with pytest.raises(ValueError):
        Interval(1.0, 1.0)
    with pytest.raises(ValueError):
        Interval(0.0, math.inf)
    assert 0.5 in Interval(0.0, 1.0)


def test_root_of_monotone_function():
    r = find_root_monotone(lambda c: c - c * math.log(c), (2.0, 4.0))
    assert r == pytest.approx(math.e, rel=1e-12)


def test_root_exact_endpoint_and_invalid_bracket():
    assert find_root_monotone(lambda x: x - 1.0, (1.0, 2.0)) == 1.0
    with pytest.raises(BracketInvalid):
        find_root_monotone(lambda x: x * x + 1.0, (-1.0, 1.0))


def test_root_non_finite_function():
    with pytest.raises(NonFinite):
        find_root_monotone(lambda x: math.inf, (0.0, 1.0))


def test_finite_integral():
    assert integrate_finite(lambda t: -math.log(t), 1.0, math.e) == pytest.approx(-1.0, abs=1e-12)
    assert integrate_finite(math.sin, 2.0, 2.0) == 0.0


@pytest.mark.parametrize("fstar, expected", [
    (lambda t: -math.log(t), 1.0),
    (lambda t: t ** -0.5 - 1.0, 1.0),
    (lambda t: t ** -0.9 - 1.0, 9.0),
    (lambda t: (t ** -0.75 - t) / 1.75, 2.0),
])
def test_improper_integral_converges(fstar, expected):
    res = integrate_unit_improper(fstar, 1e-10)
    assert res.status == CONVERGED
    assert res.value == pytest.approx(expected, abs=1e-8)


@pytest.mark.parametrize("fstar", [lambda t: 1.0 / t - 1.0, lambda t: t ** -1.5])
def test_improper_integral_diverges(fstar):
    assert integrate_unit_improper(fstar, 1e-10).status == DIVERGED


def test_extrapolation_recovers_power_law_limit():
    terms = [(n, 2.0 + 3.0 / n ** 0.5) for n in (10 * 2 ** k for k in range(8))]
    est = extrapolate_limit(terms, 1e-10)
    assert est.extrapolated == pytest.approx(2.0, abs=1e-12)
    assert est.fitted_decay_exponent == pytest.approx(0.5, rel=1e-9)
    assert est.converged


def test_extrapolation_needs_four_terms():
    with pytest.raises(InsufficientSamples):
        extrapolate_limit([(1, 1.0), (2, 1.5), (4, 1.75)])


def test_extrapolation_of_growing_sequence_is_not_converged():
    est = extrapolate_limit([(n, math.log(n)) for n in (2 ** k for k in range(1, 8))])
    assert not est.converged


def test_root_examples_and_residual():
    assert find_root_monotone(lambda y: y - 2.0, (0.0, 5.0), 1e-12) == pytest.approx(2.0, abs=1e-12)
    assert find_root_monotone(math.log, (0.5, 3.0)) == pytest.approx(1.0, abs=1e-12)
    r = find_root_monotone(lambda c: 2 * math.sqrt(c) - c, (1.0, 16.0))
    assert 1.0 <= r <= 16.0 and abs(2 * math.sqrt(r) - r) <= 1e-12


@pytest.mark.parametrize("lam", [2.0, 10.0])
def test_improper_integral_scales_linearly(lam):
    tol = 1e-10
    base = integrate_unit_improper(lambda t: t ** -0.5 - 1.0, tol).value
    scaled = integrate_unit_improper(lambda t: lam * (t ** -0.5 - 1.0), tol).value
    assert abs(scaled - lam * base) <= 2 * tol * lam


def test_finite_integral_exact_on_cubics():
    assert integrate_finite(lambda t: 1.0, 0.0, 3.0) == pytest.approx(3.0, abs=1e-12)
    assert integrate_finite(lambda t: t, 0.0, 1.0) == pytest.approx(0.5, abs=1e-12)
    assert integrate_finite(lambda t: 4 * t ** 3 - 3 * t * t + 1, -1.0, 2.0) == pytest.approx(9.0, abs=1e-10)


def test_extrapolation_constant_sequence():
    est = extrapolate_limit([(n, 5.0) for n in (10, 20, 40, 80)])
    assert est.extrapolated == 5.0 and est.converged


def test_extrapolation_one_over_n():
    est = extrapolate_limit([(n, 2.0 + 1.0 / n) for n in (10, 20, 40, 80)])
    assert est.extrapolated == pytest.approx(2.0, abs=1e-12)
    assert est.fitted_decay_exponent == pytest.approx(1.0, abs=1e-9)


def test_extrapolation_of_factorial_root():
    # n * (n!)**(-1/n) -> e
    ns = [1000 * 2 ** k for k in range(7)]
    terms = [(n, n * math.exp(-math.lgamma(n + 1) / n)) for n in ns]
    assert extrapolate_limit(terms).extrapolated == pytest.approx(math.e, abs=1e-3)


def test_extrapolation_is_deterministic():
    terms = [(n, 3.0 - 2.0 / n ** 0.3) for n in (8, 16, 32, 64, 128)]
    assert extrapolate_limit(terms) == extrapolate_limit(terms)
