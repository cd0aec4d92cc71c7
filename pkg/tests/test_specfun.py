"""Special-function layer: oracles and identities."""

import math

import numpy as np
import pytest

from lislab.specfun import (
    DomainError,
    airy_ai,
    airy_ai_prime,
    bessel_j,
    bessel_j_prime,
)


def _ai_maclaurin(x, tiny=1e-20):
    """Independent Maclaurin evaluation of Ai and Ai' near the origin.

    Ai(x) = c1 f(x) - c2 g(x) with f, g the standard homogeneous
    solutions of y'' = x y; series coefficients from the three-term
    recursion, truncated when terms fall below ``tiny``.
    """
    c1 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
    c2 = 3.0 ** (-1.0 / 3.0) / math.gamma(1.0 / 3.0)
    f = fp = g = gp = 0.0
    term_f, term_g = 1.0, x
    k = 0
    while max(abs(term_f), abs(term_g)) > tiny and k < 200:
        f += term_f
        g += term_g
        if 3 * k >= 1:
            fp += term_f * (3 * k) / x if x != 0 else 0.0
        gp += term_g * (3 * k + 1) / x if x != 0 else (1.0 if k == 0 else 0.0)
        term_f *= x**3 / ((3 * k + 2) * (3 * k + 3))
        term_g *= x**3 / ((3 * k + 3) * (3 * k + 4))
        k += 1
    return c1 * f - c2 * g, c1 * fp - c2 * gp


def test_airy_decay_far_right():
    assert airy_ai(40.0) == pytest.approx(0.0, abs=1e-13)
    assert airy_ai_prime(40.0) == pytest.approx(0.0, abs=1e-13)


def test_airy_at_zero_series_oracle():
    ai0, aip0 = _ai_maclaurin(0.0)
    assert airy_ai(0.0) == pytest.approx(ai0, rel=1e-13)
    assert airy_ai_prime(0.0) == pytest.approx(aip0, rel=1e-13)


@pytest.mark.parametrize("x", [-2.5, -1.0, -0.3, 0.7, 1.9])
def test_airy_series_oracle_small_x(x):
    ai, aip = _ai_maclaurin(x)
    assert airy_ai(x) == pytest.approx(ai, rel=1e-11, abs=1e-13)
    assert airy_ai_prime(x) == pytest.approx(aip, rel=1e-11, abs=1e-13)


def test_airy_ode_finite_difference():
    rng = np.random.default_rng(7)
    xs = rng.uniform(-8.0, 8.0, size=50)
    h = 1e-4
    second = (airy_ai(xs + h) - 2.0 * airy_ai(xs) + airy_ai(xs - h)) / h**2
    assert np.max(np.abs(second - xs * airy_ai(xs))) < 1e-5


def test_airy_prime_centered_difference():
    h = 1e-6
    fd = (airy_ai(-1.0 + h) - airy_ai(-1.0 - h)) / (2.0 * h)
    assert fd == pytest.approx(airy_ai_prime(-1.0), abs=1e-6)


def test_bessel_small_argument():
    assert bessel_j(0.0, 0.0) == pytest.approx(1.0, abs=1e-15)
    x = 1e-6
    assert bessel_j(1.0, x) / x == pytest.approx(0.5, rel=1e-10)


def test_bessel_recurrence():
    rng = np.random.default_rng(11)
    for _ in range(50):
        nu = rng.uniform(2.0, 400.0)
        x = rng.uniform(nu / 2.0, 2.0 * nu)
        lhs = bessel_j(nu - 1.0, x) + bessel_j(nu + 1.0, x)
        rhs = 2.0 * nu / x * bessel_j(nu, x)
        scale = max(1.0, abs(rhs))
        assert abs(lhs - rhs) / scale < 1e-10


def test_bessel_prime_consistency():
    h = 1e-6
    fd = (bessel_j(3.0, 5.0 + h) - bessel_j(3.0, 5.0 - h)) / (2.0 * h)
    assert fd == pytest.approx(bessel_j_prime(3.0, 5.0), abs=1e-8)


def _transition_error(l, xs):
    """Max deviation from the two-term large-order transition expansion."""
    arg = l - xs * (l / 2.0) ** (1.0 / 3.0)
    exact = bessel_j(float(l), arg)
    two_term = (2.0 ** (1.0 / 3.0) / l ** (1.0 / 3.0)) * airy_ai(xs)
    two_term = two_term + (1.0 / (10.0 * l)) * (
        2.0 * xs * airy_ai(xs) + 3.0 * xs**2 * airy_ai_prime(xs)
    )
    return np.max(np.abs(exact - two_term))


def test_bessel_transition_asymptotics_order():
    xs = np.linspace(-2.0, 6.0, 81)
    errs = [_transition_error(l, xs) for l in (100, 200, 400)]
    # error should scale like l^{-5/3}: successive ratio 2^{5/3} within 30%
    target = 2.0 ** (5.0 / 3.0)
    for e_small, e_big in zip(errs, errs[1:]):
        assert 0.7 * target < e_small / e_big < 1.3 * target


def test_bessel_transition_point_value():
    l, x = 200, 1.0
    val = bessel_j(float(l), l - x * (l / 2.0) ** (1.0 / 3.0))
    approx = (2.0 ** (1.0 / 3.0) / l ** (1.0 / 3.0)) * airy_ai(x) + (
        1.0 / (10.0 * l)
    ) * (2.0 * x * airy_ai(x) + 3.0 * x**2 * airy_ai_prime(x))
    assert abs(val - approx) < 20.0 * l ** (-5.0 / 3.0)


def test_domain_errors():
    with pytest.raises(DomainError):
        airy_ai(float("nan"))
    with pytest.raises(DomainError):
        airy_ai_prime(float("inf"))
    with pytest.raises(DomainError):
        bessel_j(-1.0, 2.0)
    with pytest.raises(DomainError):
        bessel_j(1.0, -2.0)


def test_extended_precision_matches_double():
    hi = airy_ai(2.0, prec_bits=120)
    assert float(hi) == pytest.approx(airy_ai(2.0), rel=1e-14)
    hj = bessel_j(3.0, 1.5, prec_bits=120)
    assert float(hj) == pytest.approx(bessel_j(3.0, 1.5), rel=1e-13)
