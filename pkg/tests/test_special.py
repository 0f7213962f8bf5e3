"""Bessel / Hankel implementations against an independent high-precision
oracle (mpmath series summation at 30 significant digits)."""

import mpmath
import numpy as np
import pytest

from greenbie import special

mpmath.mp.dps = 30

# first positive zero of J0, computed once with mpmath.findroot on the series
J0_FIRST_ZERO = 2.404825557695773


def _oracle(fn, order, xs):
    return np.array([float(fn(order, float(x))) for x in xs])


@pytest.mark.parametrize("ours,order,kind", [
    (special.bessel_j0, 0, "j"),
    (special.bessel_j1, 1, "j"),
    (special.bessel_y0, 0, "y"),
    (special.bessel_y1, 1, "y"),
])
def test_absolute_error_below_1e7(ours, order, kind):
    xs = np.concatenate([np.linspace(1e-6, 5.0, 257), np.linspace(5.0, 100.0, 301)])
    ref_fn = mpmath.besselj if kind == "j" else mpmath.bessely
    ref = _oracle(ref_fn, order, xs)
    assert np.max(np.abs(ours(xs) - ref)) < 1e-7


def test_j0_at_origin_and_first_zero():
    assert special.bessel_j0(0.0) == 1.0
    assert abs(special.bessel_j0(J0_FIRST_ZERO)) < 1e-7


def test_y0_at_one_matches_series_oracle():
    want = float(mpmath.bessely(0, 1.0))
    assert abs(special.bessel_y0(1.0) - want) < 1e-7


def test_y_rejects_nonpositive():
    with pytest.raises(ValueError):
        special.bessel_y0(0.0)
    with pytest.raises(ValueError):
        special.bessel_y1(-1.0)
    with pytest.raises(ValueError):
        special.hankel1(0, 0.0)


def test_hankel_components_match_bessel():
    xs = np.linspace(0.3, 40.0, 97)
    h0 = special.hankel1(0, xs)
    assert np.array_equal(h0.real, special.bessel_j0(xs))
    assert np.array_equal(h0.imag, special.bessel_y0(xs))


def test_hankel_modulus_monotone_decreasing():
    # |H0| ~ sqrt(2/(pi x)): dense sampling on [1, 20]
    xs = np.linspace(1.0, 20.0, 400)
    mod = np.abs(special.hankel1(0, xs))
    assert np.all(np.diff(mod) < 0)


def test_hankel1_is_minus_derivative_of_hankel0():
    xs = np.linspace(0.5, 10.0, 41)
    h = 1e-6
    fd = -(special.hankel1(0, xs + h) - special.hankel1(0, xs - h)) / (2 * h)
    assert np.max(np.abs(fd - special.hankel1(1, xs))) < 1e-5


def test_hankel_rejects_bad_order():
    with pytest.raises(ValueError):
        special.hankel1(2, 1.0)
