import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from scatter_imaging import specfun

mpmath.mp.dps = 40


def series_j(n, x, terms=80):
    """Ascending power series of J_n in 40-digit arithmetic (independent oracle)."""
    x = mpmath.mpf(x)
    s = mpmath.mpf(0)
    for m in range(terms):
        s += (-1) ** m / (mpmath.factorial(m) * mpmath.factorial(m + n)) * (x / 2) ** (2 * m + n)
    return s


def series_y0(x, terms=80):
    """Y_0 from its ascending series with harmonic numbers."""
    x = mpmath.mpf(x)
    s = mpmath.mpf(0)
    h = mpmath.mpf(0)
    for m in range(1, terms):
        h += mpmath.mpf(1) / m
        s += (-1) ** (m + 1) * h / mpmath.factorial(m) ** 2 * (x / 2) ** (2 * m)
    return 2 / mpmath.pi * ((mpmath.log(x / 2) + mpmath.euler) * series_j(0, x) + s)


def test_j_at_zero():
    assert specfun.bessel_j(0, 0.0) == 1.0
    assert specfun.bessel_j(1, 0.0) == 0.0
    assert specfun.bessel_j(-3, 0.0) == 0.0


def test_j_first_zero_value():
    assert abs(specfun.bessel_j(0, 2.404825557695773)) < 1e-10


@pytest.mark.parametrize("n", [0, 1, 2, 5, 13])
@pytest.mark.parametrize("x", [0.05, 0.5, 1.7, 4.0, 9.3])
def test_j_against_power_series(n, x):
    assert abs(specfun.bessel_j(n, x) - float(series_j(n, x))) < 1e-12


@pytest.mark.parametrize("n", [0, 3, 17, 40, 80])
@pytest.mark.parametrize("x", [0.3, 12.0, 55.5, 120.0, 200.0])
def test_j_against_mpmath(n, x):
    assert abs(specfun.bessel_j(n, x) - float(mpmath.besselj(n, x))) < 1e-12


@pytest.mark.parametrize("n", [0, 1, 4, 20, 80])
@pytest.mark.parametrize("x", [1e-3, 0.5, 7.0, 60.0, 200.0])
def test_y_against_mpmath(n, x):
    ref = float(mpmath.bessely(n, x))
    if not math.isfinite(ref):
        # Y_n overflows double precision for large n at tiny x
        assert not np.isfinite(specfun.bessel_y(n, x)) or abs(specfun.bessel_y(n, x)) > 1e300
        return
    tol = 1e-10 * max(1.0, abs(ref))
    assert abs(specfun.bessel_y(n, x) - ref) < tol


def test_y0_against_ascending_series():
    assert abs(specfun.bessel_y(0, 0.5) - float(series_y0(0.5))) < 1e-13


def test_y0_small_argument_expansion():
    x = 1e-6
    lead = 2 / math.pi * math.log(x / 2) + 2 * 0.5772156649015329 / math.pi
    assert abs(specfun.bessel_y(0, x) - lead) < 1e-9


def test_negative_order_symmetry():
    x = np.linspace(0.1, 30, 50)
    for n in range(1, 12):
        assert np.allclose(specfun.bessel_j(-n, x), (-1) ** n * specfun.bessel_j(n, x), rtol=0, atol=1e-15)
        assert np.allclose(specfun.bessel_y(-n, x), (-1) ** n * specfun.bessel_y(n, x), rtol=1e-14)


def test_wronskian_example():
    x, n = 1.7, 3
    w = specfun.bessel_j(n + 1, x) * specfun.bessel_y(n, x) - specfun.bessel_j(n, x) * specfun.bessel_y(n + 1, x)
    assert abs(w - 2 / (math.pi * x)) < 1e-10


@settings(max_examples=200, deadline=None)
@given(x=st.floats(0.1, 100.0), n=st.integers(1, 40))
def test_recurrence(x, n):
    r = specfun.bessel_j(n - 1, x) + specfun.bessel_j(n + 1, x) - 2 * n / x * specfun.bessel_j(n, x)
    assert abs(r) < 1e-9


@settings(max_examples=200, deadline=None)
@given(x=st.floats(0.1, 100.0), n=st.integers(0, 40))
def test_wronskian(x, n):
    w = specfun.bessel_j(n + 1, x) * specfun.bessel_y(n, x) - specfun.bessel_j(n, x) * specfun.bessel_y(n + 1, x)
    # relative test: both terms can be huge when n >> x
    scale = max(1.0, abs(specfun.bessel_j(n, x) * specfun.bessel_y(n + 1, x)))
    assert abs(w - 2 / (math.pi * x)) < 1e-9 * scale


def test_hankel_is_j_plus_iy():
    x = np.array([0.3, 2.0, 11.0])
    h = specfun.hankel1(2, x)
    assert np.allclose(h.real, specfun.bessel_j(2, x)) and np.allclose(h.imag, specfun.bessel_y(2, x))


def test_zero_examples():
    assert abs(specfun.bessel_j_zeros(0, 1)[0] - 2.404825557695773) < 1e-10
    assert abs(specfun.bessel_j_zeros(1, 1)[0] - 3.831705970207512) < 1e-10
    z = specfun.bessel_j_zeros(0, 2)
    assert abs(z[1] - 5.520078110286311) < 1e-10 and z[1] > z[0]


@pytest.mark.parametrize("n", [0, 1, 2, 7, 25, 60, 80])
def test_zeros_against_scipy_and_mpmath(n):
    count = 8
    z = specfun.bessel_j_zeros(n, count)
    assert np.all(np.diff(z) > 0)
    assert np.allclose(z, special.jn_zeros(n, count), rtol=0, atol=1e-10)
    for m in (0, count - 1):
        assert abs(z[m] - float(mpmath.besseljzero(n, m + 1))) < 1e-10


@pytest.mark.parametrize("n", [0, 3, 11])
def test_zeros_are_sign_changes(n):
    for r in specfun.bessel_j_zeros(n, 6):
        assert abs(specfun.bessel_j(n, r)) < 1e-9
        assert specfun.bessel_j(n, r - 1e-6) * specfun.bessel_j(n, r + 1e-6) < 0


def test_domain_errors():
    with pytest.raises(ValueError):
        specfun.bessel_j(0, float("nan"))
    with pytest.raises(ValueError):
        specfun.bessel_j(0, float("inf"))
    with pytest.raises(ValueError):
        specfun.bessel_y(0, 0.0)
    with pytest.raises(ValueError):
        specfun.bessel_y(1, -1.0)
    with pytest.raises(ValueError):
        specfun.bessel_j(81, 1.0)
    with pytest.raises(ValueError):
        specfun.bessel_j(0.5, 1.0)
    with pytest.raises(ValueError):
        specfun.bessel_j_zeros(0, 0)
    with pytest.raises(ValueError):
        specfun.bessel_j_zeros(-1, 2)
