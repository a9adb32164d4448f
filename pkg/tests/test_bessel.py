import math

import mpmath
import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, strategies as st

from bfio.bessel import bessel_j0, bessel_y0


def j0_series(z, terms=30):
    return sum((-1) ** k * (z / 2) ** (2 * k) / math.factorial(k) ** 2 for k in range(terms))


def y0_series(z, terms=30):
    h = 0.0
    tail = 0.0
    for k in range(1, terms):
        h += 1.0 / k
        tail += (-1) ** (k + 1) * h * (z / 2) ** (2 * k) / math.factorial(k) ** 2
    return 2 / math.pi * ((math.log(z / 2) + 0.5772156649015329) * j0_series(z, terms) + tail)


def test_examples():
    assert bessel_j0(0.0) == 1.0
    assert bessel_j0(1.0) == pytest.approx(0.76519768655796655, abs=1e-15)
    assert bessel_y0(1.0) == pytest.approx(0.08825696421567696, abs=1e-15)
    assert bessel_j0(1.0) == pytest.approx(j0_series(1.0), abs=1e-15)
    assert bessel_y0(1.0) == pytest.approx(y0_series(1.0), abs=1e-15)


def test_domain_errors():
    with pytest.raises(ValueError):
        bessel_y0(0.0)
    with pytest.raises(ValueError):
        bessel_y0(-1.0)
    with pytest.raises(ValueError):
        bessel_j0(-0.5)
    with pytest.raises(ValueError):
        bessel_j0(np.array([1.0, -1.0]))


def test_against_mpmath_log_spaced():
    z = np.logspace(-3, 4, 1000)
    j = bessel_j0(z)
    y = bessel_y0(z)
    jr = np.array([float(mpmath.besselj(0, v)) for v in z])
    yr = np.array([float(mpmath.bessely(0, v)) for v in z])
    assert np.max(np.abs(j - jr)) <= 1e-10
    assert np.max(np.abs(y - yr)) <= 1e-10


def test_across_the_series_switch():
    z = np.linspace(8, 18, 2001)
    assert np.max(np.abs(bessel_j0(z) - sp.j0(z))) <= 1e-10
    assert np.max(np.abs(bessel_y0(z) - sp.y0(z))) <= 1e-10


def test_large_arguments():
    z = np.logspace(4, 7, 200)
    assert np.max(np.abs(bessel_j0(z) - sp.j0(z))) <= 1e-10
    assert np.max(np.abs(bessel_y0(z) - sp.y0(z))) <= 1e-10


@given(st.floats(1e-6, 1e7))
def test_wronskian(z):
    # J1 = -J0', Y1 = -Y0'; J1 Y0 - J0 Y1 = 2/(pi z)
    j1, y1 = sp.j1(z), sp.y1(z)
    w = j1 * bessel_y0(z) - bessel_j0(z) * y1
    assert w == pytest.approx(2 / (math.pi * z), rel=1e-6, abs=1e-10)


def test_scalar_and_array_shapes():
    assert isinstance(bessel_j0(2.0), float)
    assert bessel_y0(np.ones((2, 3))).shape == (2, 3)
