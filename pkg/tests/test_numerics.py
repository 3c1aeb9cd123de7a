import cmath
import math
from fractions import Fraction

import pytest

from hssvm.numerics import (INF, Circle, contour_integrate, exact_div,
                            q_binomial, q_pochhammer)


def test_exact_div_keeps_rationals():
    assert exact_div(1, 3) == Fraction(1, 3)
    assert isinstance(exact_div(Fraction(1, 2), Fraction(3, 4)), Fraction)
    assert exact_div(1.0, 4) == 0.25


def test_q_pochhammer_basic():
    q = Fraction(1, 2)
    z = Fraction(1, 3)
    assert q_pochhammer(z, q, 0) == 1
    assert q_pochhammer(z, q, 3) == (1 - z) * (1 - z * q) * (1 - z * q ** 2)
    # signed index: (z;q)_{-n} = 1 / (z q^{-n}; q)_n
    assert q_pochhammer(z, q, -2) == exact_div(
        1, (1 - z / q ** 2) * (1 - z / q))


def test_q_pochhammer_infinite():
    val = q_pochhammer(0.5, 0.5, INF)
    partial = 1.0
    for k in range(200):
        partial *= 1 - 0.5 * 0.5 ** k
    assert abs(val - partial) < 1e-12


def test_q_binomial():
    q = Fraction(1, 3)
    assert q_binomial(4, 2, q) == 1 + q + 2 * q ** 2 + q ** 3 + q ** 4
    assert q_binomial(3, 5, q) == 0
    assert q_binomial(3, -1, q) == 0
    assert q_binomial(5, 0, q) == 1


def test_circle_contains():
    c = Circle(2.0, 1.0)
    assert c.contains(2.5)
    assert not c.contains(4.0)


def test_contour_integrate_residue():
    # oint dz/(2 pi i z) = 1 around 0
    val = contour_integrate(lambda z: 1.0 / z, [Circle(0.0, 1.0)], 64)
    assert abs(val - 1.0) < 1e-12
    # analytic integrand integrates to 0
    val = contour_integrate(lambda z: z ** 2 + 3.0, [Circle(0.0, 1.0)], 64)
    assert abs(val) < 1e-12


def test_contour_integrate_union_and_orientation():
    # union of two circles picks up both poles
    f = lambda z: 1.0 / (z - 2.0) + 1.0 / (z + 2.0)
    circles = [[Circle(2.0, 0.5), Circle(-2.0, 0.5)]]
    val = contour_integrate(f, circles, 64)
    assert abs(val - 2.0) < 1e-12
    val = contour_integrate(lambda z: 1.0 / z,
                            [Circle(0.0, 1.0, orientation=-1)], 64)
    assert abs(val + 1.0) < 1e-12


def test_contour_integrate_two_variables():
    # product of two independent single-pole factors
    f = lambda z, w: 1.0 / (z * w)
    val = contour_integrate(f, [Circle(0.0, 1.0), Circle(0.0, 2.0)], 64)
    assert abs(val - 1.0) < 1e-12


def test_contour_integrate_rejects_coarse_grids():
    with pytest.raises(ValueError):
        contour_integrate(lambda z: 1.0 / z, [Circle(0.0, 1.0)], 8)
