import random
from fractions import Fraction

import pytest

from hssvm.numerics import INF
from hssvm.weights import (LJ_recursive, LJ_simplified, LJ_weight,
                           L_row_distribution, L_weight, SingularWeightError,
                           WJ_weight, phi_weight, six_vertex_params,
                           six_vertex_solve, w_weight, yang_baxter_check)

Q = Fraction(1, 4)
S = Fraction(-1, 2)


def test_w_weight_conservation():
    for i1 in range(4):
        for j1 in (0, 1):
            for i2 in range(5):
                for j2 in (0, 1):
                    if i1 + j1 != i2 + j2:
                        assert w_weight(i1, j1, i2, j2, 1, S, Q) == 0


def test_stochastic_rows_sum_to_one():
    u = Fraction(9, 10)
    for i1 in range(7):
        for j1 in (0, 1):
            outcomes = L_row_distribution(i1, j1, u, S, Q)
            assert sum(p for _, _, p in outcomes) == 1
            assert all(p > 0 for _, _, p in outcomes)


def test_stochastic_infinite_stack():
    u = Fraction(9, 10)
    p1 = L_weight(INF, 0, INF, 1, u, S, Q)
    p0 = L_weight(INF, 0, INF, 0, u, S, Q)
    assert p0 + p1 == 1
    assert p1 == (-S * u) / (1 - S * u)


def test_fig_values():
    # L(1,0;1,0) = 3/4 and L(1,0;0,1) = 1/4 at the canonical parameters
    assert L_weight(1, 0, 1, 0, 1, S, Q) == Fraction(3, 4)
    assert L_weight(1, 0, 0, 1, 1, S, Q) == Fraction(1, 4)


def test_fused_closed_form_vs_recursion():
    u = Fraction(7, 10)
    for J in range(1, 5):
        qJ = Q ** J
        for i1 in range(6):
            for j1 in range(J + 1):
                for j2 in range(J + 1):
                    i2 = i1 + j1 - j2
                    if i2 < 0:
                        continue
                    assert LJ_weight(i1, j1, i2, j2, u, S, Q, qJ) \
                        == LJ_recursive(i1, j1, i2, j2, u, S, Q, J)


def test_fused_rows_sum_to_one():
    u = Fraction(7, 10)
    for J in (1, 2, 3):
        for i1 in range(4):
            for j1 in range(J + 1):
                total = 0
                for j2 in range(J + 1):
                    i2 = i1 + j1 - j2
                    if i2 >= 0:
                        total += LJ_weight(i1, j1, i2, j2, u, S, Q, Q ** J)
                assert total == 1


def test_fused_at_u_equals_s():
    for J in (1, 2, 3):
        for i1 in range(4):
            for j2 in range(min(i1, J) + 1):
                assert LJ_simplified(i1, 0, i1 - j2, j2, S, Q, J) \
                    == LJ_weight(i1, 0, i1 - j2, j2, S, S, Q, Q ** J)


def test_wj_reduces_to_w_at_J_one():
    u = Fraction(7, 10)
    for i1 in range(4):
        for j1 in (0, 1):
            for j2 in (0, 1):
                i2 = i1 + j1 - j2
                if i2 < 0:
                    continue
                assert WJ_weight(i1, j1, i2, j2, u, S, Q, Q) \
                    == w_weight(i1, j1, i2, j2, u, S, Q)


def test_phi_normalizes():
    q = Fraction(1, 4)
    mu, nu = Fraction(1, 8), Fraction(1, 2)
    for m in range(6):
        assert sum(phi_weight(j, m, q, mu, nu) for j in range(m + 1)) == 1
    total = sum(phi_weight(j, INF, 0.25, 0.125, 0.5) for j in range(80))
    assert abs(total - 1) < 1e-12


def test_yang_baxter_exact():
    rnd = random.Random(0)
    for _ in range(25):
        m, n = rnd.randint(0, 3), rnd.randint(0, 3)
        u1 = Fraction(rnd.randint(30, 200), 100)
        u2 = Fraction(rnd.randint(30, 200), 100)
        if u1 in (u2, Q * u2):
            continue
        assert yang_baxter_check(m, n, u1, u2, S, Q) == 0


def test_yang_baxter_float():
    assert yang_baxter_check(2, 1, 1.3, 0.7, -0.5, 0.25) < 1e-12


def test_yang_baxter_singular_conjugator():
    with pytest.raises(SingularWeightError):
        yang_baxter_check(1, 1, Fraction(1), Fraction(1), S, Q)


def test_six_vertex_round_trip():
    b1, b2 = six_vertex_params(Fraction(5, 2), Q)
    q, u = six_vertex_solve(b1, b2)
    assert q == Q and abs(u - 2.5) < 1e-12
    q, u = six_vertex_solve(0.7, 0.3)
    assert abs(q - 7 / 3) < 1e-12
    bb1, bb2 = six_vertex_params(u, q)
    assert abs(bb1 - 0.7) < 1e-12 and abs(bb2 - 0.3) < 1e-12
