"""End-to-end acceptance checks, one per shipped guarantee.

Each test prints a single CRITERION line and enforces its runtime budget.
"""
import json
import math
import random
import time
from fractions import Fraction

from click.testing import CliRunner

from hssvm import identities
from hssvm.cli import main as cli_main
from hssvm.dynamics import DynamicsSpec
from hssvm.model import ParameterSet, Signature, height, q_corr_statistic, \
    qmoment_from_correlations
from hssvm.numerics import INF
from hssvm.observables import (MomentRequest, brute_force_expectation,
                               mc_expectation, qcorr_integral,
                               qcorr_observable, qmoment_degenerate,
                               qmoment_observable, qmoment_quadrature,
                               qmoment_residue)
from hssvm.render import render_heat_map, render_path_ensemble
from hssvm.weights import (LJ_recursive, LJ_weight, L_row_distribution,
                           phi_weight, six_vertex_solve, yang_baxter_check)
from tests.conftest import homogeneous_params


def _report(number, name, ok, budget, elapsed):
    print("CRITERION %d (%s): %s  [%.1fs / %.0fs]"
          % (number, name, "PASS" if ok else "FAIL", elapsed, budget))
    assert ok
    assert elapsed < budget


def test_criterion_1_yang_baxter():
    t0 = time.perf_counter()
    rnd = random.Random(101)
    ok = True
    draws = 0
    while draws < 100:
        m, n = rnd.randint(0, 3), rnd.randint(0, 3)
        q = Fraction(rnd.randint(10, 90), 100)
        s = Fraction(-rnd.randint(20, 90), 100)
        u1 = Fraction(rnd.randint(30, 250), 100)
        u2 = Fraction(rnd.randint(30, 250), 100)
        if u1 in (u2, q * u2) or u2 == q * u1:
            continue
        draws += 1
        ok = ok and yang_baxter_check(m, n, u1, u2, s, q) == 0
    for _ in range(20):
        m, n = rnd.randint(0, 3), rnd.randint(0, 3)
        u1, u2 = rnd.uniform(0.4, 2.0), rnd.uniform(0.4, 2.0)
        ok = ok and yang_baxter_check(m, n, u1, u2, -0.5, 0.25) < 1e-12
    _report(1, "yang-baxter", ok, 5, time.perf_counter() - t0)


def test_criterion_2_stochasticity_and_fusion():
    t0 = time.perf_counter()
    Q, S = Fraction(1, 4), Fraction(-1, 2)
    u = Fraction(9, 10)
    ok = True
    for i1 in range(7):
        for j1 in (0, 1):
            ok = ok and sum(p for _, _, p in
                            L_row_distribution(i1, j1, u, S, Q)) == 1
    for J in range(1, 5):
        for i1 in range(6):
            for j1 in range(J + 1):
                for j2 in range(J + 1):
                    i2 = i1 + j1 - j2
                    if i2 < 0:
                        continue
                    ok = ok and LJ_weight(i1, j1, i2, j2, u, S, Q, Q ** J) \
                        == LJ_recursive(i1, j1, i2, j2, u, S, Q, J)
    params = homogeneous_params()
    for J in (1, 2, 3):
        for i1 in range(3):
            for j1 in range(J + 1):
                for j2 in range(J + 1):
                    i2 = i1 + j1 - j2
                    if i2 < 0:
                        continue
                    ok = ok and identities.verify_fusion(
                        J, i1, i2, j1, params, u=u) == 0
    _report(2, "stochasticity-fusion", ok, 30, time.perf_counter() - t0)


def test_criterion_3_symmetric_function_oracles():
    from hssvm.symfun import F_symm, G_symm, skew_F, skew_G

    t0 = time.perf_counter()
    params = homogeneous_params()
    rnd = random.Random(303)
    ok = True

    def distinct(n):
        vals = set()
        while len(vals) < n:
            vals.add(Fraction(rnd.randint(30, 250), 100))
        return tuple(vals)

    for _ in range(50):
        M = rnd.randint(1, 3)
        mu = tuple(sorted((rnd.randint(0, 4) for _ in range(M)),
                          reverse=True))
        us = distinct(M)
        ok = ok and F_symm(mu, us, params) == skew_F((), mu, us, params)
    for _ in range(50):
        N = rnd.randint(1, 3)
        n = rnd.randint(1, N)
        mu = tuple(sorted((rnd.randint(0, 4) for _ in range(n)),
                          reverse=True))
        vs = distinct(N)
        ok = ok and G_symm(mu, vs, params) == \
            skew_G((0,) * n, mu, vs, params)
    _report(3, "symfun-oracles", ok, 60, time.perf_counter() - t0)


def test_criterion_4_summation_identities():
    t0 = time.perf_counter()
    params = homogeneous_params(X_max=60)
    rnd = random.Random(404)
    ok = True
    for i in range(20):
        u = Fraction(rnd.randint(60, 95), 100)
        v = Fraction(rnd.randint(15, 40), 100)
        res, _ = identities.verify_cauchy(1, 1, (u,), (v,), params, tol=1e-9)
        ok = ok and res < 1e-9
        la = (rnd.randint(0, 2),)
        which = 1 + i % 2
        data = (la, (u,), v) if which == 1 else (la, u, (v,))
        res, _ = identities.verify_pieri(which, data, params, tol=1e-9)
        ok = ok and res < 1e-9
        a, b = sorted((rnd.randint(0, 2), rnd.randint(0, 2)), reverse=True)
        res, _ = identities.verify_skew_cauchy((a, b), (rnd.randint(0, 2),),
                                               u, v, params, tol=1e-9)
        ok = ok and res < 1e-9
    _report(4, "cauchy-pieri-skew", ok, 60, time.perf_counter() - t0)


def test_criterion_5_spatial_orthogonality():
    t0 = time.perf_counter()
    params = homogeneous_params(X_max=12)
    ok = True
    singles = [(0,), (1,), (2,)]
    for la in singles:
        for mu in singles:
            res = identities.verify_spatial_orthogonality(la, mu, params,
                                                          N_quad=512)
            ok = ok and res < 1e-8
    pairs = [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)]
    for la in pairs:
        for mu in pairs:
            res = identities.verify_spatial_orthogonality(la, mu, params,
                                                          N_quad=512)
            ok = ok and res < 1e-8
    for la in ((2, 1, 0), (1, 1, 1)):
        res = identities.verify_spatial_orthogonality(la, la, params,
                                                      N_quad=256)
        ok = ok and res < 1e-7
    _report(5, "spatial-orthogonality", ok, 120, time.perf_counter() - t0)


def test_criterion_6_qmoment_three_way():
    t0 = time.perf_counter()
    rnd = random.Random(606)
    ok = True

    # forced values: one row at u = xi = 1 gives h(1) = 1 deterministically
    canon = homogeneous_params()
    ok = ok and qmoment_residue(MomentRequest((1,), "residue"),
                                (Fraction(1),), canon) == Fraction(1, 4)
    ok = ok and qmoment_residue(MomentRequest((2,), "residue"),
                                (Fraction(1),), canon) == Fraction(5, 8)

    for _ in range(20):
        q = round(rnd.uniform(0.3, 0.7), 3)
        n = rnd.randint(1, 4)
        us = []
        while len(us) < n:
            u = round(rnd.uniform(0.5, 1.2), 3)
            cands = us + [q * w for w in us + [u]]
            if all(abs(u - c) > 0.02 for c in cands):
                us.append(u)
        us = tuple(us)
        ell = rnd.randint(1, 3)
        xs = tuple(sorted((rnd.randint(1, 4) for _ in range(ell)),
                          reverse=True))
        req = MomentRequest(xs, "residue")
        params = homogeneous_params(q=q, xi=1.0, s=-0.5, X_max=12)
        res = float(qmoment_residue(req, us, params))
        quad = qmoment_quadrature(req, us, params, N_quad=64)
        ok = ok and abs(res - quad.real) < 1e-8 and abs(quad.imag) < 1e-8
        cutoff = 12 if n <= 3 else 10
        wide = homogeneous_params(q=q, xi=1.0, s=-0.5, X_max=cutoff + 4)
        bf, cert = brute_force_expectation(qmoment_observable(xs, q), n, us,
                                           wide, cutoff=cutoff, tol=1.0)
        ok = ok and abs(res - bf) < 1e-9 + cert["deficit"]

    # Monte Carlo on a representative instance, one million trajectories
    us = (1.0, 1.2)
    target = float(qmoment_residue(MomentRequest((2, 1), "residue"),
                                   (Fraction(1), Fraction(6, 5)), canon))
    wide = homogeneous_params(q=0.25, xi=1.0, s=-0.5, X_max=60,
                              u_schedule=us, stochastic_regime=True)
    spec = DynamicsSpec("x_plus", wide, schedule=us)
    mean, se = mc_expectation(spec, qmoment_observable((2, 1), 0.25), 2,
                              samples=1000000, seed=66)
    ok = ok and abs(mean - target) < 4 * se
    _report(6, "qmoment-three-way", ok, 600, time.perf_counter() - t0)


def test_criterion_7_qcorrelations():
    t0 = time.perf_counter()
    ok = True
    q = 0.25

    # two rows, spectral parameters (1.0, 1.2)
    us2 = (1.0, 1.2)
    p2 = homogeneous_params(q=q, xi=1.0, s=-0.5, X_max=16)
    wide2 = homogeneous_params(q=q, xi=1.0, s=-0.5, X_max=36)
    for m in ((0,), (1,), (0, 0), (1, 0)):
        val = qcorr_integral(m, us2, p2, method="same_contour", N_quad=128)
        bf, _ = brute_force_expectation(qcorr_observable(m, q), 2, us2,
                                        wide2, cutoff=30, tol=1.0)
        ok = ok and abs(val - bf) < 1e-8

    # three rows, spectral parameters (0.9, 0.7, 0.5)
    us3 = (0.9, 0.7, 0.5)
    wide3 = homogeneous_params(q=q, xi=1.0, s=-0.5, X_max=34)
    for m, cutoff in (((0,), 28), ((1, 0), 25)):
        val = qcorr_integral(m, us3, p2, method="same_contour", N_quad=128)
        bf, _ = brute_force_expectation(qcorr_observable(m, q), 3, us3,
                                        wide3, cutoff=cutoff, tol=1.0)
        ok = ok and abs(val - bf) < 1e-8

    # correlation expansion of the q-moment, exact on random signatures
    qq = Fraction(1, 3)
    rnd = random.Random(707)
    for _ in range(200):
        k = rnd.randint(0, 5)
        nu = Signature(tuple(sorted((rnd.randint(0, 5) for _ in range(k)),
                                    reverse=True)))
        x = rnd.randint(1, 5)
        ell = rnd.randint(1, 3)
        ok = ok and qmoment_from_correlations(nu, x, ell, qq) \
            == qq ** (ell * height(nu, x))
    _report(7, "qcorrelations", ok, 300, time.perf_counter() - t0)


def test_criterion_8_degenerations():
    t0 = time.perf_counter()
    ok = True

    # (a) stochastic six vertex model at (b1, b2) = (0.7, 0.3), three rows
    q6, u6 = six_vertex_solve(0.7, 0.3)
    X = 50
    s6 = q6 ** -0.5
    p6 = ParameterSet(q6, (1.0,) * (X + 1), (s6,) * (X + 1),
                      u_schedule=(u6,) * 3, X_max=X)
    spec6 = DynamicsSpec("x_plus", p6, schedule=[u6] * 3)
    data6 = {"q": q6, "b1": 0.7, "b2": 0.3, "n": 3}
    mean, se = mc_expectation(spec6, qmoment_observable((1,), q6), 3,
                              samples=2000, seed=80)
    ok = ok and se == 0 and abs(mean - q6 ** 3) < 1e-9  # h(1)=3 a.s.
    target = qmoment_degenerate("six_vertex", MomentRequest((2,), "quadrature"),
                                data6, N_quad=128).real
    mean, se = mc_expectation(spec6, qmoment_observable((2,), q6), 3,
                              samples=1000000, seed=81)
    ok = ok and abs(mean - target) < 4 * se

    # (b) ASEP at t = 1, step initial data
    qa = 0.25
    pa = homogeneous_params(q=qa, xi=1.0, s=-0.5, X_max=12)
    spec_a = DynamicsSpec("asep_ct", pa, initial=tuple(range(-1, -16, -1)))
    for x in (-1, 0, 1):
        tgt = qmoment_degenerate("asep", MomentRequest((x,), "quadrature"),
                                 {"q": qa, "t": 1.0}, N_quad=256).real

        def obs(state, x=x):
            return qa ** sum(1 for pos in state if pos >= x)

        mean, se = mc_expectation(spec_a, obs, 1.0, samples=300000,
                                  seed=82 + x)
        ok = ok and abs(mean - tgt) < 4 * se

    # (c) q-Boson at t = 1, all rates one
    spec_b = DynamicsSpec("q_boson_ct", pa, rates=[1.0],
                          initial=tuple(range(-1, -26, -1)))
    tgt = qmoment_degenerate("q_boson", MomentRequest((2,), "quadrature"),
                             {"q": qa, "a": [1.0], "t": 1.0}, N_quad=128).real
    ok = ok and abs(tgt - math.exp(-0.75)) < 1e-9

    def obs_b(state):
        return qa ** sum(mm for j, mm in state.occupancy.items() if j >= 2)

    mean, se = mc_expectation(spec_b, obs_b, 1.0, samples=300000, seed=90)
    ok = ok and abs(mean - tgt) < 4 * se

    # (d) q-Hahn after one parallel step: exact emission sum
    s2 = [-0.6, -0.45]
    for J in (1, 2):
        nu1 = s2[0]
        for xs in ((2,), (2, 2)):
            k = len(xs)
            exact = sum(float(phi_weight(j, INF, qa, qa ** J * nu1, nu1))
                        * qa ** (k * j) for j in range(200))
            val = qmoment_degenerate(
                "q_hahn", MomentRequest(xs, "quadrature"),
                {"q": qa, "s_squared": s2, "J": J, "n": 1}, N_quad=512).real
            ok = ok and abs(val - exact) < 1e-8
    _report(8, "degenerations", ok, 900, time.perf_counter() - t0)


def test_criterion_9_figure_reproduction():
    t0 = time.perf_counter()
    ensemble = render_path_ensemble()
    ok = ensemble.count('class="multi"') == 9
    ok = ok and ensemble == render_path_ensemble()
    heat = render_heat_map(300, 0.7, 0.3, seed=9)
    ok = ok and heat == render_heat_map(300, 0.7, 0.3, seed=9)
    ok = ok and "<rect" in heat
    _report(9, "figure-reproduction", ok, 5, time.perf_counter() - t0)


def test_criterion_10_selftest_reproducibility(tmp_path):
    t0 = time.perf_counter()
    runner = CliRunner()
    docs, manifests = [], []
    ok = True
    for name in ("first", "second"):
        out = tmp_path / name
        res = runner.invoke(cli_main, ["selftest", "--out", str(out)],
                            catch_exceptions=False)
        ok = ok and res.exit_code == 0
        docs.append(((out / "selftest.json").read_bytes(),
                     (out / "selftest.config").read_bytes()))
        m = json.loads((out / "manifest.json").read_text())
        m.pop("wall_time_s")
        manifests.append(m)
    ok = ok and docs[0] == docs[1] and manifests[0] == manifests[1]
    _report(10, "selftest-reproducibility", ok, 120,
            time.perf_counter() - t0)
