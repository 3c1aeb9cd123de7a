import math
import random
from fractions import Fraction

import pytest

from hssvm.model import Configuration, ParameterSet
from hssvm.numerics import INF
from hssvm.weights import L_row_distribution, phi_weight
from hssvm.dynamics import (DynamicsSpec, exact_pushforward,
                            exclusion_to_zero_range, kernel_weight,
                            rng_for_sample, run_ctmc, step_qhahn,
                            step_sequential, zero_range_to_exclusion)
from tests.conftest import homogeneous_params

PARAMS = homogeneous_params()


def test_rng_streams_are_reproducible_and_distinct():
    a = rng_for_sample(7, 3).random()
    b = rng_for_sample(7, 3).random()
    c = rng_for_sample(7, 4).random()
    assert a == b and a != c


def test_coordinate_maps_round_trip():
    positions = (5, 2, -1, -2)
    config, x1 = exclusion_to_zero_range(positions)
    assert zero_range_to_exclusion(config, n=4, x1=x1) == positions
    # step initial data from the empty config
    assert zero_range_to_exclusion(Configuration({}), n=3) == (-1, -2, -3)


def test_sequential_sampler_matches_row_law():
    """Empirical one-step distribution of the source sampler against the
    exact one-row stochastic weights."""
    wide = homogeneous_params(q=0.25, xi=1.0, s=-0.5, X_max=40)
    spec = DynamicsSpec("x_plus", wide, schedule=[1.0])
    counts = {}
    n = 20000
    for i in range(n):
        c = step_sequential(Configuration({}), spec, 0, rng_for_sample(1, i))
        nu = c.to_signature().parts
        counts[nu] = counts.get(nu, 0) + 1
    # P(particle settles at column 1) = L(0,1;1,0) at u*xi = 1
    p1 = float(L_row_distribution(0, 1, 1.0, -0.5, 0.25)[0][2])
    expected = next(p for i2, j2, p in
                    L_row_distribution(0, 1, 1.0, -0.5, 0.25) if j2 == 0)
    freq = counts.get((1,), 0) / n
    assert abs(freq - expected) < 4 * math.sqrt(expected / n)


def _qhahn_params(nu=-0.6, X_max=12):
    s = complex(0.0, math.sqrt(-nu))
    return ParameterSet(0.25, (s,) * (X_max + 1), (s,) * (X_max + 1),
                        X_max=X_max)


def test_qhahn_boundary_injects_J():
    spec = DynamicsSpec("q_hahn", _qhahn_params(), J=2, variant="boundary_J")
    c = step_qhahn(Configuration({}), spec, rng_for_sample(0, 0))
    assert c.total == 2


def test_qhahn_infinity_emission_law():
    nu = -0.6
    spec = DynamicsSpec("q_hahn", _qhahn_params(nu), J=2, variant="infinity")
    q = 0.25
    counts = {}
    n = 20000
    for i in range(n):
        c = step_qhahn(Configuration({}), spec, rng_for_sample(2, i))
        j = c.occupancy.get(2, 0)
        counts[j] = counts.get(j, 0) + 1
    for j in (0, 1, 2):
        p = float(phi_weight(j, INF, q, q ** 2 * nu, nu))
        freq = counts.get(j, 0) / n
        assert abs(freq - p) < 4 * math.sqrt(p * (1 - p) / n) + 1e-9


def test_ctmc_event_times_and_states():
    spec = DynamicsSpec("q_tasep_ct", PARAMS, rates=[1.0],
                        initial=[-1, -2, -3])
    traj = run_ctmc(spec, 2.0, rng_for_sample(5, 0))
    assert traj.times[0] == 0 and traj.times[-1] == 2.0
    for state in traj.configs:
        assert list(state) == sorted(state, reverse=True)


def test_asep_blocking():
    spec = DynamicsSpec("asep_ct", PARAMS, initial=[0, -1])
    rng = rng_for_sample(9, 0)
    for _ in range(50):
        traj = run_ctmc(spec, 0.5, rng)
        xs = traj.configs[-1]
        assert xs[0] > xs[1]


def test_exact_pushforward_certificate():
    dist = {(): 1}
    out, cert = exact_pushforward(dist, "Q_plus_rho", Fraction(1), None,
                                  PARAMS, cutoff=9, tol=1e-6)
    mass = sum(out.values())
    assert cert["deficit"] == 1 - mass
    assert 0 < cert["deficit"] <= max(1e-6, cert["tail_bound"])
    assert all(len(nu) == 1 for nu in out)


def test_kernel_rows_are_distributions():
    # one source step from the empty signature sums to 1 - deficit
    dist = {(): 1}
    out, cert = exact_pushforward(dist, "Q_plus_rho", Fraction(1), None,
                                  PARAMS, cutoff=10, tol=1e-4)
    out2, cert2 = exact_pushforward(out, "Q_plus_rho", Fraction(4, 5), None,
                                    PARAMS, cutoff=10, tol=1e-4)
    assert all(w > 0 for w in out2.values())
    assert sum(out2.values()) <= 1
