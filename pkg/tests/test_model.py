import random
from fractions import Fraction

import pytest

from hssvm.model import (ConfigError, Configuration, ParameterSet, Signature,
                         height, parse_config_text, q_corr_statistic,
                         qmoment_from_correlations)


def test_signature_occupancy_round_trip():
    nu = Signature((3, 3, 1, 0))
    occ = nu.to_occupancy()
    assert occ.occupancy == {3: 2, 1: 1, 0: 1}
    assert Signature.from_occupancy(occ).parts == (3, 3, 1, 0)


def test_height():
    nu = Signature((4, 2, 2, 0))
    assert height(nu, 1) == 3
    assert height(nu, 2) == 3
    assert height(nu, 3) == 1
    assert height(nu, 5) == 0


def test_q_corr_statistic_hand_cases():
    q = Fraction(1, 4)
    # nu = (2,1,1): the sets matching m=(1,) are indices {2} and {3}
    assert q_corr_statistic(Signature((2, 1, 1)), (1,), q) == q ** 2 + q ** 3
    # m=(1,1): the single pair (2,3)
    assert q_corr_statistic(Signature((2, 1, 1)), (1, 1), q) == q ** 5
    # no match
    assert q_corr_statistic(Signature((2, 1, 1)), (3,), q) == 0
    # empty m: the empty product
    assert q_corr_statistic(Signature((2, 1, 1)), (), q) == 1


def test_qmoment_from_correlations_exact():
    """The correlation expansion reproduces q^{ell h(x)} exactly."""
    q = Fraction(1, 3)
    rnd = random.Random(123)
    for _ in range(200):
        n = rnd.randint(0, 5)
        parts = sorted((rnd.randint(0, 5) for _ in range(n)), reverse=True)
        nu = Signature(tuple(parts))
        x = rnd.randint(1, 5)
        ell = rnd.randint(1, 3)
        assert qmoment_from_correlations(nu, x, ell, q) \
            == q ** (ell * height(nu, x))


def test_parse_config_minimal():
    params, extras = parse_config_text("q = 1/4\n")
    assert params.q == Fraction(1, 4)
    assert params.s[0] == Fraction(-1, 2)
    assert params.xi[0] == 1


def test_parse_config_generator_reproducible():
    text = "q = 1/4\nxi = uniform(0.8,1.2,seed=7)\nX_max = 6\n"
    a, _ = parse_config_text(text)
    b, _ = parse_config_text(text)
    assert a.xi == b.xi
    assert all(0.8 <= x <= 1.2 for x in a.xi)


def test_parse_config_errors():
    with pytest.raises(ConfigError):
        parse_config_text("s = -1/2\n")  # missing q
    with pytest.raises(ConfigError):
        parse_config_text("q = 1/4\nbogus = 3\n")  # unknown key


def test_configuration_total_and_signature():
    c = Configuration({2: 2, 5: 1})
    assert c.total == 3
    assert c.max_site() == 5
    assert c.to_signature().parts == (5, 2, 2)
