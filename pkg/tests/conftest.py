from fractions import Fraction

import pytest

from hssvm.model import ParameterSet


def homogeneous_params(q=Fraction(1, 4), xi=Fraction(1), s=Fraction(-1, 2),
                       X_max=12, **kw):
    return ParameterSet(q, (xi,) * (X_max + 1), (s,) * (X_max + 1),
                        X_max=X_max, **kw)


@pytest.fixture
def canonical():
    """The homogeneous exact instance q=1/4, xi=1, s=-1/2."""
    return homogeneous_params()


@pytest.fixture
def canonical_wide():
    """Same instance with a wide working window for certified tails."""
    return homogeneous_params(X_max=60)


@pytest.fixture
def canonical_float():
    return homogeneous_params(q=0.25, xi=1.0, s=-0.5, X_max=16)
