import math
from fractions import Fraction

import pytest

from gdms import cantor_system, golden_mean_system, julia_system, random_affine_markov_system
from gdms.classes import LocallyConstantFunction

LOG2_LOG3 = math.log(2) / math.log(3)
GOLDEN_DIM = math.log((1 + math.sqrt(5)) / 2) / math.log(3)
RANDOM_SEED = 7


@pytest.fixture(scope="session")
def cantor():
    return cantor_system()


@pytest.fixture(scope="session")
def golden():
    return golden_mean_system()


@pytest.fixture(scope="session")
def golden_uneven():
    return golden_mean_system(Fraction(1, 3), Fraction(1, 4))


@pytest.fixture(scope="session")
def random_system():
    return random_affine_markov_system(3, RANDOM_SEED)


@pytest.fixture(scope="session")
def julia01():
    return julia_system(0.1)


@pytest.fixture(scope="session")
def ind0(cantor):
    return LocallyConstantFunction(1, {"0": 1, "1": 0})
