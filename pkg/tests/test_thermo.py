import math
from fractions import Fraction as F

import numpy as np
import pytest

from conftest import GOLDEN_DIM, LOG2_LOG3
from gdms import DegenerateSystem, InvalidInput, Subshift, UnsupportedMethod, affine_markov_system
from gdms.thermo import (
    birkhoff_sum_bracket,
    bowen_dimension,
    c_t_constant,
    partition_sum,
    positivity_generation,
    pressure_bracket,
    pressure_spectral,
)

PHI = (1 + math.sqrt(5)) / 2


def test_birkhoff_examples(cantor, golden_uneven):
    lo, hi = birkhoff_sum_bracket(cantor, cantor.encode([0, 2]))
    assert lo == hi == pytest.approx(math.log(1 / 9), abs=1e-15)
    assert birkhoff_sum_bracket(cantor, (1,))[0] == pytest.approx(math.log(1 / 3), abs=1e-15)
    assert birkhoff_sum_bracket(golden_uneven, (1, 0))[1] == pytest.approx(math.log(1 / 12), abs=1e-15)


@pytest.mark.parametrize("n", [1, 3, 7, 12])
def test_partition_sum_at_dimension_is_one(cantor, n):
    z_inf, z_sup = partition_sum(cantor, LOG2_LOG3, n)
    assert z_inf == z_sup == pytest.approx(1.0, rel=1e-12)


def test_partition_sum_counts(cantor, golden):
    assert partition_sum(cantor, 0.0, 3) == (8.0, 8.0)
    assert partition_sum(golden, 0.0, 4) == (8.0, 8.0)


def test_partition_sum_direct_summation(random_system):
    s, n = 0.6, 5
    direct = sum(float(random_system.word_ratio(w)) ** s for w in random_system.subshift.enumerate_cylinders(n))
    assert partition_sum(random_system, s, n)[0] == pytest.approx(direct, rel=1e-12)


def test_pressure_bracket_closed_form(cantor):
    p = pressure_bracket(cantor, 0.5, 6)
    assert p.width == 0
    assert p.value == pytest.approx(math.log(2) - 0.5 * math.log(3), abs=1e-14)
    assert abs(pressure_bracket(cantor, LOG2_LOG3, 6).value) < 1e-14


@pytest.mark.parametrize("s", [0.0, 0.3, 0.9])
def test_golden_spectral_closed_form(golden, s):
    assert pressure_spectral(golden, s).value == pytest.approx(math.log(PHI) - s * math.log(3), abs=1e-12)


def test_pressure_at_zero_is_entropy(random_system):
    rho = max(abs(np.linalg.eigvals(random_system.subshift.matrix)))
    assert pressure_spectral(random_system, 0.0).value == pytest.approx(math.log(rho), abs=1e-12)


def test_spectral_on_numeric_system_unsupported(julia01):
    with pytest.raises(UnsupportedMethod):
        pressure_spectral(julia01, 0.5)


def test_golden_partition_bracket_contains_spectral(golden):
    for n in range(2, 11):
        pb = pressure_bracket(golden, 0.4, n)
        assert pb.lower - 1e-12 <= pressure_spectral(golden, 0.4).value <= pb.upper + 1e-12


def test_dimensions(cantor, golden):
    assert bowen_dimension(cantor).value == pytest.approx(LOG2_LOG3, abs=1e-9)
    assert bowen_dimension(golden).value == pytest.approx(GOLDEN_DIM, abs=1e-9)


def test_uneven_golden_dimension_root(golden_uneven):
    # closed form: rho(B_s) = 1 solves 3^-s + 12^-s = 1 for the first-return structure
    s = bowen_dimension(golden_uneven).value
    assert 3**-s + 12**-s == pytest.approx(1.0, abs=1e-9)


def test_single_map_is_degenerate():
    sys_ = affine_markov_system(Subshift.full(1), [(F(1, 2), 0)])
    with pytest.raises(DegenerateSystem):
        bowen_dimension(sys_)


def test_julia_dimension_near_one(julia01):
    est = bowen_dimension(julia01)
    assert not est.certified
    assert est.lower <= est.value <= est.upper
    assert 1.0 < est.value < 1.05


def test_julia_zero_dimension_is_one():
    from gdms import julia_system

    assert bowen_dimension(julia_system(0)).value == pytest.approx(1.0, abs=1e-3)


def test_positivity_examples(cantor):
    assert positivity_generation(cantor, 0.5).m == 1
    assert positivity_generation(cantor, 0.63).m == 1
    with pytest.raises(InvalidInput):
        positivity_generation(cantor, 0.7)


def test_positivity_golden_needs_two_steps(golden):
    rep = positivity_generation(golden, 0.3)
    assert rep.found and rep.m == 2 and rep.minimum_sum > 1


@pytest.mark.parametrize("t", [0.2, 0.5, 0.6])
def test_ct_is_one_on_equal_ratio_bernoulli(cantor, t):
    assert c_t_constant(cantor, t, depth=3).value == pytest.approx(1.0, abs=1e-12)


def test_ct_monotone_in_depth(golden):
    vals = [c_t_constant(golden, 0.3, depth=d).value for d in (1, 2, 3)]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
    assert 0 < vals[-1] <= 1
