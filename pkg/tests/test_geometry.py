import math
from fractions import Fraction as F

import numpy as np
import pytest

from gdms import (
    ConstraintViolation,
    InvalidInput,
    Subshift,
    affine_markov_system,
    golden_mean_system,
    julia_system,
    markov_interval_map_system,
)
from gdms.config import build_system, load_config


def test_cantor_builder(cantor):
    assert cantor.q == 2 and cantor.subshift == Subshift.full(2)
    assert [(f.scale, f.offset) for f in cantor.maps] == [(F(1, 3), 0), (F(1, 3), F(2, 3))]
    assert cantor.certified and cantor.kappa == 1


def test_compose_along_examples(cantor, golden_uneven):
    g = cantor.compose_along(cantor.encode([0, 2]))
    assert g.ratio == F(1, 9)
    assert g.image(F(0), F(1)) == (F(2, 9), F(1, 3))
    assert cantor.compose_along((1,)) == cantor.maps[1]
    assert golden_uneven.compose_along((0, 1)).ratio == F(1, 12)


@pytest.mark.parametrize("digits, d", [([0, 2, 0], F(1, 27)), ([2], F(1, 3))])
def test_cylinder_diameter_examples(cantor, digits, d):
    geom = cantor.cylinder_diameter(cantor.encode(digits))
    assert geom.d_lo == geom.d_hi == d and geom.exact


def test_open_set_examples(cantor, golden):
    assert cantor.verify_open_set_condition(2).passed
    assert cantor.verify_open_set_condition(2).checked == 4
    assert golden.verify_open_set_condition(1).passed


def test_overlapping_images_rejected():
    with pytest.raises(ConstraintViolation) as err:
        affine_markov_system(Subshift.full(2), [(F(3, 5), 0), (F(3, 5), F(3, 10))])
    assert err.value.assumption == "open-set"
    sys_ = affine_markov_system(Subshift.full(2), [(F(3, 5), 0), (F(3, 5), F(3, 10))], validate=False)
    report = sys_.verify_open_set_condition(1)
    assert not report.passed and report.max_overlap == F(3, 10)


def test_scale_on_lambda_bound_rejected():
    with pytest.raises(ConstraintViolation) as err:
        golden_mean_system(lambda1=F(1, 3), lambda2=F(1, 2))
    assert err.value.assumption == "contraction"


def test_edge_maps_default_to_first_letter_maps(golden):
    for (i, j), f in golden.edges.items():
        assert f == golden.maps[j]


def test_interval_map_slope_three_matches_cantor(cantor):
    imap = markov_interval_map_system([(0, F(1, 3)), (F(2, 3), 1)], [3, 3])
    for n in range(1, 6):
        for w in cantor.subshift.enumerate_cylinders(n):
            a = cantor.cylinder_diameter(w)
            b = imap.cylinder_diameter(w)
            assert a.region == b.region


def test_interval_map_markov_structure():
    # T(I_2) = [2/5, 1] covers I_1 and I_2 only
    imap = markov_interval_map_system(
        [(0, F(1, 5)), (F(2, 5), F(3, 5)), (F(4, 5), 1)],
        [5, 5, 3],
        images=[(0, 1), (0, 1), (F(2, 5), 1)],
    )
    assert imap.subshift.A == ((True,) * 3, (True,) * 3, (False, True, True))
    assert imap.edges[(2, 1)].ratio == F(1, 3)
    assert imap.cylinder_diameter((2, 1)).d_lo == F(1, 15)


def test_interval_map_refusals():
    with pytest.raises(ConstraintViolation) as err:
        markov_interval_map_system([(0, F(1, 2)), (F(1, 2), 1)], [1, 2])
    assert err.value.assumption == "contraction"
    with pytest.raises(ConstraintViolation) as err:
        markov_interval_map_system([(0, F(1, 4)), (F(1, 2), 1)], [3, 2], images=[(0, F(3, 4)), (0, 1)])
    assert err.value.assumption == "markov"
    # a branch onto a single interval gives a non-contracting edge map
    with pytest.raises(ConstraintViolation) as err:
        markov_interval_map_system([(0, F(1, 4)), (F(1, 2), 1)], [2, 2], images=[(F(1, 2), 1), (0, 1)])
    assert err.value.assumption == "contraction"


def test_julia_zero_is_unit_circle_branches():
    j = julia_system(0)
    assert not j.certified and j.ambient_dimension == 2
    assert j.space.r_in < 1 < j.space.r_out
    z = np.exp(1j * np.linspace(0.1, 6.2, 50))
    for b in j.maps:
        w = b(z)
        assert np.allclose(np.abs(w), 1.0)
        assert np.allclose(w * w, z)


def test_julia_kappa_and_brackets(julia01):
    assert 1 <= julia01.kappa < 10
    lam2 = julia01.lambda2
    for w in julia01.subshift.enumerate_cylinders(4):
        g = julia01.cylinder_diameter(w)
        assert 0 < g.d_lo <= g.d_hi <= lam2**4 * julia01.space.diameter
        assert g.d_hi / g.d_lo <= julia01.kappa * (1 + 1e-12)


@pytest.mark.parametrize("c", [0.3, 0.1 + 0.1j, -0.5])
def test_julia_unsupported_parameters_refused(c):
    with pytest.raises(ConstraintViolation):
        julia_system(c)


def test_project_point(cantor):
    n = 12
    x, err = cantor.project_point((1,) * n)
    assert abs(1 - x) <= F(1, 3**n) and err == F(1, 3**n)
    x, _ = cantor.project_point(cantor.encode([0, 2]), 2)
    assert F(2, 9) <= x <= F(1, 3)


def test_affine_diameter_is_product_of_scales(random_system):
    X = random_system.space.diameter
    for w in random_system.subshift.enumerate_cylinders(5):
        ratios = [random_system.maps[w[0]].ratio] + [random_system.edges[(a, b)].ratio for a, b in zip(w, w[1:])]
        assert random_system.cylinder_diameter(w).d_lo == X * math.prod(ratios)


def test_open_set_persists_across_generations(cantor, golden, random_system):
    for s in (cantor, golden, random_system):
        assert all(s.verify_open_set_condition(n).passed for n in range(1, 7))


def test_config_rational_strings():
    s = build_system(load_config({"system": {"kind": "golden", "r0": "1/3", "r1": "1/4"}}))
    assert s.maps[1].scale == F(1, 4)
    with pytest.raises(InvalidInput):
        load_config({"system": {"kind": "golden", "r0": "1/3", "colour": "red"}})
