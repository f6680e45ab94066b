"""Property tests for the structural invariants of each module."""

import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from gdms import CylinderSet, InvalidInput, Subshift, cantor_system, golden_mean_system, random_affine_markov_system
from gdms.classes import BirkhoffLevelSpec, LocallyConstantFunction, birkhoff_set, level_set_dimension
from gdms.diophantine import diophantine_measure_bound, reflect, w_alpha_stage
from gdms.netmeasure import CoverOracle, net_measure
from gdms.symbolic import antichain_intersect
from gdms.thermo import bowen_dimension, pressure_bracket

CANTOR = cantor_system()
GOLDEN = golden_mean_system()
S_CANTOR = math.log(2) / math.log(3)

fast = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
slow = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])

matrices = st.integers(2, 4).flatmap(
    lambda q: st.lists(st.lists(st.integers(0, 1), min_size=q, max_size=q), min_size=q, max_size=q)
)
binary_words = st.lists(st.integers(0, 1), min_size=1, max_size=4).map(tuple)
antichains = st.lists(binary_words, max_size=6).map(CylinderSet)


def _subshift(A):
    try:
        return Subshift.from_matrix(A)
    except InvalidInput:
        assume(False)


def _covered(X: CylinderSet, depth: int = 4) -> set:
    return {w for w in Subshift.full(2).enumerate_cylinders(depth) if X.contains_word(w)}


def _golden_words(root, depth):
    return GOLDEN.subshift.enumerate_cylinders(len(root) + depth, start=root)


# -- symbolic ------------------------------------------------------------------


@fast
@given(matrices, st.integers(1, 6))
def test_count_is_matrix_power_sum(A, n):
    sub = _subshift(A)
    M = np.array(A, dtype=object)
    expected = sum(np.linalg.matrix_power(M, n - 1).ravel()) if n > 1 else len(A)
    assert sub.count_words(n) == expected == len(sub.enumerate_cylinders(n))


@fast
@given(matrices, st.integers(1, 5))
def test_children_extend_and_stay_admissible(A, n):
    sub = _subshift(A)
    for w in sub.enumerate_cylinders(n):
        kids = sub.children(w)
        assert kids
        assert all(sub.is_admissible(c) and c[:-1] == w for c in kids)


@fast
@given(antichains, antichains)
def test_antichain_operations_match_sets(X, Y):
    assert _covered(antichain_intersect(X, Y)) == _covered(X) & _covered(Y)
    assert _covered(X.union(Y)) == _covered(X) | _covered(Y)
    assert antichain_intersect(X, Y) == antichain_intersect(Y, X)
    assert antichain_intersect(X, X) == X


@fast
@given(antichains, antichains, antichains)
def test_antichain_intersection_associative(X, Y, Z):
    assert antichain_intersect(antichain_intersect(X, Y), Z) == antichain_intersect(X, antichain_intersect(Y, Z))


@fast
@given(antichains)
def test_antichain_is_prefix_free(X):
    words = list(X)
    assert all(u == v or u != v[: len(u)] for u in words for v in words)


# -- geometry and thermo ---------------------------------------------------------


@slow
@given(st.integers(2, 4), st.integers(0, 10_000))
def test_random_affine_invariants(q, seed):
    system = random_affine_markov_system(q, seed)
    est = bowen_dimension(system)
    assert 0 < est.value < 1
    for w in system.subshift.enumerate_cylinders(2):
        parent = system.cylinder_diameter(w[:1]).d_hi
        assert system.cylinder_diameter(w).d_hi < parent


@fast
@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.integers(3, 8))
def test_pressure_decreasing_in_s(s1, s2, n):
    assume(abs(s1 - s2) > 1e-3)
    lo, hi = sorted((s1, s2))
    a, b = pressure_bracket(GOLDEN, lo, n), pressure_bracket(GOLDEN, hi, n)
    assert b.lower < a.lower and b.upper < a.upper


# -- net measure -----------------------------------------------------------------


@fast
@given(st.data(), st.floats(0.2, 0.6))
def test_dp_monotone_and_subadditive(data, t):
    words = _golden_words((0,), 3)
    a = CylinderSet(data.draw(st.lists(st.sampled_from(words), max_size=len(words))))
    b = CylinderSet(data.draw(st.lists(st.sampled_from(words), max_size=len(words))))
    va = net_measure(GOLDEN, t, (0,), a, frontier=4).value
    vb = net_measure(GOLDEN, t, (0,), b, frontier=4).value
    vab = net_measure(GOLDEN, t, (0,), a.union(b), frontier=4).value
    assert max(va, vb) <= vab * (1 + 1e-12)
    assert vab <= (va + vb) * (1 + 1e-12)


@fast
@given(st.data(), st.sampled_from([0.25, 0.45, 0.6, 0.75]))
def test_dp_matches_oracle_depth4(data, t):
    oracle = CoverOracle(CANTOR, t, (0,), 3)
    words = oracle.frontier_words
    target = CylinderSet(data.draw(st.lists(st.sampled_from(words), max_size=len(words))))
    dp = net_measure(CANTOR, t, (0,), target, frontier=4, precision="mp")
    ref = oracle.value(target)
    assert abs(float(dp.exact_value) - float(ref.value)) <= 1e-12 * max(1.0, float(ref.value))


@fast
@given(st.floats(0.05, 0.6), st.integers(0, 3))
def test_whole_cylinder_self_cover_below_dimension(t, depth):
    root = (0,) * (depth + 1)
    res = net_measure(CANTOR, t, root)
    assert res.value == pytest.approx(CANTOR.cylinder_diameter(root).d_hi ** t, rel=1e-12)


# -- classes ---------------------------------------------------------------------


@fast
@given(st.fractions(0, 1), st.fractions(F(1, 50), F(1, 2)), st.integers(1, 6))
def test_birkhoff_set_members_satisfy_spec(p, eps, M):
    g = LocallyConstantFunction(1, {"0": 1, "1": 0})
    spec = BirkhoffLevelSpec(g, p, eps, M)
    level = birkhoff_set(CANTOR, spec)
    all_words = CANTOR.subshift.enumerate_cylinders(M)
    assert set(level) == {w for w in all_words if spec.contains(w)}


@fast
@given(st.floats(0.02, 0.98))
def test_level_set_dimension_below_full(p):
    g = LocallyConstantFunction(1, {"0": 1, "1": 0})
    d = level_set_dimension(CANTOR, g, p)
    assert 0 <= d.value <= S_CANTOR + 1e-12
    assert d.value == pytest.approx(level_set_dimension(CANTOR, g, 1 - p).value, abs=1e-9)


# -- diophantine -------------------------------------------------------------------


@fast
@given(st.sampled_from([F(3, 2), F(2), F(5, 2), F(3)]), st.integers(1, 4))
def test_stage_closed_under_reflection(alpha, n):
    words = set(w_alpha_stage(alpha, n))
    assert {reflect(w) for w in words} == words


@slow
@given(st.fractions(F(1, 20), F(3, 10), max_denominator=50), st.fractions(F(1, 20), F(3, 10), max_denominator=50))
def test_normalized_mass_decreasing_in_t(t1, t2):
    assume(t1 != t2)
    lo, hi = sorted((t1, t2))
    a = diophantine_measure_bound([0, 2], 2, 6, lo)
    b = diophantine_measure_bound([0, 2], 2, 6, hi)
    assert b.normalized <= a.normalized * (1 + 1e-12)


@slow
@given(st.sampled_from([[0, 0], [0, 2], [2, 0], [2, 2]]), st.integers(2, 6))
def test_bound_invariant_under_reflection(cyl, n):
    a = diophantine_measure_bound(cyl, 2, n, "3/10")
    b = diophantine_measure_bound([2 - c for c in cyl], 2, n, "3/10")
    assert a.result.value == pytest.approx(b.result.value, rel=1e-12)
