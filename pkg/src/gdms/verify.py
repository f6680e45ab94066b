"""Invariant suite run by ``gdms verify`` on a configured system."""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import GdmsSystem
from .netmeasure import WHOLE, CoverOracle, grid_net_measure, net_measure, random_target
from .symbolic import CylinderSet, antichain_intersect
from .thermo import (
    birkhoff_sum_bracket,
    bowen_dimension,
    c_t_constant,
    partition_sum,
    positivity_generation,
    pressure_bracket,
    pressure_spectral,
)

REL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail, "seconds": self.seconds}


@dataclass
class VerifyReport:
    system: str
    certified: bool
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {
            "system": self.system,
            "certified": self.certified,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }


class _Fail(Exception):
    pass


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise _Fail(message)


def _words_upto(system: GdmsSystem, n: int):
    for k in range(1, n + 1):
        yield from system.subshift.enumerate_cylinders(k)


# -- symbolic ----------------------------------------------------------------


def _check_counts(system, gen):
    sub = system.subshift
    A = sub.matrix.astype(object)
    P = np.identity(sub.q, dtype=object)
    for n in range(1, gen + 1):
        expected = int(P.sum())
        _require(sub.count_words(n) == expected, f"count_words({n}) != sum A^{n - 1}")
        if n <= 8:
            _require(len(sub.enumerate_cylinders(n)) == expected, f"enumeration size at {n}")
        P = P.dot(A)
    return f"generations 1..{gen}"


def _check_connecting(system, gen):
    sub = system.subshift
    words = list(_words_upto(system, 2))
    for a, b in itertools.product(words, repeat=2):
        w = sub.connecting_word(a, b)
        _require(sub.is_admissible(w), f"connecting_word{a, b} not admissible")
        _require(w[: len(a)] == a and w[len(w) - len(b):] == b, f"connecting_word{a, b} bad ends")
    return f"{len(words) ** 2} pairs"


def _check_antichains(system, gen):
    rng = random.Random(0)
    words = list(_words_upto(system, 4))
    for _ in range(60):
        X, Y, Z = (CylinderSet(rng.sample(words, min(4, len(words)))) for _ in range(3))
        _require(antichain_intersect(X, X) == X, "intersection not idempotent")
        _require(antichain_intersect(X, Y) == antichain_intersect(Y, X), "intersection not commutative")
        _require(
            antichain_intersect(antichain_intersect(X, Y), Z) == antichain_intersect(X, antichain_intersect(Y, Z)),
            "intersection not associative",
        )
        for u, v in itertools.combinations(list(X) + list(Y), 2):
            nested = u[: len(v)] == v or v[: len(u)] == u
            _require(nested or not antichain_intersect(CylinderSet([u]), CylinderSet([v])), "net property")
    return "60 random triples"


# -- geometry ----------------------------------------------------------------


def _check_open_set(system, gen):
    for n in range(1, gen + 1):
        rep = system.verify_open_set_condition(n)
        _require(rep.passed, f"generation {n}: {rep.offending} overlap {rep.max_overlap}")
    return f"generations 1..{gen} ({'exact' if system.affine else 'sampled'})"


def _check_diameters(system, gen):
    X = system.space.diameter
    lam1, lam2, kappa = system.lambda1, system.lambda2, system.kappa
    for w in _words_upto(system, gen):
        g = system.cylinder_diameter(w)
        n = len(w)
        _require(0 < g.d_lo <= g.d_hi, f"{w}: bracket order")
        if system.affine:
            _require(g.d_lo == X * system.word_ratio(w), f"{w}: diameter != |X| * prod scales")
            _require(g.d_hi <= lam2**n * X and g.d_lo >= lam1**n * X / kappa, f"{w}: lambda bounds")
        else:
            _require(g.d_hi <= float(lam2) ** n * X * (1 + REL), f"{w}: d_hi above lambda2^n |X|")
            _require(g.d_lo >= float(lam1) ** n * X / float(kappa) * (1 - REL), f"{w}: d_lo below bound")
            _require(g.d_hi / g.d_lo <= float(kappa) * (1 + REL), f"{w}: d_hi/d_lo exceeds kappa")
        if n > 1:
            parent = system.cylinder_diameter(w[:-1])
            _require(g.d_hi < parent.d_hi, f"{w}: child not smaller than parent")
    return f"all words up to generation {gen}"


# -- thermo ------------------------------------------------------------------


def _check_birkhoff(system, gen):
    X = float(system.space.diameter)
    log_kappa = math.log(float(system.kappa))
    for w in _words_upto(system, gen):
        lo, hi = birkhoff_sum_bracket(system, w)
        g = system.cylinder_diameter(w)
        _require(hi - lo <= log_kappa + 1e-12, f"{w}: sup S - inf S exceeds log kappa")
        _require(
            math.exp(lo) * (1 - REL) <= float(g.d_lo) / X and float(g.d_hi) / X <= math.exp(hi) * (1 + REL),
            f"{w}: diameter outside exp(S_n phi) bracket",
        )
        if system.affine:
            d_lo, d_hi = system.derivative_bracket(w)
            _require(d_lo == d_hi == system.word_ratio(w), f"{w}: derivative bracket not exact")
    return f"all words up to generation {gen}"


def _check_partition(system, gen):
    kappa = float(system.kappa)
    for s in (0.0, 0.3, 0.7, 1.0):
        for n in range(1, gen + 1):
            z_inf, z_sup = partition_sum(system, s, n)
            _require(z_inf <= z_sup <= kappa**s * z_inf * (1 + 1e-9), f"Z bracket at s={s}, n={n}")
    return "s in {0, .3, .7, 1}"


def _check_spectral(system, gen):
    if not system.affine:
        return "skipped (numeric system)"
    for s in (0.2, 0.5, 0.8):
        sp = pressure_spectral(system, s)
        _require(sp.upper - sp.lower <= 1e-10, f"spectral width at s={s}")
        for n in range(2, 11):
            pb = pressure_bracket(system, s, n)
            _require(
                pb.lower - 1e-10 <= sp.value <= pb.upper + 1e-10,
                f"spectral {sp.value} outside partition bracket [{pb.lower}, {pb.upper}] at s={s}, n={n}",
            )
    return "s in {.2, .5, .8}, n = 2..10"


def _check_pressure_monotone(system, gen):
    n = 10 if system.affine else 8
    grid = np.linspace(0.0, 1.5, 16)
    est = [pressure_bracket(system, float(s), n) for s in grid]
    vals = [e.value for e in est]
    _require(all(b < a for a, b in zip(vals, vals[1:])), "pressure not strictly decreasing")
    # brackets separate once s moves by more than the combined widths scaled by log(1/lambda2)
    rate = math.log(1 / float(system.lambda2))
    for i, j in itertools.combinations(range(len(grid)), 2):
        gap = 2 * (est[i].width + est[j].width) / rate
        if grid[j] - grid[i] > gap:
            _require(est[j].upper < est[i].lower, f"brackets overlap at s={grid[i]:.2f}, {grid[j]:.2f}")
    return f"16-point grid, n={n}"


def _check_dimension(system, gen):
    dim = bowen_dimension(system)
    _require(dim.lower <= dim.value <= dim.upper, "dimension outside its bracket")
    _require(0 < dim.value <= system.ambient_dimension, "dimension out of range")
    if system.affine:
        p = pressure_spectral(system, dim.value)
        _require(abs(p.value) < 1e-8, f"P(s*) = {p.value}")
    else:
        lo = pressure_bracket(system, dim.lower, 8)
        hi = pressure_bracket(system, dim.upper, 8)
        _require(lo.upper >= 0 >= hi.lower, "pressure bracket misses zero across the dimension bracket")
    return f"s* = {dim.value!r} in [{dim.lower!r}, {dim.upper!r}]"


# -- net measure -------------------------------------------------------------


def _check_oracle(system, gen):
    if not system.affine:
        return "skipped (numeric system)"
    t = 0.5 * bowen_dimension(system).value
    count = 0
    for a in range(system.q):
        root = (a,)
        depth = 2 if system.q > 2 else 3
        oracle = CoverOracle(system, t, root, depth)
        frontier = len(root) + depth
        words = oracle.frontier_words
        subsets = (
            itertools.chain.from_iterable(itertools.combinations(words, k) for k in range(len(words) + 1))
            if len(words) <= 9
            else (random.Random(a).sample(words, 3) for _ in range(64))
        )
        for sub in subsets:
            target = CylinderSet(sub)
            dp = net_measure(system, t, root, target, frontier=frontier, precision="mp", extract_cover=False)
            ref = oracle.value(target).value
            _require(abs(dp.value - float(ref)) <= 1e-12 * max(1.0, float(ref)), f"root {root}, target {target}")
            count += 1
    return f"{count} targets, t = {t:.6f}"


def _check_monotone_subadditive(system, gen):
    if not system.affine:
        return "skipped (numeric system)"
    t = 0.5 * bowen_dimension(system).value
    rng = random.Random(1)
    for _ in range(30):
        root = (rng.randrange(system.q),)
        small = random_target(system, root, 3, rng)
        big = small.union(random_target(system, root, 3, rng))
        f = len(root) + 4
        v_small = net_measure(system, t, root, small, frontier=f, extract_cover=False).value
        v_big = net_measure(system, t, root, big, frontier=f, extract_cover=False).value
        _require(v_small <= v_big * (1 + REL), f"monotonicity fails for {small} in {big}")
        kids = system.subshift.children(root)
        parts = sum(net_measure(system, t, c, big.restrict(c), frontier=f, extract_cover=False).value for c in kids)
        _require(v_big <= parts * (1 + REL), f"subadditivity fails at {root}")
    return "30 random target pairs"


def _check_ct_bound(system, gen):
    dim = bowen_dimension(system).value
    t = 0.5 * dim
    depth = 2 if system.affine else 1
    ct = c_t_constant(system, t, depth=depth)
    _require(0 < ct.value <= 1 + REL, f"c_t = {ct.value} outside (0, 1]")
    for w in _words_upto(system, depth):
        v = net_measure(system, t, w, WHOLE, extract_cover=False)
        d = float(system.cylinder_diameter(w).d_lo) ** t
        _require(v.lower >= ct.value * d * (1 - 1e-9), f"{w}: net measure below c_t d^t")
        _require(v.upper <= float(system.cylinder_diameter(w).d_hi) ** t * (1 + REL), f"{w}: above self-cover")
    return f"c_t = {ct.value!r} at t = {t:.6f}"


def _check_grid_identity(system, gen):
    if not system.affine:
        return "skipped (numeric system)"
    t = 0.5 * bowen_dimension(system).value
    # the identity needs every grid step to be at least m(t) generations
    m0 = positivity_generation(system, t).m
    n = 0
    for m in (m0, 2 * m0):
        for k in range(1, 4 // m + 1):
            for w in system.subshift.enumerate_cylinders(k * m):
                v = grid_net_measure(system, t, m, w, extract_cover=False).value
                d = float(system.cylinder_diameter(w).d_hi) ** t
                _require(abs(v - d) <= 1e-12 * d, f"N^{{{m},t}}({w}) = {v} != d^t = {d}")
                n += 1
    return f"{n} cylinders, m in {{{m0}, {2 * m0}}}"


def _checks(system: GdmsSystem) -> list[tuple[str, Callable, int]]:
    gen = 6 if system.affine else 4
    return [
        ("symbolic.counts", _check_counts, 12),
        ("symbolic.connecting_word", _check_connecting, 2),
        ("symbolic.antichain_algebra", _check_antichains, 4),
        ("geometry.open_set", _check_open_set, 4 if system.affine else 3),
        ("geometry.diameters", _check_diameters, gen),
        ("thermo.birkhoff_vs_diameter", _check_birkhoff, gen),
        ("thermo.partition_bracket", _check_partition, gen),
        ("thermo.spectral_vs_partition", _check_spectral, 10),
        ("thermo.pressure_monotone", _check_pressure_monotone, 0),
        ("thermo.dimension_root", _check_dimension, 0),
        ("netmeasure.oracle", _check_oracle, 0),
        ("netmeasure.monotone_subadditive", _check_monotone_subadditive, 0),
        ("netmeasure.ct_lower_bound", _check_ct_bound, 0),
        ("netmeasure.grid_identity", _check_grid_identity, 0),
    ]


def run_invariant_suite(system: GdmsSystem) -> VerifyReport:
    """Run every invariant applicable to ``system``; failures are recorded,
    not raised."""
    report = VerifyReport(system.name, system.certified)
    for name, fn, gen in _checks(system):
        start = time.perf_counter()
        try:
            detail, ok = fn(system, gen), True
        except _Fail as exc:
            detail, ok = str(exc), False
        report.checks.append(CheckResult(name, ok, detail, time.perf_counter() - start))
    return report
