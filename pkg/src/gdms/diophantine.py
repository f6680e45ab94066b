"""Triadic approximation sets E_n on the middle-third Cantor set K.

E_n is the union of the closed intervals of radius 3^(-alpha n) around
p / 3^n, p = 0..3^n, clipped to [0, 1]. The radius is irrational in
general; every comparison against it is done exactly with integer powers
(alpha = a/b rational, y <= 3^(-a n / b) iff y^b 3^(a n) <= 1).

Cylinders are words in the Cantor system's symbols 0/1. Arguments named
``cylinder`` take ternary digits 0/2, matching the usual notation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Optional, Sequence, Union

import mpmath

from ._parallel import parallel_map
from .errors import InvalidInput, InvariantViolation
from .geometry import cantor_system
from .netmeasure import NetMeasureResult, net_measure
from .rational import fraction_str, to_fraction
from .symbolic import CylinderSet, Word

Number = Union[int, float, str, Fraction]
_CANTOR = None


def _cantor():
    global _CANTOR
    if _CANTOR is None:
        _CANTOR = cantor_system()
    return _CANTOR


def _alpha(alpha: Number) -> Fraction:
    a = to_fraction(alpha)
    if not a > 1:
        raise InvalidInput(f"alpha must be > 1, got {a}")
    return a


def _level(n: int) -> int:
    if not isinstance(n, int) or n < 1:
        raise InvalidInput(f"level n must be an integer >= 1, got {n!r}")
    return n


def _iroot(x: int, k: int) -> int:
    """floor(x ** (1/k)) for integers x >= 0, k >= 1."""
    if x < 2 or k == 1:
        return x
    y = 1 << ((x.bit_length() + k - 1) // k)
    while True:
        z = ((k - 1) * y + x // y ** (k - 1)) // k
        if z >= y:
            break
        y = z
    while y**k > x:
        y -= 1
    while (y + 1) ** k <= x:
        y += 1
    return y


class Grid:
    """Integer coordinates for level-n work: a point x is stored as
    x * 3^G with G = ceil(alpha n) + 1, deep enough for every descent
    step. The radius 3^(-alpha n) becomes the exact test Y <= floor(3^(G - alpha n))."""

    def __init__(self, alpha: Fraction, n: int):
        self.alpha = alpha
        self.n = n
        e = alpha * n
        self.g = math.ceil(e)
        self.G = self.g + 1
        self.D = 3**self.G
        P, Q = e.numerator, e.denominator
        self.ymax = _iroot(3 ** (self.G * Q - P), Q)

    def within(self, y: int) -> bool:
        """|y| / 3^G <= radius."""
        return abs(y) <= self.ymax

    def size(self, generation: int) -> int:
        if generation > self.G:
            raise InvariantViolation("descent below the integer grid")
        return 3 ** (self.G - generation)


@dataclass(frozen=True)
class ApproxIntervalSet:
    """E_n: closed intervals of radius 3^(-alpha n) around p / 3^n,
    p = 0..3^n, clipped to [0, 1]. Lengths are exact multiples of the
    radius."""

    alpha: Fraction
    n: int

    @property
    def count(self) -> int:
        return 3**self.n + 1

    @property
    def log3_radius(self) -> Fraction:
        return -self.alpha * self.n

    def centers(self):
        return (Fraction(p, 3**self.n) for p in range(self.count))

    def length_factor(self, p: int) -> int:
        """Length of the p-th interval in units of the radius."""
        if not 0 <= p <= 3**self.n:
            raise InvalidInput(f"no centre p = {p} at level {self.n}")
        return 1 if p in (0, 3**self.n) else 2

    def length_profile(self) -> dict:
        """{length in radius units: number of intervals}."""
        return {2: self.count - 2, 1: 2}

    def within_radius(self, y: Fraction) -> bool:
        """|y| <= 3^(-alpha n), decided in integers."""
        y = abs(Fraction(y))
        e = self.alpha * self.n
        P, Q = e.numerator, e.denominator
        return y.numerator**Q * 3**P <= y.denominator**Q

    def contains(self, x) -> bool:
        x = to_fraction(x)
        if not 0 <= x <= 1:
            return False
        p = round(x * 3**self.n)
        return self.within_radius(x - Fraction(p, 3**self.n))

    def disjoint(self) -> bool:
        """Neighbouring intervals are separated: 2 * radius < 3^-n."""
        return not self.within_radius(Fraction(1, 2 * 3**self.n))


def en_intervals(alpha: Number, n: int) -> ApproxIntervalSet:
    return ApproxIntervalSet(_alpha(alpha), _level(n))


def cantor_interval(w: Sequence[int]) -> tuple[Fraction, Fraction]:
    """[lo, hi] of the generation-len(w) Cantor interval coded by symbols w."""
    lo = Fraction(0)
    for k, s in enumerate(w, start=1):
        lo += Fraction(2 * s, 3**k)
    return lo, lo + Fraction(1, 3 ** len(w))


def _descend(grid: Grid, center: int, w: Word, lo: int, stop: int, contained: bool = True):
    """Words below ``w`` (interval starting at ``lo``) relevant to the
    closed interval of radius 3^(-alpha n) around ``center``.

    With ``stop`` = 0 it returns True as soon as the interval is found to
    meet K (endpoints of Cantor intervals lie in K). Otherwise it collects
    the generation-``stop`` words inside (or meeting) the interval.
    """
    out = []
    stack = [(w, lo)]
    while stack:
        u, a = stack.pop()
        size = grid.size(len(u))
        b = a + size
        if (center > b and not grid.within(center - b)) or (a > center and not grid.within(a - center)):
            continue
        if not stop:
            if grid.within(center - a) or grid.within(center - b):
                return True
        elif len(u) == stop:
            if not contained or (grid.within(center - a) and grid.within(b - center)):
                out.append(u)
            continue
        third = size // 3
        stack.append((u + (1,), a + 2 * third))
        stack.append((u + (0,), a))
    return out if stop else False


def _start(grid: Grid, w: Word) -> int:
    lo = 0
    for k, s in enumerate(w, start=1):
        lo += 2 * s * 3 ** (grid.G - k)
    return lo


@lru_cache(maxsize=64)
def _hits(alpha: Fraction, n: int) -> dict:
    """Center p / 3^n -> generation-n words whose interval its E_n
    interval meets inside K.

    K lies in F_n, and an interval of radius < 3^-n can only reach an F_n
    interval from one of the four grid points nearest it, so only those
    candidates are tested (exactly).
    """
    grid = Grid(alpha, n)
    step = 3 ** (grid.G - n)
    found: dict = {}
    for w in _cantor().subshift.enumerate_cylinders(n):
        lo = _start(grid, w)
        A = lo // step
        for p in range(max(A - 1, 0), min(A + 2, 3**n) + 1):
            if _descend(grid, p * step, w, lo, 0):
                found.setdefault(Fraction(p, 3**n), []).append(w)
    return found


def en_intersecting_centers(alpha: Number, n: int) -> list[Fraction]:
    """Centers p / 3^n whose E_n interval meets K, in increasing order."""
    return sorted(_hits(_alpha(alpha), _level(n)))


def en_intersect_count(alpha: Number, n: int) -> int:
    """Number of E_n intervals meeting K (2^(n+1) for every alpha > 1)."""
    return len(_hits(_alpha(alpha), _level(n)))


def stage_generation(alpha: Number, n: int) -> int:
    a = _alpha(alpha)
    return math.ceil(a * _level(n))


def w_alpha_stage(alpha: Number, n: int, contained: bool = True, within: Sequence[int] = ()) -> CylinderSet:
    """Cantor cylinders of generation ceil(alpha n) inside E_n
    (``contained=False``: meeting E_n instead), optionally only those
    below the symbol word ``within``."""
    a = _alpha(alpha)
    n = _level(n)
    grid = Grid(a, n)
    within = tuple(within)
    out: list[Word] = []
    for c, words in _hits(a, n).items():
        centre = c.numerator * grid.D // c.denominator
        for w in words:
            if w[: len(within)] != within[: len(w)]:
                continue
            out.extend(_descend(grid, centre, w, _start(grid, w), grid.g, contained))
    return CylinderSet(out).restrict(within) if within else CylinderSet(out)


def reflect(w: Sequence[int]) -> Word:
    """Symbol word of the mirror image under x -> 1 - x."""
    return tuple(1 - s for s in w)


def _cylinder_word(cylinder: Sequence[int]) -> Word:
    digits = list(cylinder)
    if any(d not in (0, 2) for d in digits):
        raise InvalidInput(f"cylinder digits must be 0 or 2, got {digits}")
    return _cantor().encode(digits)


# -- mass distribution -------------------------------------------------------


EXACT_BIT_LIMIT = 1 << 18


def _pow3_le(x: Fraction, rhs: Fraction) -> bool:
    """3^x <= rhs for rational x and positive rational rhs.

    Exact in integers when x has a small denominator; otherwise (x coming
    from a float) a 60-digit comparison of logarithms.
    """
    P, Q = x.numerator, x.denominator
    rhs = Fraction(rhs)
    rhs_bits = max(rhs.numerator.bit_length(), rhs.denominator.bit_length())
    if 2 * abs(P) + Q * rhs_bits <= EXACT_BIT_LIMIT:
        # 3^(P/Q) <= r  iff  3^P <= r^Q  (Q > 0)
        if P >= 0:
            return 3**P <= rhs**Q
        return 1 <= rhs**Q * 3 ** (-P)
    with mpmath.workdps(60):
        lhs = mpmath.mpf(P) / Q * mpmath.log(3)
        return lhs <= mpmath.log(mpmath.mpf(rhs.numerator)) - mpmath.log(mpmath.mpf(rhs.denominator))


def critical_exponent(alpha: Number) -> float:
    return math.log(2) / math.log(3) / float(to_fraction(alpha))


@dataclass(frozen=True)
class MassDistributionReport:
    m: int
    n: int
    alpha: Fraction
    t: Fraction
    small_pieces_ok: bool
    large_pieces_ok: bool
    threshold: Optional[int]
    log_lhs: float
    log_rhs: float
    worst_small: Optional[int]

    @property
    def passed(self) -> bool:
        return self.small_pieces_ok and self.large_pieces_ok

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "alpha": fraction_str(self.alpha),
            "t": fraction_str(self.t),
            "small_pieces_ok": self.small_pieces_ok,
            "large_pieces_ok": self.large_pieces_ok,
            "threshold": self.threshold,
            "log_lhs": self.log_lhs,
            "log_rhs": self.log_rhs,
            "worst_small": self.worst_small,
            "passed": self.passed,
        }


def _large_condition(alpha: Fraction, t: Fraction, m: int, n: int) -> bool:
    # 3^(alpha n t) 2^(-n) |C|^(t - log2/log3) <= 2 with |C| = 3^-m
    # reduces to 3^(t (alpha n - m)) <= 2^(n - m + 1)
    return _pow3_le(t * (alpha * n - m), Fraction(2) ** (n - m + 1))


def mass_threshold(alpha: Number, t: Number, m: int, n_cap: int = 400) -> Optional[int]:
    """Smallest n > m from which the large-piece condition holds for the
    next ``n_cap`` levels; None if it never settles."""
    a, tt = _alpha(alpha), to_fraction(t)
    ok = [_large_condition(a, tt, m, n) for n in range(m + 1, m + 1 + n_cap)]
    for k in range(len(ok)):
        if all(ok[k:]):
            return m + 1 + k
    return None


def mass_distribution_check(cylinder: Sequence[int], alpha: Number, n: int, t: Number) -> MassDistributionReport:
    """Both cases of the uniform-mass estimate mu(U) <= 2 |U|^t / |C|^t
    for the mass spread over the surviving E_n intervals inside C.

    Pieces U of generation n_i <= n use the mass 2^(n-n_i+1) / 2^(n-m) as
    displayed in the classical argument; pieces finer than n need the
    exponent condition, whose exact sides are reported in log form.
    """
    a, tt = _alpha(alpha), to_fraction(t)
    word = _cylinder_word(cylinder)
    m = len(word)
    n = _level(n)
    if not m < n:
        raise InvalidInput(f"need generation of C ({m}) < n ({n})")
    if tt < 0 or not _pow3_le(tt, Fraction(2)):
        raise InvalidInput(f"t={tt} exceeds log2/log3")
    small_ok, worst = True, None
    for ni in range(m, n + 1):
        mu = Fraction(2 ** (n - ni + 1), 2 ** (n - m))
        k = ni - m
        # mu <= 2 * 3^(-t k)  iff  3^(t k) <= 2 / mu
        if not _pow3_le(tt * k, 2 / mu):
            small_ok, worst = False, ni
    large_ok = _large_condition(a, tt, m, n)
    log_lhs = float(tt * (a * n - m)) * math.log(3)
    log_rhs = (n - m + 1) * math.log(2)
    return MassDistributionReport(m, n, a, tt, small_ok, large_ok, mass_threshold(a, tt, m), log_lhs, log_rhs, worst)


# -- net-measure bound -------------------------------------------------------


@dataclass(frozen=True)
class DiophantineBound:
    result: NetMeasureResult
    bound: float
    status: str  # pass | fail | inconclusive
    threshold: Optional[int]
    normalized: float

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def bound_holds(self) -> bool:
        """The inequality itself, whatever the threshold says."""
        return self.result.value >= self.bound * (1 - 1e-12)

    def to_json(self) -> dict:
        return {
            "dp_value": self.result.value,
            "bound": self.bound,
            "normalized": self.normalized,
            "status": self.status,
            "threshold": self.threshold,
            "frontier": self.result.frontier,
        }


def diophantine_measure_bound(
    cylinder: Sequence[int], alpha: Number, n: int, t: Number, budget: Union[int, str] = "auto"
) -> DiophantineBound:
    """M_inf^t(C & K & E_n) from the stage antichain, against |C|^t / 2.

    Below the mass-distribution threshold a failure at a subcritical t is
    reported as inconclusive rather than as a counterexample.
    """
    system = _cantor()
    word = _cylinder_word(cylinder)
    a, tt = _alpha(alpha), to_fraction(t)
    stage = w_alpha_stage(a, n, within=word)
    if budget == "auto" and not float(tt) < math.log(2) / math.log(3):
        budget = 2
    res = net_measure(system, float(tt), word, stage, budget=budget, extract_cover=False)
    d = system.cylinder_diameter(word).d_hi
    norm = float(d) ** float(tt)
    bound = 0.5 * norm
    threshold = mass_threshold(a, tt, len(word)) if _pow3_le(tt, Fraction(2)) else None
    if res.value >= bound * (1 - 1e-12):
        status = "pass"
    elif threshold is not None and n >= threshold:
        status = "fail"
    elif float(tt) > critical_exponent(a):
        # supercritical: failure is the predicted behaviour, not a gap in the hypotheses
        status = "fail"
    else:
        status = "inconclusive"
    return DiophantineBound(res, bound, status, threshold, res.value / norm)


@dataclass(frozen=True)
class SweepResult:
    alpha: Fraction
    cylinder: tuple
    rows: tuple  # (t, n, normalized value, status)
    transition: Optional[float]
    theory: float

    def to_json(self) -> dict:
        return {
            "alpha": fraction_str(self.alpha),
            "cylinder": list(self.cylinder),
            "rows": [{"t": t, "n": n, "normalized": v, "status": s} for t, n, v, s in self.rows],
            "transition": self.transition,
            "theory": self.theory,
        }


def critical_exponent_sweep(
    alpha: Number, t_grid: Sequence[float], n_grid: Sequence[int], cylinder: Sequence[int] = (0, 2)
) -> SweepResult:
    """Normalized DP values over a (t, n) grid; t counts as supercritical
    when the value is still falling between the two largest n."""
    a = _alpha(alpha)
    t_grid = sorted(float(t) for t in t_grid)
    n_grid = sorted(int(n) for n in n_grid)
    if len(n_grid) < 2:
        raise InvalidInput("need at least two levels to read a trend")
    cells = [(t, n) for t in t_grid for n in n_grid]

    def one(cell):
        t, n = cell
        b = diophantine_measure_bound(cylinder, a, n, repr(t), budget=3)
        return (t, n, b.normalized, b.status)

    rows = parallel_map(one, cells)
    falling = {}
    for t in t_grid:
        vals = [v for tt, _, v, _ in rows if tt == t]
        falling[t] = vals[-1] < vals[-2] * (1 - 1e-9)
    transition = None
    for lo, hi in zip(t_grid, t_grid[1:]):
        if not falling[lo] and falling[hi]:
            transition = 0.5 * (lo + hi)
            break
    return SweepResult(a, tuple(cylinder), tuple(rows), transition, critical_exponent(a))
