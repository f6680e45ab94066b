"""Birkhoff-average level sets as cylinder targets, finite-scale class
membership scans, intersection surrogates and the level-set spectrum of
locally constant functions."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq

from ._parallel import parallel_map
from .errors import InvalidInput, ResourceLimit, UnsupportedMethod
from .geometry import GdmsSystem
from .netmeasure import ACCEPT, REJECT, WHOLE, IntersectionTarget, NetMeasureSolver
from .rational import to_fraction
from .symbolic import CylinderSet, Subshift, Word, as_word
from .thermo import bowen_dimension

DEFAULT_SCHEDULE = (25, 50, 100, 200)


# -- functions and level sets ------------------------------------------------


def _parse_key(key, k: int) -> Word:
    if isinstance(key, (tuple, list)):
        return as_word(key)
    key = str(key).strip()
    if "," in key:
        return tuple(int(x) for x in key.split(","))
    if len(key) == k:
        return tuple(int(ch) for ch in key)
    raise InvalidInput(f"cannot read table key {key!r} as a word of length {k}")


@dataclass(frozen=True)
class LocallyConstantFunction:
    """g(i) = table[i_1 ... i_k]; values are exact rationals."""

    k: int
    table: dict

    def __post_init__(self):
        if self.k < 1:
            raise InvalidInput("window length k must be >= 1")
        clean = {}
        for key, v in self.table.items():
            w = _parse_key(key, self.k)
            if len(w) != self.k:
                raise InvalidInput(f"table word {list(w)} does not have length {self.k}")
            clean[w] = to_fraction(v)
        if not clean:
            raise InvalidInput("empty function table")
        object.__setattr__(self, "table", clean)

    @classmethod
    def from_json(cls, data: dict) -> "LocallyConstantFunction":
        try:
            return cls(int(data["k"]), dict(data["table"]))
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"function JSON needs 'k' and 'table': {exc}") from None

    @classmethod
    def indicator(cls, subshift: Subshift, word: Sequence[int]) -> "LocallyConstantFunction":
        """Indicator of the cylinder of ``word``; its average is the word frequency."""
        word = subshift.require_admissible(word)
        k = len(word)
        table = {w: Fraction(int(w == word)) for w in subshift.enumerate_cylinders(k)}
        return cls(k, table)

    def to_json(self) -> dict:
        return {"k": self.k, "table": {",".join(map(str, w)): str(v) for w, v in sorted(self.table.items())}}

    def check(self, subshift: Subshift) -> "LocallyConstantFunction":
        words = set(subshift.enumerate_cylinders(self.k))
        extra = set(self.table) - words
        if extra:
            raise InvalidInput(f"table has inadmissible words {sorted(map(list, extra))}")
        missing = words - set(self.table)
        if missing:
            raise InvalidInput(f"table misses admissible words {sorted(map(list, missing))}")
        return self

    def __call__(self, w: Sequence[int]) -> Fraction:
        return self.table[tuple(w[: self.k])]

    @property
    def min(self) -> Fraction:
        return min(self.table.values())

    @property
    def max(self) -> Fraction:
        return max(self.table.values())

    @property
    def is_constant(self) -> bool:
        return self.min == self.max

    def average(self, w: Sequence[int], M: int) -> Fraction:
        if len(w) < M + self.k - 1:
            raise InvalidInput("word too short for the averaging length")
        return sum(self.table[tuple(w[i : i + self.k])] for i in range(M)) / M

    def default_eps(self) -> Fraction:
        return (self.max - self.min) / 10


@dataclass(frozen=True)
class BirkhoffLevelSpec:
    """G_g(p, M, eps): sequences whose M-step average of g is in (p - eps, p + eps)."""

    g: LocallyConstantFunction
    p: Fraction
    eps: Fraction
    M: int

    def __post_init__(self):
        object.__setattr__(self, "p", to_fraction(self.p))
        object.__setattr__(self, "eps", to_fraction(self.eps))
        if self.M < 1:
            raise InvalidInput("averaging length M must be >= 1")
        if not self.eps > 0:
            raise InvalidInput("tolerance eps must be > 0")

    @property
    def generation(self) -> int:
        return self.M + self.g.k - 1

    def contains(self, w: Sequence[int]) -> bool:
        return abs(self.g.average(w, self.M) - self.p) < self.eps


class BirkhoffTarget:
    """Automaton for G_g(p, M, eps).

    State ``(n, last k-1 symbols, integer partial sum)``; it resolves to
    ACCEPT or REJECT as soon as the remaining windows can no longer move
    the final sum across the interval ends.
    """

    explicit = False

    def __init__(self, spec: BirkhoffLevelSpec):
        self.spec = spec
        g = spec.g
        self.k = g.k
        self.M = spec.M
        self.depth = spec.generation
        scale = math.lcm(*(v.denominator for v in g.table.values()))
        self.values = {w: int(v * scale) for w, v in g.table.items()}
        self.lo = spec.M * (spec.p - spec.eps) * scale
        self.hi = spec.M * (spec.p + spec.eps) * scale
        self.g_min = min(self.values.values())
        self.g_max = max(self.values.values())

    def _resolve(self, n, suffix, total):
        done = max(0, min(n - self.k + 1, self.M))
        rem = self.M - done
        lo = total + rem * self.g_min
        hi = total + rem * self.g_max
        if self.lo < lo and hi < self.hi:
            return ACCEPT
        if hi <= self.lo or lo >= self.hi:
            return REJECT
        return (n, suffix, total)

    def start(self):
        return self._resolve(0, (), 0)

    def step(self, state, symbol):
        if state is ACCEPT or state is REJECT:
            return state
        n, suffix, total = state
        window = suffix + (symbol,)
        if len(window) == self.k:
            if n - self.k + 1 < self.M:
                total += self.values[window]
            window = window[1:]
        return self._resolve(n + 1, window, total)


def birkhoff_set(system: Union[GdmsSystem, Subshift], spec: BirkhoffLevelSpec) -> CylinderSet:
    """All (M + k - 1)-cylinders on which the M-step average lies in
    (p - eps, p + eps)."""
    subshift = system.subshift if isinstance(system, GdmsSystem) else system
    spec.g.check(subshift)
    target = BirkhoffTarget(spec)
    n = spec.generation
    out: list[Word] = []
    stack = [((), target.start())]
    while stack:
        w, st = stack.pop()
        if st is REJECT:
            continue
        if len(w) == n:
            out.append(w)
            if len(out) > subshift.cap:
                raise ResourceLimit(f"level set has more than {subshift.cap} cylinders")
            continue
        for c in reversed(subshift.children(w)):
            stack.append((c, target.step(st, c[-1])))
    return CylinderSet(out)


# -- scans -------------------------------------------------------------------


def scan_cylinders(system: GdmsSystem, m: int, gen_max: int) -> list[Word]:
    out = []
    for n in range(m, gen_max + 1, m):
        out.extend(system.subshift.enumerate_cylinders(n))
    return out


@dataclass(frozen=True)
class ClassTestReport:
    t: float
    m: int
    schedule: tuple
    rows: tuple  # (cylinder, M, ratio)
    c_min: float
    monotone: bool
    floor: Optional[float]
    passed: bool
    budget: int

    def ratios_at(self, M: int) -> dict:
        return {w: r for w, MM, r in self.rows if MM == M}

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "m": self.m,
            "schedule": list(self.schedule),
            "rows": [{"cylinder": list(w), "M": M, "ratio": r} for w, M, r in self.rows],
            "c_min": self.c_min,
            "monotone_within_5pct": self.monotone,
            "floor": self.floor,
            "passed": self.passed,
            "budget": self.budget,
        }


def _ratio_table(system, target_for, t, m, cylinders, schedule, budget):
    whole = NetMeasureSolver(system, WHOLE, t, m, budget, "float")

    def one(M):
        solver = NetMeasureSolver(system, target_for(M), t, m, budget, "float")
        out = []
        for w in cylinders:
            num = float(solver.normalized(w))
            den = float(whole.normalized(w))
            out.append((w, M, num / den if den > 0 else 0.0))
        return out

    rows = [r for block in parallel_map(one, schedule) for r in block]
    return rows, whole.budget


def _spec(system, g, p, eps, M) -> BirkhoffLevelSpec:
    g.check(system.subshift)
    eps = g.default_eps() if eps is None else eps
    return BirkhoffLevelSpec(g, p, eps, M)


def class_inequality_scan(
    system: GdmsSystem,
    g: LocallyConstantFunction,
    p,
    eps=None,
    t: float = 0.5,
    m: int = 1,
    schedule: Sequence[int] = DEFAULT_SCHEDULE,
    gen_max: int = 3,
    floor: Optional[float] = None,
    budget: Union[int, str] = "auto",
) -> ClassTestReport:
    """N^{m,t}(C & G_g(p, M, eps)) / N^{m,t}(C) for every cylinder C of
    generation jm <= gen_max and every M in the schedule."""
    schedule = tuple(int(M) for M in schedule)
    if list(schedule) != sorted(set(schedule)):
        raise InvalidInput("M schedule must be strictly increasing")
    specs = {M: _spec(system, g, p, eps, M) for M in schedule}
    cylinders = scan_cylinders(system, m, gen_max)
    rows, used = _ratio_table(system, lambda M: BirkhoffTarget(specs[M]), t, m, cylinders, schedule, budget)
    final = [r for _, M, r in rows if M == schedule[-1]]
    c_min = min(final)
    monotone = True
    for w in cylinders:
        seq = [r for ww, _, r in rows if ww == w]
        if any(b < a * 0.95 for a, b in zip(seq, seq[1:])):
            monotone = False
    passed = c_min > 0 if floor is None else c_min >= floor
    return ClassTestReport(t, m, schedule, tuple(rows), c_min, monotone, floor, passed, used)


@dataclass(frozen=True)
class MembershipVerdict:
    holds: bool
    c: float
    per_cylinder: dict
    note: str = (
        "finite hypothesis of the nested-union criterion; membership of the "
        "level set itself is an asymptotic consequence and is not verified"
    )

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "c": self.c,
            "per_cylinder": {",".join(map(str, w)): v for w, v in self.per_cylinder.items()},
            "note": self.note,
        }


def nested_union_membership(
    system: GdmsSystem,
    g: LocallyConstantFunction,
    p,
    eps=None,
    t: float = 0.5,
    schedule: Sequence[int] = DEFAULT_SCHEDULE,
    gen_max: int = 2,
    c: Optional[float] = None,
    budget: Union[int, str] = "auto",
) -> MembershipVerdict:
    """max over the schedule of M(F_M & C) / M(C) >= c for every scanned C."""
    rep = class_inequality_scan(system, g, p, eps, t, 1, schedule, gen_max, None, budget)
    best: dict = {}
    for w, _, r in rep.rows:
        best[w] = max(best.get(w, 0.0), r)
    found = min(best.values())
    holds = found > 0 if c is None else found >= c
    return MembershipVerdict(holds, found, best)


@dataclass(frozen=True)
class IntersectionReport:
    t: float
    nonempty: bool
    witness: Optional[Word]
    rows: tuple  # (cylinder, intersection ratio, single ratios)
    worst_factor: float
    budget: int

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "nonempty": self.nonempty,
            "witness": None if self.witness is None else list(self.witness),
            "rows": [
                {"cylinder": list(w), "intersection": r, "single": list(single)} for w, r, single in self.rows
            ],
            "worst_factor": self.worst_factor,
            "budget": self.budget,
        }


def find_witness(system: GdmsSystem, target, root: Word = ()) -> Optional[Word]:
    """Shortest-first DFS for a word whose cylinder lies inside ``target``."""
    state = target.start()
    for sym in root:
        state = target.step(state, sym)
    dead = set()
    limit = target.depth + 1

    def dfs(w, st):
        if st is ACCEPT:
            return w
        if st is REJECT or len(w) > limit:
            return None
        key = (st, w[-1] if w else None)
        if key in dead:
            return None
        for c in system.subshift.children(w):
            found = dfs(c, target.step(st, c[-1]))
            if found is not None:
                return found
        dead.add(key)
        return None

    if sys.getrecursionlimit() < 4 * limit + 1000:
        sys.setrecursionlimit(4 * limit + 1000)
    return dfs(as_word(root), state)


def intersection_surrogate(
    system: GdmsSystem,
    specs: Sequence[BirkhoffLevelSpec],
    t: float = 0.5,
    gen_max: int = 2,
    separation: int = 10,
    budget: Union[int, str] = "auto",
) -> IntersectionReport:
    """Ratios of M(C & G_1 & G_2 & ...) against the single-set ratios,
    for level sets at separated scales M_{i+1} >= separation * M_i."""
    specs = list(specs)
    if not specs:
        raise InvalidInput("need at least one level-set spec")
    for a, b in zip(specs, specs[1:]):
        if b.M < separation * a.M:
            raise InvalidInput(f"scales not separated: M={b.M} < {separation} * {a.M}")
    for s in specs:
        s.g.check(system.subshift)
    cylinders = scan_cylinders(system, 1, gen_max)
    singles = [BirkhoffTarget(s) for s in specs]
    inter = IntersectionTarget(singles)
    whole = NetMeasureSolver(system, WHOLE, t, 1, budget, "float")
    solvers = [NetMeasureSolver(system, tg, t, 1, budget, "float") for tg in singles]
    joint = NetMeasureSolver(system, inter, t, 1, budget, "float")
    rows = []
    worst = 1.0
    for w in cylinders:
        den = float(whole.normalized(w))
        single = tuple(float(s.normalized(w)) / den for s in solvers)
        r = float(joint.normalized(w)) / den
        rows.append((w, r, single))
        worst = max(worst, min(single) / r if r > 0 else math.inf)
    witness = find_witness(system, inter)
    return IntersectionReport(t, witness is not None, witness, tuple(rows), worst, whole.budget)


# -- level-set spectrum ------------------------------------------------------


@dataclass(frozen=True)
class LevelSetDimension:
    p: float
    value: float
    q: float
    boundary: bool = False

    def to_json(self) -> dict:
        return {"p": self.p, "dim": self.value, "q": self.q, "boundary": self.boundary}


class _Gibbs:
    """B(q, s)[i, j] = A[i, j] exp(q (g(ij) - p)) r_ij^s for a locally
    constant g of window <= 2 (window 1 reads the source symbol)."""

    def __init__(self, system: GdmsSystem, g: LocallyConstantFunction):
        if not system.affine:
            raise UnsupportedMethod("level-set dimension needs an affine system")
        if g.k > 2:
            raise UnsupportedMethod("level-set dimension supports windows k <= 2")
        g.check(system.subshift)
        q = system.q
        self.mask = system.subshift.matrix.astype(bool)
        self.G = np.zeros((q, q))
        self.logR = np.zeros((q, q))
        for (i, j), f in system.edges.items():
            self.G[i, j] = float(g((i,)) if g.k == 1 else g((i, j)))
            self.logR[i, j] = math.log(f.ratio)
        edges = [self.G[i, j] for i, j in zip(*np.nonzero(self.mask))]
        self.g_lo, self.g_hi = _mean_cycle_range(self.mask, self.G)
        self.span = max(edges) - min(edges)

    def matrix(self, q, s, p):
        B = np.zeros_like(self.G)
        E = q * (self.G - p) + s * self.logR
        B[self.mask] = np.exp(E[self.mask] - E[self.mask].max())
        return B, E[self.mask].max()

    def log_rho(self, q, s, p):
        B, shift = self.matrix(q, s, p)
        return math.log(_perron(B)[0]) + shift

    def slope(self, q, s, p):
        """d/dq log rho = (mean of g under the equilibrium state) - p."""
        B, _ = self.matrix(q, s, p)
        rho, u, v = _perron(B)
        D = B * (self.G - p)
        return float(u @ D @ v) / (rho * float(u @ v))

    def s_of_q(self, q, p):
        f = lambda s: self.log_rho(q, s, p)
        lo, hi = -1.0, 2.0
        while f(lo) < 0:
            lo *= 2
        while f(hi) > 0:
            hi *= 2
        return brentq(f, lo, hi, xtol=1e-14, rtol=1e-14)


def _perron(B: np.ndarray):
    vals, right = np.linalg.eig(B)
    k = int(np.argmax(vals.real))
    valsl, left = np.linalg.eig(B.T)
    kl = int(np.argmax(valsl.real))
    v = np.abs(right[:, k].real)
    u = np.abs(left[:, kl].real)
    return float(vals[k].real), u, v


def _mean_cycle_range(mask: np.ndarray, G: np.ndarray) -> tuple[float, float]:
    """Minimum and maximum mean weight of a cycle (Karp)."""

    def karp_min(W):
        n = W.shape[0]
        D = np.full((n + 1, n), np.inf)
        D[0, :] = 0.0
        for k in range(1, n + 1):
            for j in range(n):
                cand = [D[k - 1, i] + W[i, j] for i in range(n) if mask[i, j]]
                D[k, j] = min(cand) if cand else np.inf
        best = np.inf
        for v in range(n):
            if np.isinf(D[n, v]):
                continue
            worst = max((D[n, v] - D[k, v]) / (n - k) for k in range(n) if np.isfinite(D[k, v]))
            best = min(best, worst)
        return best

    return karp_min(G), -karp_min(-G)


def level_set_dimension(system: GdmsSystem, g: LocallyConstantFunction, p, tol: float = 1e-10) -> LevelSetDimension:
    """Dimension of {average of g -> p}: min over q of the root s(q) of
    P(q (g - p) + s phi) = 0, i.e. the equilibrium mean of g equals p."""
    gb = _Gibbs(system, g)
    p = float(to_fraction(p))
    lo_p, hi_p = gb.g_lo, gb.g_hi
    eps = 1e-12 * max(1.0, gb.span)
    if p < lo_p - eps or p > hi_p + eps:
        raise InvalidInput(f"p={p} outside the attainable range [{lo_p}, {hi_p}]")
    if gb.span == 0:
        return LevelSetDimension(p, bowen_dimension(system).value, 0.0)
    if abs(p - lo_p) <= eps or abs(p - hi_p) <= eps:
        sign = 1.0 if abs(p - hi_p) <= eps else -1.0
        prev = None
        qq = 10.0 / gb.span
        while True:
            cur = gb.s_of_q(sign * qq, p)
            if prev is not None and abs(prev - cur) < tol:
                return LevelSetDimension(p, max(cur, 0.0), float(sign * qq), True)
            prev, qq = cur, qq * 2
            if qq > 1e8:
                return LevelSetDimension(p, max(cur, 0.0), float(sign * qq), True)

    h = lambda q: gb.slope(q, gb.s_of_q(q, p), p)
    a, b = -1.0 / gb.span, 1.0 / gb.span
    while h(a) > 0:
        a *= 2
    while h(b) < 0:
        b *= 2
    q_star = brentq(h, a, b, xtol=1e-13, rtol=1e-13)
    return LevelSetDimension(p, gb.s_of_q(q_star, p), float(q_star))


def maximal_dimension_mean(system: GdmsSystem, g: LocallyConstantFunction) -> float:
    """Mean of g under the measure of maximal dimension."""
    gb = _Gibbs(system, g)
    s_star = bowen_dimension(system).value
    return gb.slope(0.0, s_star, 0.0)


def level_set_spectrum(system: GdmsSystem, g: LocallyConstantFunction, grid: int = 50) -> list[LevelSetDimension]:
    """Dimensions on ``grid`` equally spaced interior averages, plus the
    maximal-dimension mean so the peak is sampled exactly."""
    gb = _Gibbs(system, g)
    lo, hi = gb.g_lo, gb.g_hi
    ps = [lo + (hi - lo) * (k + 0.5) / grid for k in range(grid)]
    peak = maximal_dimension_mean(system, g)
    if all(abs(p - peak) > 1e-12 for p in ps):
        ps = sorted(ps + [peak])
    return [level_set_dimension(system, g, p) for p in ps]


@dataclass(frozen=True)
class DimensionPair:
    p1: float
    p2: float
    dim1: float
    dim2: float
    center: float
    s_star: float

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in ("p1", "p2", "dim1", "dim2", "center", "s_star")}


def full_dimension_pair(
    system: GdmsSystem, g: LocallyConstantFunction, delta: float, steps: int = 200
) -> DimensionPair:
    """Two averages on either side of the maximal-dimension mean whose level
    sets have dimension > s* - delta, as far apart as the grid allows."""
    if g.is_constant:
        raise InvalidInput("g is constant: every level set is everything or nothing")
    gb = _Gibbs(system, g)
    s_star = bowen_dimension(system).value
    centre = maximal_dimension_mean(system, g)
    reach = min(centre - gb.g_lo, gb.g_hi - centre)
    for k in range(steps):
        d = reach * (1 - (k + 1) / (steps + 1))
        p1, p2 = centre - d, centre + d
        d1 = level_set_dimension(system, g, p1).value
        d2 = level_set_dimension(system, g, p2).value
        if d1 > s_star - delta and d2 > s_star - delta:
            return DimensionPair(p1, p2, d1, d2, centre, s_star)
    raise InvalidInput(f"no pair within the grid: delta={delta} too small for {steps} steps")
