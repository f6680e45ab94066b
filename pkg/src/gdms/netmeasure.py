"""Net outer measures of finite unions of cylinders by tree dynamic
programming, plus an exhaustive cover oracle for testing.

A target is anything with the automaton protocol ``start()``,
``step(state, symbol)`` and ``depth``: states summarize the word read so
far, :data:`ACCEPT` means the whole cylinder lies in the target and
:data:`REJECT` that it misses it. Explicit :class:`CylinderSet` targets
become tries; Birkhoff level sets (see :mod:`gdms.classes`) are
automata over partial sums, which keeps averaging lengths in the
hundreds tractable.

The recursion works with normalized values U(C) = V(C) / d(C)^t so
affine systems only need one memo entry per (state, last symbol,
generation).
"""

from __future__ import annotations

import random
import sys
from contextlib import nullcontext
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Protocol, Sequence, Union

import mpmath
import numpy as np

from .errors import InvalidBudget, InvalidInput, InvariantViolation, ResourceLimit
from .geometry import GdmsSystem
from .rational import to_fraction
from .symbolic import CylinderSet, Word, as_word

MP_DPS = 40
FLOAT_TIE = 1e-12
MP_TIE = mpmath.mpf(10) ** -30
COVER_CAP = 200_000
ORACLE_CAP = 2_000_000


class _Sentinel:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name

    def __reduce__(self):
        return self.name


ACCEPT = _Sentinel("ACCEPT")
REJECT = _Sentinel("REJECT")


class Target(Protocol):
    depth: int

    def start(self): ...

    def step(self, state, symbol: int): ...


class WholeTarget:
    """The whole space: every cylinder is contained."""

    depth = 0
    explicit = True

    def start(self):
        return ACCEPT

    def step(self, state, symbol):
        return state

    def __repr__(self):
        return "WHOLE"


WHOLE = WholeTarget()


class CylinderSetTarget:
    """Trie automaton of a :class:`CylinderSet`."""

    explicit = True

    def __init__(self, cylinders: CylinderSet):
        self.cylinders = cylinders
        self.depth = cylinders.max_generation
        self._children: list[dict] = [{}]
        self._leaf: list[bool] = [False]
        for w in cylinders:
            node = 0
            for sym in w:
                nxt = self._children[node].get(sym)
                if nxt is None:
                    nxt = len(self._children)
                    self._children[node][sym] = nxt
                    self._children.append({})
                    self._leaf.append(False)
                node = nxt
            self._leaf[node] = True

    def _resolve(self, node):
        return ACCEPT if self._leaf[node] else node

    def start(self):
        if not self.cylinders:
            return REJECT
        return self._resolve(0)

    def step(self, state, symbol):
        if state is ACCEPT or state is REJECT:
            return state
        nxt = self._children[state].get(symbol)
        return REJECT if nxt is None else self._resolve(nxt)

    def __repr__(self):
        return f"CylinderSetTarget({len(self.cylinders)} words)"


class IntersectionTarget:
    """Product automaton of several targets."""

    def __init__(self, parts: Sequence):
        self.parts = tuple(as_target(p) for p in parts)
        self.depth = max(p.depth for p in self.parts)
        self.explicit = all(getattr(p, "explicit", False) for p in self.parts)

    def _combine(self, states):
        if any(s is REJECT for s in states):
            return REJECT
        if all(s is ACCEPT for s in states):
            return ACCEPT
        return tuple(states)

    def start(self):
        return self._combine([p.start() for p in self.parts])

    def step(self, state, symbol):
        if state is ACCEPT or state is REJECT:
            return state
        return self._combine([p.step(s, symbol) for p, s in zip(self.parts, state)])


def as_target(obj) -> Target:
    if obj is None or obj is WHOLE or (isinstance(obj, str) and obj.upper() == "WHOLE"):
        return WHOLE
    if isinstance(obj, CylinderSet):
        return CylinderSetTarget(obj)
    if hasattr(obj, "start") and hasattr(obj, "step"):
        return obj
    if isinstance(obj, (list, tuple)):
        return CylinderSetTarget(CylinderSet(obj))
    raise InvalidInput(f"cannot use {obj!r} as a target")


def target_state(target: Target, w: Sequence[int]):
    state = target.start()
    for sym in w:
        if state is REJECT:
            break
        state = target.step(state, sym)
    return state


# -- results -----------------------------------------------------------------


@dataclass(frozen=True)
class NetMeasureResult:
    t: float
    root: Word
    lower: float
    upper: float
    cover: Optional[CylinderSet]
    budget: int
    frontier: int
    m: int = 1
    certified: bool = True
    budget_stable: Optional[bool] = None
    exact_value: Optional[object] = None

    @property
    def value(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "root": list(self.root),
            "lower": repr(self.lower),
            "upper": repr(self.upper),
            "exact_value": None if self.exact_value is None else str(self.exact_value),
            "cover": None if self.cover is None else self.cover.to_json()["words"],
            "budget": self.budget,
            "frontier": self.frontier,
            "m": self.m,
            "certified": self.certified,
            "budget_stable": self.budget_stable,
        }


# -- solver ------------------------------------------------------------------


def _mp_fraction(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


class NetMeasureSolver:
    """Memoized net-measure recursion for one (system, target, t, m).

    ``budget`` is the number of generations allowed below the deeper of
    the target depth and the root; ``"auto"`` uses m(t) + 2 and also checks
    that one more generation changes nothing. ``frontier`` overrides the
    budget with an absolute depth. ``precision`` is ``"float"``, ``"mp"``
    (about 40 digits), or ``"auto"`` (mp for explicit targets).
    """

    def __init__(
        self,
        system: GdmsSystem,
        target=WHOLE,
        t: float = 0.5,
        m: int = 1,
        budget: Union[int, str] = "auto",
        precision: str = "auto",
        frontier: Optional[int] = None,
    ):
        if m < 1:
            raise InvalidInput("grid step m must be >= 1")
        if not t >= 0:
            raise InvalidInput("exponent t must be non-negative")
        self.system = system
        self.target = as_target(target)
        self.t = t
        self.m = m
        self.fixed_frontier = frontier
        self.auto_budget = budget == "auto" and frontier is None
        if frontier is not None:
            # an explicit frontier replaces the budget
            self.budget = None
        elif self.auto_budget:
            from .thermo import positivity_generation

            try:
                rep = positivity_generation(system, t)
            except InvalidInput as exc:
                raise InvalidBudget(f"automatic budget needs t below the dimension: {exc}") from None
            if not rep.found:
                raise InvalidBudget(f"m(t) not found up to generation {rep.deficient_n}")
            self.budget = rep.m + 2
        else:
            try:
                self.budget = int(budget)
            except (TypeError, ValueError):
                raise InvalidBudget(f"budget must be 'auto' or an integer, got {budget!r}") from None
            if self.budget != budget or self.budget < 0:
                raise InvalidBudget(f"budget must be a non-negative integer, got {budget!r}")
        if precision == "auto":
            precision = "mp" if getattr(self.target, "explicit", False) else "float"
        if precision not in ("float", "mp"):
            raise InvalidInput(f"unknown precision {precision!r}")
        self.precision = precision
        self._memos: dict = {}
        self._d_cache: dict = {}
        self._setup_factors()

    # factors ------------------------------------------------------------

    def _num(self, x):
        if self.precision == "mp":
            return _mp_fraction(x) if isinstance(x, Fraction) else mpmath.mpf(x)
        return float(x)

    def _pow(self, x):
        """x ** t in the working precision."""
        if self.precision == "mp":
            with mpmath.workdps(MP_DPS):
                return self._num(x) ** self._t_num
        return float(x) ** self.t

    def _setup_factors(self):
        if self.precision == "mp":
            with mpmath.workdps(MP_DPS):
                self._t_num = _mp_fraction(to_fraction(self.t))
        self.one = self._num(1)
        self.zero = self._num(0)
        self.tie = MP_TIE if self.precision == "mp" else FLOAT_TIE
        sysm = self.system
        if sysm.affine:
            self.factors = {None: {j: self._pow(f.ratio) for j, f in enumerate(sysm.maps)}}
            for i in range(sysm.q):
                self.factors[i] = {j: self._pow(sysm.edges[(i, j)].ratio) for j in sysm.subshift.successors(i)}

    def _diam(self, w: Word, side: str):
        key = (w, side)
        if key not in self._d_cache:
            if not w:
                d = self.system.space.diameter
                self._d_cache[key] = self._num(d) if side == "lo" else self._num(d)
            else:
                g = self.system.cylinder_diameter(w)
                self._d_cache[key] = self._num(g.d_lo if side == "lo" else g.d_hi)
        return self._d_cache[key]

    # frontier -----------------------------------------------------------

    def frontier_for(self, root: Word, extra: int = 0) -> int:
        if self.fixed_frontier is not None:
            f = self.fixed_frontier + extra
            if f < max(self.target.depth, len(root)):
                raise InvalidBudget(
                    f"frontier {f} above the deepest target word ({self.target.depth}) or root"
                )
        else:
            f = max(self.target.depth, len(root)) + self.budget + extra
        return -(-f // self.m) * self.m

    # recursion ----------------------------------------------------------

    def _memo(self, frontier, side):
        return self._memos.setdefault((frontier, side), {})

    def _u_affine(self, memo, frontier, state, last, gen):
        key = (state, last, gen)
        hit = memo.get(key)
        if hit is not None:
            return hit[0]
        self_ok = gen > 0 and gen % self.m == 0
        if gen >= frontier and self_ok:
            memo[key] = (self.one, True)
            return self.one
        total = self.zero
        fac = self.factors[last]
        target = self.target
        for j, f in fac.items():
            cs = target.step(state, j)
            if cs is REJECT:
                continue
            total += f * self._u_affine(memo, frontier, cs, j, gen + 1)
        if self_ok and not total < self.one - self.tie:
            out = (self.one, True)
        else:
            out = (total, False)
        memo[key] = out
        return out[0]

    def _u_word(self, memo, frontier, state, w, side):
        gen = len(w)
        key = (state, w)
        hit = memo.get(key)
        if hit is not None:
            return hit[0]
        self_ok = gen > 0 and gen % self.m == 0
        if gen >= frontier and self_ok:
            memo[key] = (self.one, True)
            return self.one
        d_parent = self._diam(w, side)
        total = self.zero
        for c in self.system.subshift.children(w):
            cs = self.target.step(state, c[-1])
            if cs is REJECT:
                continue
            ratio = self._diam(c, side) / d_parent
            f = ratio**self._t_num if self.precision == "mp" else ratio**self.t
            total += f * self._u_word(memo, frontier, cs, c, side)
        if self_ok and not total < self.one - self.tie:
            out = (self.one, True)
        else:
            out = (total, False)
        memo[key] = out
        return out[0]

    def _run(self, root: Word, frontier: int, side: str):
        state = target_state(self.target, root)
        if state is REJECT:
            return self.zero, state
        if len(root) % self.m:
            raise InvalidInput(f"root generation {len(root)} is not a multiple of m={self.m}")
        need = 4 * (frontier - len(root)) + 1000
        if sys.getrecursionlimit() < need:
            sys.setrecursionlimit(need)
        memo = self._memo(frontier, side)
        if self.system.affine:
            u = self._u_affine(memo, frontier, state, root[-1] if root else None, len(root))
        else:
            u = self._u_word(memo, frontier, state, root, side)
        return u, state

    def normalized(self, root: Sequence[int] = (), side: str = "lo"):
        """U(root) = V(root) / d(root)^t at the default frontier."""
        root = self.system.subshift.require_admissible(root)
        ctx = mpmath.workdps(MP_DPS) if self.precision == "mp" else nullcontext()
        with ctx:
            u, _ = self._run(root, self.frontier_for(root), side)
        return u

    def _extract(self, root: Word, state, frontier, side) -> Optional[CylinderSet]:
        memo = self._memo(frontier, side)
        out: list[Word] = []
        stack = [(root, state)]
        while stack:
            w, st = stack.pop()
            key = (st, w[-1] if w else None, len(w)) if self.system.affine else (st, w)
            entry = memo.get(key)
            if entry is None:
                continue  # pragma: no cover
            if entry[1]:
                out.append(w)
                if len(out) > COVER_CAP:
                    return None
                continue
            for c in self.system.subshift.children(w):
                cs = self.target.step(st, c[-1])
                if cs is not REJECT:
                    stack.append((c, cs))
        return CylinderSet(out)

    def solve(self, root: Sequence[int] = (), extract_cover: bool = True) -> NetMeasureResult:
        root = self.system.subshift.require_admissible(root)
        frontier = self.frontier_for(root)
        ctx = mpmath.workdps(MP_DPS) if self.precision == "mp" else nullcontext()
        with ctx:
            sides = ("lo",) if self.system.affine else ("lo", "hi")
            vals = []
            cover = None
            for side in sides:
                u, state = self._run(root, frontier, side)
                vals.append(u * self._diam(root, side) ** (self._t_num if self.precision == "mp" else self.t))
                if extract_cover and side == "lo" and state is not REJECT:
                    cover = self._extract(root, state, frontier, side)
                elif state is REJECT:
                    cover = CylinderSet()
            stable = None
            if self.auto_budget:
                u2, _ = self._run(root, self.frontier_for(root, extra=self.m), sides[0])
                u1, _ = self._run(root, frontier, sides[0])
                stable = bool(abs(u2 - u1) <= 1e-9 * max(abs(u1), 1e-300))
            exact = vals[0] if self.precision == "mp" and self.system.affine else None
            lo, hi = float(vals[0]), float(vals[-1])
        return NetMeasureResult(
            self.t,
            root,
            min(lo, hi),
            max(lo, hi),
            cover,
            self.budget if self.budget is not None else frontier - max(self.target.depth, len(root)),
            frontier,
            self.m,
            self.system.certified,
            stable,
            exact,
        )


def net_measure(
    system: GdmsSystem,
    t: float,
    root: Sequence[int] = (),
    target=WHOLE,
    budget: Union[int, str] = "auto",
    precision: str = "auto",
    frontier: Optional[int] = None,
    extract_cover: bool = True,
) -> NetMeasureResult:
    """M_inf^t of ``target`` inside the cylinder of ``root``.

    V(C) = 0 when C misses the target, d(C)^t at the frontier, otherwise
    min(d(C)^t, sum of children); ties keep the self-cover.
    """
    solver = NetMeasureSolver(system, target, t, 1, budget, precision, frontier)
    return solver.solve(as_word(root), extract_cover)


def grid_net_measure(
    system: GdmsSystem,
    t: float,
    m: int,
    root: Sequence[int] = (),
    target=WHOLE,
    budget: Union[int, str] = "auto",
    precision: str = "auto",
    frontier: Optional[int] = None,
    extract_cover: bool = True,
) -> NetMeasureResult:
    """N_inf^{m,t}: as :func:`net_measure` with covers by cylinders of
    generations divisible by ``m`` only."""
    solver = NetMeasureSolver(system, target, t, m, budget, precision, frontier)
    return solver.solve(as_word(root), extract_cover)


# -- derived checks ----------------------------------------------------------


@dataclass(frozen=True)
class EquivalenceReport:
    t: float
    m: int
    c1: float
    samples: int
    worst_root: Word
    worst_target: Optional[CylinderSet]
    certified: bool = False

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "m": self.m,
            "c1": self.c1,
            "samples": self.samples,
            "worst_root": list(self.worst_root),
            "worst_target": None if self.worst_target is None else self.worst_target.to_json()["words"],
            "certified": self.certified,
        }


def random_target(system: GdmsSystem, root: Word, depth: int, rng: random.Random, density: float = 0.5) -> CylinderSet:
    """Random antichain below ``root`` with words of relative depth 1..depth."""
    out = []

    def walk(w, rem):
        if rem == 0 or rng.random() < 0.25:
            if rng.random() < density:
                out.append(w)
            return
        for c in system.subshift.children(w):
            walk(c, rem - 1)

    for c in system.subshift.children(root):
        walk(c, depth - 1)
    return CylinderSet(out)


def equivalence_constant(
    system: GdmsSystem, t: float, m: int, depth: int = 4, samples: int = 50, seed: int = 0
) -> EquivalenceReport:
    """Empirical c_1 with M <= N <= c_1 M over random targets below
    generation-m roots."""
    rng = random.Random(seed)
    roots = system.subshift.enumerate_cylinders(m)
    worst, worst_root, worst_target = 1.0, roots[0], None
    for k in range(samples):
        root = roots[k % len(roots)]
        target = WHOLE if k < len(roots) else random_target(system, root, depth, rng)
        if isinstance(target, CylinderSet) and not target:
            continue
        frontier = len(root) + depth
        M = net_measure(system, t, root, target, frontier=frontier, extract_cover=False).value
        N = grid_net_measure(system, t, m, root, target, frontier=frontier, extract_cover=False).value
        if N < M * (1 - 1e-12):
            raise InvariantViolation(f"grid measure {N} below net measure {M} at root {root}")
        ratio = N / M if M > 0 else 1.0
        if ratio > worst:
            worst, worst_root, worst_target = ratio, root, target if isinstance(target, CylinderSet) else None
    return EquivalenceReport(t, m, worst, samples, worst_root, worst_target)


@dataclass(frozen=True)
class OpenSetCheck:
    c: float
    hypothesis: bool
    conclusion: bool
    min_ratio: float
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        """The implication hypothesis => conclusion."""
        return (not self.hypothesis) or self.conclusion

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        return {
            "c": self.c,
            "hypothesis": self.hypothesis,
            "conclusion": self.conclusion,
            "min_ratio": self.min_ratio,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
        }


def open_set_inequality_check(
    system: GdmsSystem, F: CylinderSet, U: CylinderSet, t: float, c: float, budget: Union[int, str] = "auto"
) -> OpenSetCheck:
    """If M(F & C) >= c M(C) for every cylinder C of ``U`` then
    M(F & U) >= c M(U)."""
    ratios = []
    for w in U:
        whole = net_measure(system, t, w, WHOLE, budget, extract_cover=False).value
        part = net_measure(system, t, w, F.restrict(w), budget, extract_cover=False).value
        ratios.append(part / whole)
    min_ratio = min(ratios, default=1.0)
    hypothesis = all(r >= c * (1 - 1e-12) for r in ratios)
    lhs = net_measure(system, t, (), F & U, budget, extract_cover=False).value
    rhs = c * net_measure(system, t, (), U, budget, extract_cover=False).value
    return OpenSetCheck(c, hypothesis, lhs >= rhs * (1 - 1e-12), min_ratio, lhs, rhs)


# -- exhaustive oracle -------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    value: object
    cover: CylinderSet
    n_covers: int

    def __float__(self):
        return float(self.value)


class CoverOracle:
    """All antichain covers of the subtree of ``root`` down to
    ``max_depth`` further generations, as arrays of (cost, frontier mask)."""

    def __init__(self, system: GdmsSystem, t: float, root: Sequence[int], max_depth: int, cap: int = ORACLE_CAP):
        if max_depth < 0:
            raise InvalidInput("max_depth must be >= 0")
        self.system = system
        self.t = t
        self.root = system.subshift.require_admissible(root)
        if not self.root:
            raise InvalidInput("oracle root must have generation >= 1")
        self.max_depth = max_depth
        self.cap = cap
        self.frontier_words: list[Word] = []
        self._tree = self._build(self.root, max_depth)
        self.costs, self.masks = self._tree["costs"], self._tree["masks"]
        with mpmath.workdps(MP_DPS):
            self._t_mp = _mp_fraction(to_fraction(t))

    def _build(self, w: Word, rem: int) -> dict:
        d = float(self.system.cylinder_diameter(w).d_hi) ** self.t
        if rem == 0:
            bit = np.uint64(1) << np.uint64(len(self.frontier_words))
            self.frontier_words.append(w)
            if len(self.frontier_words) > 64:
                raise ResourceLimit("oracle supports at most 64 frontier words")
            return {"word": w, "kids": [], "costs": np.array([d, 0.0]), "masks": np.array([bit, 0], dtype=np.uint64)}
        kids = [self._build(c, rem - 1) for c in self.system.subshift.children(w)]
        costs, masks = np.zeros(1), np.zeros(1, dtype=np.uint64)
        for k in kids:
            if costs.size * k["costs"].size > self.cap:
                raise ResourceLimit(f"more than {self.cap} covers to enumerate")
            costs = (costs[:, None] + k["costs"][None, :]).ravel()
            masks = (masks[:, None] | k["masks"][None, :]).ravel()
        full = np.bitwise_or.reduce(masks)
        return {
            "word": w,
            "kids": kids,
            "costs": np.concatenate([[d], costs]),
            "masks": np.concatenate([np.array([full], dtype=np.uint64), masks]),
        }

    @property
    def n_covers(self) -> int:
        return int(self.costs.size)

    def target_mask(self, target) -> np.uint64:
        tgt = as_target(target)
        mask = np.uint64(0)
        for k, w in enumerate(self.frontier_words):
            if target_state(tgt, w) is not REJECT:
                mask |= np.uint64(1) << np.uint64(k)
        return mask

    def _decode(self, node: dict, idx: int) -> list[Word]:
        if idx == 0:
            return [node["word"]]
        if not node["kids"]:
            return []
        idx -= 1
        sizes = [k["costs"].size for k in node["kids"]]
        out = []
        for k, size in reversed(list(zip(node["kids"], sizes))):
            idx, r = divmod(idx, size)
            out = self._decode(k, r) + out
        return out

    def value(self, target) -> OracleResult:
        T = self.target_mask(target)
        feasible = (self.masks & T) == T
        costs = np.where(feasible, self.costs, np.inf)
        best = costs.min()
        near = np.flatnonzero(costs <= best * (1 + 1e-9) + 1e-15)
        with mpmath.workdps(MP_DPS):
            scored = []
            for idx in near:
                words = self._decode(self._tree, int(idx))
                v = mpmath.fsum(
                    _mp_fraction(self.system.cylinder_diameter(w).d_hi) ** self._t_mp for w in words
                ) if words else mpmath.mpf(0)
                scored.append((v, len(words), words))
            v, _, words = min(scored, key=lambda x: (x[0], x[1]))
        return OracleResult(v, CylinderSet(words), self.n_covers)


def brute_force_cover_oracle(
    system: GdmsSystem, t: float, root: Sequence[int], target=WHOLE, max_depth: int = 2, cap: int = ORACLE_CAP
) -> OracleResult:
    """Exact minimum of sum d(C)^t over every antichain cover of the target
    inside ``root`` using words at most ``max_depth`` generations deeper."""
    if not system.affine:
        raise InvalidInput("the cover oracle needs exact (affine) diameters")
    return CoverOracle(system, t, root, max_depth, cap).value(target)
