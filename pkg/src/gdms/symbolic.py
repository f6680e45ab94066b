"""Subshifts of finite type, admissible words and finite unions of cylinders.

Words are plain tuples of 0-based symbols. A cylinder is identified with
the word fixing its prefix; a finite union of cylinders is a
:class:`CylinderSet`, an antichain of words (no word prefixes another).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidInput, ResourceLimit

Word = tuple[int, ...]

DEFAULT_CYLINDER_CAP = 10**7


def as_word(symbols: Iterable[int]) -> Word:
    return tuple(int(s) for s in symbols)


def is_prefix(u: Word, v: Word) -> bool:
    return len(u) <= len(v) and v[: len(u)] == u


@dataclass(frozen=True)
class Subshift:
    """Transitive subshift of finite type on symbols ``0..q-1``.

    ``A[i][j]`` is true when the transition ``i -> j`` is allowed. Rows and
    columns must be non-empty and the transition graph strongly connected;
    both are checked here so every downstream routine may assume them.
    """

    q: int
    A: tuple[tuple[bool, ...], ...]
    cap: int = field(default=DEFAULT_CYLINDER_CAP, compare=False)

    def __post_init__(self):
        q = self.q
        if not isinstance(q, int) or q < 1:
            raise InvalidInput(f"alphabet size must be a positive integer, got {q!r}")
        rows = tuple(tuple(bool(x) for x in row) for row in self.A)
        if len(rows) != q or any(len(r) != q for r in rows):
            raise InvalidInput(f"transition matrix must be {q}x{q}")
        object.__setattr__(self, "A", rows)
        for i in range(q):
            if not any(rows[i]):
                raise InvalidInput(f"row {i} of the transition matrix is empty")
            if not any(rows[j][i] for j in range(q)):
                raise InvalidInput(f"column {i} of the transition matrix is empty")
        if not self._strongly_connected():
            raise InvalidInput("transition graph is not strongly connected (subshift not transitive)")

    @classmethod
    def full(cls, q: int) -> "Subshift":
        return cls(q, tuple(tuple(True for _ in range(q)) for _ in range(q)))

    @classmethod
    def from_matrix(cls, A: Sequence[Sequence[int]], cap: int = DEFAULT_CYLINDER_CAP) -> "Subshift":
        return cls(len(A), tuple(tuple(bool(x) for x in row) for row in A), cap)

    def to_json(self) -> dict:
        return {"q": self.q, "A": [[int(x) for x in row] for row in self.A]}

    def _reach(self, start: int, reverse: bool) -> set[int]:
        seen = {start}
        todo = [start]
        while todo:
            i = todo.pop()
            for j in range(self.q):
                edge = self.A[j][i] if reverse else self.A[i][j]
                if edge and j not in seen:
                    seen.add(j)
                    todo.append(j)
        return seen

    def _strongly_connected(self) -> bool:
        return len(self._reach(0, False)) == self.q and len(self._reach(0, True)) == self.q

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.A, dtype=np.int64)

    def allowed(self, i: int, j: int) -> bool:
        return self.A[i][j]

    def successors(self, i: int) -> list[int]:
        return [j for j in range(self.q) if self.A[i][j]]

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.q) for j in range(self.q) if self.A[i][j]]

    def _check_symbols(self, w: Sequence[int]) -> None:
        for s in w:
            if not (isinstance(s, (int, np.integer)) and 0 <= s < self.q):
                raise InvalidInput(f"symbol {s!r} outside alphabet 0..{self.q - 1}")

    def is_admissible(self, w: Sequence[int]) -> bool:
        self._check_symbols(w)
        return all(self.A[a][b] for a, b in zip(w, w[1:]))

    def require_admissible(self, w: Sequence[int]) -> Word:
        w = as_word(w)
        if not self.is_admissible(w):
            raise InvalidInput(f"word {list(w)} is not admissible")
        return w

    def children(self, w: Sequence[int]) -> list[Word]:
        w = as_word(w)
        if not w:
            return [(j,) for j in range(self.q)]
        return [w + (j,) for j in self.successors(w[-1])]

    def count_words(self, n: int) -> int:
        """Number of admissible words of length ``n`` (sum of entries of A^(n-1))."""
        if n < 1:
            raise InvalidInput("generation must be >= 1")
        vec = [1] * self.q
        for _ in range(n - 1):
            vec = [sum(vec[j] for j in self.successors(i)) for i in range(self.q)]
        return sum(vec)

    def enumerate_cylinders(self, n: int, start: Word = ()) -> list[Word]:
        """All admissible words of length ``n`` (extending ``start``), lexicographic."""
        if n < 1:
            raise InvalidInput("generation must be >= 1")
        start = as_word(start)
        if len(start) > n:
            raise InvalidInput("start word longer than requested generation")
        if start:
            self.require_admissible(start)
        if self.count_words(n) > self.cap:
            raise ResourceLimit(f"{self.count_words(n)} cylinders of generation {n} exceed cap {self.cap}")
        level = [start] if start else [(i,) for i in range(self.q)]
        for _ in range(len(start) if start else 1, n):
            level = [w + (j,) for w in level for j in self.successors(w[-1])]
        return level

    def connecting_word(self, a: Sequence[int], b: Sequence[int]) -> Word:
        """Shortest admissible word with prefix ``a`` and suffix ``b``.

        Overlaps between ``a`` and ``b`` are not used: the result is ``a``,
        a (possibly empty) bridge found by BFS over states, then ``b``.
        """
        a = self.require_admissible(a)
        b = self.require_admissible(b)
        if not a:
            return b
        if not b:
            return a
        src, dst = a[-1], b[0]
        if self.A[src][dst]:
            return a + b
        parent = {src: None}
        queue = deque([src])
        while queue:
            i = queue.popleft()
            for j in self.successors(i):
                if j in parent:
                    continue
                parent[j] = i
                if self.A[j][dst]:
                    bridge = [j]
                    while parent[bridge[-1]] != src:
                        bridge.append(parent[bridge[-1]])
                    return a + tuple(reversed(bridge)) + b
                queue.append(j)
        raise AssertionError("transitive subshift has no connecting path")  # pragma: no cover


def _canonical(words: Iterable[Sequence[int]]) -> tuple[Word, ...]:
    ws = sorted(set(as_word(w) for w in words))
    out: list[Word] = []
    # sorted order puts every prefix directly before its extensions
    for w in ws:
        if out and is_prefix(out[-1], w):
            continue
        out.append(w)
    return tuple(out)


class CylinderSet:
    """Finite union of cylinders as a canonical antichain of words.

    Words that extend another member are dropped (their cylinder is already
    contained), duplicates removed, the rest sorted lexicographically.
    Sibling families are *not* merged, so two CylinderSets may describe the
    same set with different generations; use :meth:`refine` to compare.
    """

    __slots__ = ("words",)

    def __init__(self, words: Iterable[Sequence[int]] = ()):
        self.words: tuple[Word, ...] = _canonical(words)

    def __iter__(self) -> Iterator[Word]:
        return iter(self.words)

    def __len__(self) -> int:
        return len(self.words)

    def __bool__(self) -> bool:
        return bool(self.words)

    def __eq__(self, other) -> bool:
        return isinstance(other, CylinderSet) and self.words == other.words

    def __hash__(self) -> int:
        return hash(self.words)

    def __repr__(self) -> str:
        return f"CylinderSet({[list(w) for w in self.words]})"

    @property
    def max_generation(self) -> int:
        return max((len(w) for w in self.words), default=0)

    def contains_word(self, w: Sequence[int]) -> bool:
        """True when the cylinder of ``w`` lies inside the union."""
        w = as_word(w)
        return any(is_prefix(u, w) for u in self.words)

    def meets_word(self, w: Sequence[int]) -> bool:
        w = as_word(w)
        return any(is_prefix(u, w) or is_prefix(w, u) for u in self.words)

    def intersect(self, other: "CylinderSet") -> "CylinderSet":
        out = []
        for w in self.words:
            for v in other.words:
                if is_prefix(w, v):
                    out.append(v)
                elif is_prefix(v, w):
                    out.append(w)
        return CylinderSet(out)

    __and__ = intersect

    def union(self, other: "CylinderSet") -> "CylinderSet":
        return CylinderSet(self.words + other.words)

    __or__ = union

    def restrict(self, root: Sequence[int]) -> "CylinderSet":
        """Intersection with the cylinder of ``root``."""
        return self.intersect(CylinderSet([root])) if root else self

    def refine(self, subshift: Subshift, n: int) -> "CylinderSet":
        """Same set written with words of generation exactly ``n``."""
        out: list[Word] = []
        for w in self.words:
            if len(w) > n:
                raise InvalidInput(f"word of generation {len(w)} deeper than {n}")
            level = [w]
            for _ in range(len(w), n):
                level = [u + (j,) for u in level for j in subshift.successors(u[-1])]
            out.extend(level)
        return CylinderSet(out)

    def to_json(self) -> dict:
        return {"words": [list(w) for w in self.words]}


def antichain_intersect(X: CylinderSet, Y: CylinderSet) -> CylinderSet:
    return X.intersect(Y)
