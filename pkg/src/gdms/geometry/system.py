from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from ..errors import ConstraintViolation, InvalidInput
from ..symbolic import Subshift, Word, as_word
from .maps import IDENTITY, AffineMap

Real = Union[Fraction, float]


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not self.hi > self.lo:
            raise InvalidInput("base interval must be non-degenerate")

    @property
    def diameter(self) -> Fraction:
        return self.hi - self.lo

    @property
    def certified(self) -> bool:
        return True

    @property
    def ambient_dimension(self) -> int:
        return 1


@dataclass(frozen=True)
class Annulus:
    """Closed annulus ``r_in <= |z| <= r_out`` slit along the positive reals."""

    r_in: float
    r_out: float

    def __post_init__(self):
        if not 0 < self.r_in < self.r_out:
            raise InvalidInput("annulus radii must satisfy 0 < r_in < r_out")

    @property
    def diameter(self) -> float:
        return 2.0 * self.r_out

    @property
    def certified(self) -> bool:
        return False

    @property
    def ambient_dimension(self) -> int:
        return 2


@dataclass(frozen=True)
class CylinderGeometry:
    word: Word
    d_lo: Real
    d_hi: Real
    region: tuple

    @property
    def exact(self) -> bool:
        return self.d_lo == self.d_hi


@dataclass(frozen=True)
class OpenSetReport:
    generation: int
    passed: bool
    checked: int
    max_overlap: Real
    offending: Optional[tuple[Word, Word]] = None
    mode: str = "exact"


@dataclass(frozen=True, eq=False)
class GdmsSystem:
    """A graph-directed Markov system on a subshift.

    ``maps[i]`` is the first-letter map f_i and ``edges[(i, j)]`` the map
    f_{i,j}; cylinder ``w`` is the image of X under
    ``f_{w1} o f_{w1,w2} o ... o f_{w(n-1),wn}``.
    """

    name: str
    subshift: Subshift
    maps: tuple
    edges: dict
    lambda1: Real
    lambda2: Real
    space: Union[Interval, Annulus]
    alpha: float = 1.0
    kappa: Real = Fraction(1)
    labels: Optional[tuple] = None
    numeric: Optional[object] = field(default=None, repr=False)

    @property
    def q(self) -> int:
        return self.subshift.q

    @property
    def affine(self) -> bool:
        return all(isinstance(f, AffineMap) for f in self.maps)

    @property
    def certified(self) -> bool:
        return self.affine and self.space.certified

    @property
    def ambient_dimension(self) -> int:
        return self.space.ambient_dimension

    def encode(self, labelled: Sequence) -> Word:
        """Translate display labels (e.g. ternary digits 0/2) to symbols."""
        if self.labels is None:
            return as_word(labelled)
        lookup = {lab: i for i, lab in enumerate(self.labels)}
        try:
            return tuple(lookup[x] for x in labelled)
        except KeyError as exc:
            raise InvalidInput(f"unknown label {exc.args[0]!r}; labels are {list(self.labels)}") from None

    def decode(self, w: Sequence[int]) -> list:
        return list(w) if self.labels is None else [self.labels[i] for i in w]

    def edge(self, i: int, j: int):
        return self.edges[(i, j)]

    def edge_ratio(self, last: Optional[int], j: int) -> Fraction:
        """Diameter ratio of cylinder ``w j`` to cylinder ``w`` (affine only)."""
        f = self.maps[j] if last is None else self.edges[(last, j)]
        return f.ratio

    # -- composition -------------------------------------------------------

    def compose_along(self, w: Sequence[int]):
        w = self.subshift.require_admissible(w)
        if not w:
            return IDENTITY if self.affine else self.numeric.composition(())
        if not self.affine:
            return self.numeric.composition(w)
        g = self.maps[w[0]]
        for a, b in zip(w, w[1:]):
            g = g.compose(self.edges[(a, b)])
        return g

    def word_ratio(self, w: Sequence[int]) -> Fraction:
        """Product of scales along ``w`` (affine only)."""
        r = Fraction(1)
        prev = None
        for j in w:
            r *= self.edge_ratio(prev, j)
            prev = j
        return r

    def cylinder_diameter(self, w: Sequence[int]) -> CylinderGeometry:
        w = self.subshift.require_admissible(w)
        if self.affine:
            g = self.compose_along(w)
            region = g.image(self.space.lo, self.space.hi)
            d = region[1] - region[0]
            return CylinderGeometry(w, d, d, region)
        return self.numeric.cylinder_geometry(w)

    def derivative_bracket(self, w: Sequence[int]) -> tuple[Real, Real]:
        if self.affine:
            r = self.word_ratio(self.subshift.require_admissible(w))
            return (r, r)
        return self.numeric.derivative_bracket(self.subshift.require_admissible(w))

    def project_point(self, prefix: Sequence[int], depth: Optional[int] = None):
        """A point of the cylinder of ``prefix`` (padded to ``depth``) and a
        bound on its distance to pi of any extension."""
        w = self.subshift.require_admissible(prefix)
        depth = len(w) if depth is None else depth
        while len(w) < depth:
            w = w + (self.subshift.successors(w[-1])[0] if w else 0,)
        geom = self.cylinder_diameter(w)
        if self.affine:
            mid = (self.space.lo + self.space.hi) / 2
            return self.compose_along(w)(mid), geom.d_hi
        return self.numeric.reference_image(w), geom.d_hi

    # -- assumptions -------------------------------------------------------

    def verify_open_set_condition(self, n: int = 1) -> OpenSetReport:
        if n < 1:
            raise InvalidInput("generation must be >= 1")
        words = self.subshift.enumerate_cylinders(n)
        if not self.affine:
            return self.numeric.open_set_report(words, n)
        spans = sorted(
            (self.compose_along(w).image(self.space.lo, self.space.hi), w) for w in words
        )
        worst = Fraction(0)
        bad = None
        for (span_a, wa), (span_b, wb) in zip(spans, spans[1:]):
            overlap = span_a[1] - span_b[0]
            if overlap > worst:
                worst, bad = overlap, (wa, wb)
        return OpenSetReport(n, bad is None, len(words), worst, bad, "exact")

    def distortion_kappa(self):
        return self.kappa

    def check_contraction(self) -> None:
        lam1, lam2 = self.lambda1, self.lambda2
        if not (0 < lam1 < lam2 < 1):
            raise ConstraintViolation("contraction", f"need 0 < lambda1 < lambda2 < 1, got {lam1}, {lam2}")
        if not self.affine:
            return
        named = [(f"f_{i}", f) for i, f in enumerate(self.maps)]
        named += [(f"f_{i},{j}", f) for (i, j), f in sorted(self.edges.items())]
        for label, f in named:
            if not (lam1 < f.ratio < lam2):
                raise ConstraintViolation(
                    "contraction", f"|{label}'| = {f.ratio} not strictly inside ({lam1}, {lam2})"
                )

    def check_images_inside(self) -> None:
        if not self.affine:
            return
        lo, hi = self.space.lo, self.space.hi
        for label, f in [(f"f_{i}", f) for i, f in enumerate(self.maps)] + [
            (f"f_{i},{j}", f) for (i, j), f in sorted(self.edges.items())
        ]:
            a, b = f.image(lo, hi)
            if a < lo or b > hi:
                raise ConstraintViolation("contraction", f"{label} does not map X into itself")

    def validate(self, osc_generations: int = 2) -> "GdmsSystem":
        self.check_contraction()
        self.check_images_inside()
        for n in range(1, osc_generations + 1):
            rep = self.verify_open_set_condition(n)
            if not rep.passed:
                raise ConstraintViolation(
                    "open-set",
                    f"generation-{n} images {rep.offending} overlap by {rep.max_overlap}",
                )
        return self

    def describe(self) -> dict:
        return {
            "name": self.name,
            "q": self.q,
            "affine": self.affine,
            "certified": self.certified,
            "lambda1": str(self.lambda1),
            "lambda2": str(self.lambda2),
            "kappa": str(self.kappa),
            "diameter_X": str(self.space.diameter),
        }
