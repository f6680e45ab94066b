from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class AffineMap:
    """x -> scale * x + offset on the line, exact over the rationals."""

    scale: Fraction
    offset: Fraction

    def __call__(self, x):
        return self.scale * x + self.offset

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """``self o inner``."""
        return AffineMap(self.scale * inner.scale, self.scale * inner.offset + self.offset)

    def inverse(self) -> "AffineMap":
        return AffineMap(1 / self.scale, -self.offset / self.scale)

    @property
    def ratio(self) -> Fraction:
        return abs(self.scale)

    def derivative_bracket(self) -> tuple[Fraction, Fraction]:
        return (self.ratio, self.ratio)

    def image(self, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
        a, b = self(lo), self(hi)
        return (a, b) if a <= b else (b, a)


IDENTITY = AffineMap(Fraction(1), Fraction(0))


@dataclass(frozen=True)
class JuliaBranch:
    """Inverse branch ``z -> sign * sqrt(z - c)`` of ``z**2 + c``.

    The square root takes ``arg(z - c)`` in ``[0, 2*pi)``, so the branch is
    continuous off the ray ``c + [0, inf)``; ``sign=+1`` lands in the closed
    upper half-plane and ``sign=-1`` in the lower one.
    """

    c: complex
    sign: int

    def __call__(self, z):
        w = np.asarray(z, dtype=complex) - self.c
        ang = np.mod(np.angle(w), 2 * np.pi)
        root = np.sqrt(np.abs(w)) * np.exp(0.5j * ang)
        return self.sign * root

    def derivative_abs(self, z):
        """|g'(z)| = 1 / (2 |g(z)|), independent of the sign."""
        return 0.5 / np.sqrt(np.abs(np.asarray(z, dtype=complex) - self.c))
