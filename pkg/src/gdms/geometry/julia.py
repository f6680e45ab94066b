"""Numeric (non-certified) machinery for inverse branches of z**2 + c.

Everything here is sampled floating point. Derivative extremes of a
composed branch are taken over dense samples of the boundary of the slit
annulus, where the maximum principle puts them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..symbolic import Word
from .maps import JuliaBranch
from .system import Annulus, CylinderGeometry, OpenSetReport


def julia_samples(c: complex, depth: int = 12) -> np.ndarray:
    """Points of J(z**2 + c): all depth-``depth`` preimages of the repelling
    fixed point."""
    beta = 0.5 + np.sqrt(0.25 - c + 0j)
    branches = (JuliaBranch(c, 1), JuliaBranch(c, -1))
    pts = np.array([beta])
    for _ in range(depth):
        pts = np.concatenate([b(pts) for b in branches])
    return pts


@dataclass(eq=False)
class JuliaNumerics:
    c: complex
    space: Annulus
    n_circle: int = 256
    n_slit: int = 32
    branches: tuple = field(init=False)
    boundary: np.ndarray = field(init=False)
    interior: np.ndarray = field(init=False)
    reference: complex = field(init=False)
    _cache: dict = field(init=False, default_factory=dict)

    def __post_init__(self):
        self.branches = (JuliaBranch(self.c, 1), JuliaBranch(self.c, -1))
        ang = 2 * np.pi * (np.arange(self.n_circle) + 0.5) / self.n_circle
        circ = np.exp(1j * ang)
        radii = np.linspace(self.space.r_in, self.space.r_out, self.n_slit)
        eps = 1e-9
        self.boundary = np.concatenate([
            self.space.r_in * circ,
            self.space.r_out * circ,
            radii + 1j * eps,
            radii - 1j * eps,
        ])
        j = julia_samples(self.c, 8)
        j = j[np.abs(j.imag) > 1e-6]
        mid = 0.5 * (self.space.r_in + self.space.r_out) * circ[::8]
        self.interior = np.concatenate([j, mid])
        # -beta sits on J and away from the slit
        self.reference = complex(-(0.5 + np.sqrt(0.25 - self.c + 0j)))

    def _apply(self, w: Sequence[int], z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Image of ``z`` under the composed branch and |derivative| there."""
        z = np.asarray(z, dtype=complex)
        deriv = np.ones(z.shape)
        for sym in reversed(w):
            z = self.branches[sym](z)
            deriv = deriv * (0.5 / np.abs(z))
        return z, deriv

    def composition(self, w: Word) -> "JuliaComposition":
        return JuliaComposition(self, tuple(w))

    def level(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Derivative moduli of every generation-``n`` word at the boundary
        samples (rows in lexicographic word order) and at the reference
        point."""
        if n in self._cache:
            return self._cache[n]
        pts = np.concatenate([self.boundary, [self.reference]])
        z = pts[None, :]
        d = np.ones_like(z, dtype=float)
        # prepend symbols: row index of word (a, *rest) is a * 2**k + index(rest)
        for _ in range(n):
            zs, ds = [], []
            for b in self.branches:
                y = b(z)
                zs.append(y)
                ds.append(d * (0.5 / np.abs(y)))
            z = np.concatenate(zs)
            d = np.concatenate(ds)
        out = (d[:, :-1], d[:, -1])
        if n <= 14:
            self._cache[n] = out
        return out

    def derivative_bracket(self, w: Word) -> tuple[float, float]:
        _, d = self._apply(w, self.boundary)
        return float(d.min()), float(d.max())

    def cylinder_geometry(self, w: Word) -> CylinderGeometry:
        lo, hi = self.derivative_bracket(w)
        diam = self.space.diameter
        centre, _ = self._apply(w, np.array([self.reference]))
        return CylinderGeometry(tuple(w), diam * lo, diam * hi, (complex(centre[0]), diam * hi))

    def reference_image(self, w: Word) -> complex:
        z, _ = self._apply(w, np.array([self.reference]))
        return complex(z[0])

    def itinerary(self, z: np.ndarray, n: int) -> np.ndarray:
        """First ``n`` half-plane symbols of forward orbits; -1 on the cut."""
        z = np.asarray(z, dtype=complex)
        out = np.empty((n,) + z.shape, dtype=int)
        for k in range(n):
            sym = np.where(z.imag > 0, 0, 1)
            sym = np.where(np.abs(z.imag) < 1e-12, -1, sym)
            out[k] = sym
            z = z * z + self.c
        return out

    def open_set_report(self, words: list[Word], n: int) -> OpenSetReport:
        """Sampled images of each generation-``n`` branch must code back to
        their own word; a point landing in another piece is an overlap."""
        bad = None
        checked = 0
        for w in words:
            img, _ = self._apply(w, self.interior)
            it = self.itinerary(img, n)
            ok = (it == np.array(w)[:, None]) | (it == -1)
            checked += img.size
            if not ok.all():
                bad = (w, w)
                break
        return OpenSetReport(n, bad is None, checked, 0.0 if bad is None else 1.0, bad, "numeric")

    def kappa(self, max_generation: int = 6) -> tuple[float, int]:
        """Empirical distortion constant: largest ratio of derivative moduli
        over sampled pairs, for all words up to ``max_generation``."""
        best = 1.0
        samples = 0
        for n in range(1, max_generation + 1):
            d, _ = self.level(n)
            ratio = d.max(axis=1) / d.min(axis=1)
            best = max(best, float(ratio.max()))
            samples += d.size
        return best, samples


@dataclass(frozen=True, eq=False)
class JuliaComposition:
    numerics: JuliaNumerics
    word: Word

    def __call__(self, z):
        return self.numerics._apply(self.word, np.asarray(z, dtype=complex))[0]

    def derivative_abs(self, z):
        return self.numerics._apply(self.word, np.asarray(z, dtype=complex))[1]

    def derivative_bracket(self) -> tuple[float, float]:
        return self.numerics.derivative_bracket(self.word)
