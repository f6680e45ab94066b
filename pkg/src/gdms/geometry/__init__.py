"""Contraction maps, system assembly, cylinder geometry and example builders."""

from .maps import IDENTITY, AffineMap, JuliaBranch
from .system import Annulus, CylinderGeometry, GdmsSystem, Interval, OpenSetReport
from .builders import (
    affine_markov_system,
    cantor_system,
    golden_mean_system,
    julia_system,
    markov_interval_map_system,
    random_affine_markov_system,
)

__all__ = [
    "IDENTITY",
    "AffineMap",
    "JuliaBranch",
    "Annulus",
    "CylinderGeometry",
    "GdmsSystem",
    "Interval",
    "OpenSetReport",
    "affine_markov_system",
    "cantor_system",
    "golden_mean_system",
    "julia_system",
    "markov_interval_map_system",
    "random_affine_markov_system",
]
