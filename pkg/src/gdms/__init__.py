"""Conformal graph-directed Markov systems: cylinder geometry, pressure,
net outer measures and large-intersection class tests."""

__version__ = "0.1.0"

from .errors import (
    GdmsError,
    InvalidInput,
    ResourceLimit,
    InvalidBudget,
    UnsupportedMethod,
    DegenerateSystem,
    ConstraintViolation,
    InvariantViolation,
)
from .symbolic import Subshift, CylinderSet
from .geometry import (
    GdmsSystem,
    cantor_system,
    golden_mean_system,
    affine_markov_system,
    random_affine_markov_system,
    markov_interval_map_system,
    julia_system,
)

__all__ = [
    "__version__",
    "GdmsError",
    "InvalidInput",
    "ResourceLimit",
    "InvalidBudget",
    "UnsupportedMethod",
    "DegenerateSystem",
    "ConstraintViolation",
    "InvariantViolation",
    "Subshift",
    "CylinderSet",
    "GdmsSystem",
    "cantor_system",
    "golden_mean_system",
    "affine_markov_system",
    "random_affine_markov_system",
    "markov_interval_map_system",
    "julia_system",
]
