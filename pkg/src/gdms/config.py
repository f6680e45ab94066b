"""Validated run configuration. Unknown keys are rejected everywhere."""

from __future__ import annotations

from typing import Annotated, Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import InvalidInput
from .geometry import (
    GdmsSystem,
    Interval,
    affine_markov_system,
    cantor_system,
    golden_mean_system,
    julia_system,
    markov_interval_map_system,
    random_affine_markov_system,
)
from .rational import to_fraction
from .symbolic import DEFAULT_CYLINDER_CAP, Subshift

Num = Union[str, int, float]


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SubshiftConfig(Strict):
    q: int = Field(ge=1)
    A: list[list[int]]


class EdgeConfig(Strict):
    i: int
    j: int
    scale: Num
    offset: Num


class RandomConfig(Strict):
    seed: int
    q: int = Field(ge=2, le=8)


class CantorConfig(Strict):
    kind: Literal["cantor"]


class GoldenConfig(Strict):
    kind: Literal["golden"]
    r0: Num = "1/3"
    r1: Num = "1/3"
    offsets: tuple[Num, Num] = ("0", "2/3")


class AffineConfig(Strict):
    kind: Literal["affine"]
    subshift: Optional[SubshiftConfig] = None
    maps: Optional[list[tuple[Num, Num]]] = None
    edges: list[EdgeConfig] = []
    space: tuple[Num, Num] = ("0", "1")
    random: Optional[RandomConfig] = None

    @model_validator(mode="after")
    def _one_source(self):
        explicit = self.subshift is not None or self.maps is not None
        if self.random is not None and (explicit or self.edges):
            raise ValueError("give either 'random' or 'subshift'/'maps'/'edges', not both")
        if self.random is None and (self.subshift is None or self.maps is None):
            raise ValueError("affine systems need 'subshift' and 'maps' (or 'random')")
        return self


class IntervalMapConfig(Strict):
    kind: Literal["interval_map"]
    intervals: list[tuple[Num, Num]]
    slopes: list[Num]
    images: Optional[list[tuple[Num, Num]]] = None


class JuliaConfig(Strict):
    kind: Literal["julia"]
    c: float
    ring: Optional[tuple[float, float]] = None


SystemConfig = Annotated[
    Union[CantorConfig, GoldenConfig, AffineConfig, IntervalMapConfig, JuliaConfig],
    Field(discriminator="kind"),
]


class Caps(Strict):
    max_generation: int = Field(default=12, ge=1)
    max_cylinders: int = Field(default=DEFAULT_CYLINDER_CAP, ge=1)


class RunConfig(Strict):
    """A config file, or a manifest written by an earlier run."""

    system: SystemConfig
    caps: Caps = Caps()
    precision: Literal["auto", "float", "mp"] = "auto"
    command: Optional[str] = None
    params: Optional[dict[str, Any]] = None
    tool_version: Optional[str] = None


def load_config(data: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise InvalidInput(f"invalid config: {exc}") from None


def build_system(cfg: RunConfig) -> GdmsSystem:
    s = cfg.system
    cap = cfg.caps.max_cylinders
    if isinstance(s, CantorConfig):
        return cantor_system(cap)
    if isinstance(s, GoldenConfig):
        return golden_mean_system(s.r0, s.r1, s.offsets, cap)
    if isinstance(s, AffineConfig):
        if s.random is not None:
            return random_affine_markov_system(s.random.q, s.random.seed, cap)
        sub = Subshift(s.subshift.q, tuple(tuple(bool(x) for x in row) for row in s.subshift.A), cap)
        edges = {(e.i, e.j): (e.scale, e.offset) for e in s.edges}
        space = Interval(to_fraction(s.space[0]), to_fraction(s.space[1]))
        return affine_markov_system(sub, list(s.maps), edges, space)
    if isinstance(s, IntervalMapConfig):
        return markov_interval_map_system(s.intervals, s.slopes, s.images, cap)
    if isinstance(s, JuliaConfig):
        return julia_system(s.c, s.ring)
    raise InvalidInput(f"unknown system kind {s!r}")  # pragma: no cover
