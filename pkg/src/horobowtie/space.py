"""The common contract of a pointed hyperbolic component.

A component knows its points, its metric, its height function (minus the
Busemann function of the distinguished end, zero at the base point) and its
vertical geodesics, parametrised so that the point at parameter t has
height exactly t. Everything else in this module is written against that
contract only.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Protocol

from . import plane as pl
from . import tree as tr
from .ledger import as_big, frac_str, threshold, ConstantsLedger
from .paths import PathH, path_from_points


class SpaceError(ValueError):
    pass


class OrientationError(SpaceError):
    pass


class Component(Protocol):
    kind: str
    delta: Fraction

    @property
    def base_point(self) -> Any: ...

    @property
    def boundary_direction(self) -> str: ...

    def validate(self, x: Any) -> None: ...

    def distance(self, x: Any, y: Any) -> float: ...

    def height(self, x: Any) -> float: ...

    def vertical_point(self, x: Any, t: float) -> Any: ...

    def geodesic(self, x: Any, y: Any, samples: int) -> PathH: ...

    def point_along(self, x: Any, y: Any, s: float) -> Any: ...

    def format(self, x: Any) -> str: ...


@dataclass(frozen=True)
class TreeSpace:
    """The (p+1)-regular tree; all heights and distances are integers."""

    p: int
    delta: Fraction = Fraction(1)
    kind: str = "tree"

    def __post_init__(self) -> None:
        if self.p < 2:
            raise SpaceError("tree needs p >= 2")
        object.__setattr__(self, "delta", _check_delta(self.delta))

    @property
    def base_point(self) -> tr.TreeVertex:
        return tr.origin(self.p)

    @property
    def boundary_direction(self) -> str:
        return "upward end"

    def validate(self, x: Any) -> None:
        if not isinstance(x, tr.TreeVertex) or x.p != self.p:
            raise SpaceError(f"{x!r} is not a vertex of T{self.p}")

    def distance(self, x, y) -> int:
        self.validate(x)
        self.validate(y)
        return tr.tree_distance(x, y)

    def height(self, x) -> int:
        self.validate(x)
        return x.n

    def vertical_point(self, x, t):
        return tr.vertical_point(x, _as_int(t))

    def geodesic(self, x, y, samples: int = 2) -> PathH:
        return path_from_points(tr.tree_geodesic(x, y), lambda a, b: 1)

    def point_along(self, x, y, s):
        return tr.tree_geodesic(x, y)[_as_int(s)]

    def format(self, x) -> str:
        return tr.format_vertex(x)

    def relative_distance(self, x, y) -> int:
        return tr.tree_relative_distance(x, y)


@dataclass(frozen=True)
class PlaneSpace:
    """The log-model hyperbolic plane with h(x, z) = z."""

    delta: Fraction = Fraction(1)
    kind: str = "plane"

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", _check_delta(self.delta))

    @property
    def base_point(self) -> pl.PlanePoint:
        return pl.PlanePoint(0.0, 0.0)

    @property
    def boundary_direction(self) -> str:
        return "z -> +inf"

    def validate(self, x: Any) -> None:
        if not isinstance(x, pl.PlanePoint):
            raise SpaceError(f"{x!r} is not a plane point")

    def distance(self, x, y) -> float:
        self.validate(x)
        self.validate(y)
        return pl.plane_distance(x, y)

    def height(self, x) -> float:
        self.validate(x)
        return x.z

    def vertical_point(self, x, t):
        return pl.vertical_point(x, t)

    def geodesic(self, x, y, samples: int = 64) -> PathH:
        return pl.plane_geodesic(x, y, samples)

    def point_along(self, x, y, s):
        return pl.geodesic_point_at(x, y, s)

    def format(self, x) -> str:
        return pl.format_point(x)

    def relative_distance(self, x, y) -> float:
        return max(pl.plane_distance(x, y) - abs(x.z - y.z), 0.0)


def _check_delta(delta) -> Fraction:
    d = as_big(delta)
    if d < 1:
        raise SpaceError(f"delta must be >= 1, got {d}")
    return d


def _as_int(t) -> int:
    if isinstance(t, Fraction) and t.denominator == 1:
        return int(t)
    if float(t) != math.floor(float(t)):
        raise SpaceError(f"tree parameters must be integers, got {t}")
    return int(t)


def component_for(point: Any, delta=1) -> Component:
    if isinstance(point, tr.TreeVertex):
        return TreeSpace(point.p, delta)
    if isinstance(point, pl.PlanePoint):
        return PlaneSpace(delta)
    raise SpaceError(f"no component for {point!r}")


@dataclass(frozen=True)
class VerticalGeodesic:
    component: Any
    anchor: Any

    def __call__(self, t):
        return self.component.vertical_point(self.anchor, t)

    @property
    def anchor_height(self):
        return self.component.height(self.anchor)


# -- generic operations ------------------------------------------------------


def distance(cfg: Component, x, y):
    return cfg.distance(x, y)


def height(cfg: Component, x):
    return cfg.height(x)


def delta_h(cfg: Component, x, y):
    return abs(cfg.height(x) - cfg.height(y))


def relative_distance(cfg: Component, x, y):
    return cfg.relative_distance(x, y)


def vertical_through(cfg: Component, x) -> VerticalGeodesic:
    cfg.validate(x)
    return VerticalGeodesic(cfg, x)


def geodesic(cfg: Component, x, y, samples: int = 64) -> PathH:
    if samples < 2:
        raise SpaceError("samples must be >= 2")
    return cfg.geodesic(x, y, samples)


@dataclass(frozen=True)
class Lem0Witnesses:
    z: Any
    x1: Any
    y1: Any
    hplus_lower: Fraction

    def to_json(self, cfg: Component) -> str:
        return json.dumps(
            {
                "z": cfg.format(self.z),
                "x1": cfg.format(self.x1),
                "y1": cfg.format(self.y1),
                "hplus_lower": frac_str(self.hplus_lower),
            },
            sort_keys=True,
        )


def _oriented(cfg: Component, x, y) -> None:
    if cfg.height(x) > cfg.height(y):
        raise OrientationError("expected h(x) <= h(y); swap the arguments")


def lem0_witnesses(cfg: Component, x, y) -> Lem0Witnesses:
    """Witness points near the top of the geodesic from x to y."""
    _oriented(cfg, x, y)
    dh = delta_h(cfg, x, y)
    dr = relative_distance(cfg, x, y)
    top = cfg.height(y) + dr / 2
    z = cfg.point_along(x, y, dh + dr / 2)
    x1 = cfg.vertical_point(x, top)
    y1 = cfg.vertical_point(y, top)
    lower = as_big(cfg.height(y)) + as_big(dr) / 2 - threshold(ConstantsLedger(cfg.delta), "DELTA_x96")
    return Lem0Witnesses(z, x1, y1, lower)


def same_height_projection_gap(cfg: Component, x, y) -> float:
    _oriented(cfg, x, y)
    x_up = cfg.vertical_point(x, cfg.height(y))
    return abs(relative_distance(cfg, x, y) - cfg.distance(x_up, y))
