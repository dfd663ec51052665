"""Pairs of component points with opposite heights, and paths between them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import grammar
from .ledger import ConstantsLedger, as_big, threshold, upper_rational
from .norms import AdmissibleNorm, lr_norm
from .paths import PathError, PathH
from .space import Component, PlaneSpace, SpaceError, TreeSpace, component_for
from .tree import TreeVertex

HEIGHT_TOL = 1e-9
PLANE_STEP = 0.25  # sampling step for vertical pieces in continuous components
BRIDGE_SAMPLES = 64


class HoroError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class HoroPoint:
    p_part: Any
    q_part: Any

    def __str__(self) -> str:
        return format_horo_point(self)


def format_horo_point(x: HoroPoint) -> str:
    return f"{x.p_part}|{x.q_part}"


@dataclass(frozen=True)
class HoroSpace:
    left: Component
    right: Component
    norm: AdmissibleNorm = field(default_factory=lambda: lr_norm(1))
    ledger: ConstantsLedger = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        delta = max(self.left.delta, self.right.delta)
        if self.ledger is None:
            object.__setattr__(self, "ledger", ConstantsLedger(delta, self.norm.c_n))
        elif self.ledger.delta < delta:
            raise HoroError(f"ledger delta {self.ledger.delta} below component delta {delta}")

    @property
    def exact(self) -> bool:
        return self.left.kind == "tree" and self.right.kind == "tree"

    @property
    def is_dl(self) -> bool:
        return self.exact

    def height(self, x: HoroPoint):
        return self.left.height(x.p_part)

    def label(self) -> str:
        def one(c):
            return f"T{c.p}" if c.kind == "tree" else "H2"

        return f"{one(self.left)}x{one(self.right)}"


def dl_space(p: int, q: int, norm: AdmissibleNorm | None = None, delta=1) -> HoroSpace:
    return HoroSpace(TreeSpace(p, delta), TreeSpace(q, delta), norm or lr_norm(1))


def sol_space(norm: AdmissibleNorm | None = None, delta=1) -> HoroSpace:
    return HoroSpace(PlaneSpace(delta), PlaneSpace(delta), norm or lr_norm(1))


def treebolic_space(q: int, norm: AdmissibleNorm | None = None, delta=1) -> HoroSpace:
    return HoroSpace(PlaneSpace(delta), TreeSpace(q, delta), norm or lr_norm(1))


def space_for(x: HoroPoint, norm: AdmissibleNorm | None = None, delta=1) -> HoroSpace:
    return HoroSpace(component_for(x.p_part, delta), component_for(x.q_part, delta), norm or lr_norm(1))


def make_horo_point(space: HoroSpace, p_part, q_part) -> HoroPoint:
    space.left.validate(p_part)
    space.right.validate(q_part)
    hp, hq = space.left.height(p_part), space.right.height(q_part)
    total = hp + hq
    tol = 0 if space.exact else HEIGHT_TOL
    if abs(total) > tol:
        raise HoroError(f"heights must sum to 0: h_p = {hp}, h_q = {hq}, sum = {total}")
    return HoroPoint(p_part, q_part)


def parse_horo_point(text: str, space: HoroSpace | None = None) -> HoroPoint:
    left, right = grammar.parse_pair(text)
    space = space or space_for(HoroPoint(left, right))
    return make_horo_point(space, left, right)


def origin(space: HoroSpace) -> HoroPoint:
    return HoroPoint(space.left.base_point, space.right.base_point)


# -- metric quantities -------------------------------------------------------


def delta_h(space: HoroSpace, x: HoroPoint, y: HoroPoint):
    return abs(space.height(x) - space.height(y))


def dr_p(space: HoroSpace, x: HoroPoint, y: HoroPoint):
    return space.left.relative_distance(x.p_part, y.p_part)


def dr_q(space: HoroSpace, x: HoroPoint, y: HoroPoint):
    return space.right.relative_distance(x.q_part, y.q_part)


def coarse_distance(space: HoroSpace, x: HoroPoint, y: HoroPoint):
    return delta_h(space, x, y) + dr_p(space, x, y) + dr_q(space, x, y)


def step_lengths(space: HoroSpace, a: HoroPoint, b: HoroPoint) -> tuple[float, float]:
    return space.left.distance(a.p_part, b.p_part), space.right.distance(a.q_part, b.q_part)


def product_path(space: HoroSpace, points) -> PathH:
    pts = tuple(points)
    steps = np.array([step_lengths(space, a, b) for a, b in zip(pts, pts[1:])], dtype=float).reshape(-1, 2)
    return PathH(pts, steps)


def path_length(space: HoroSpace, path: PathH) -> float:
    if len(path) == 1:
        return 0.0
    if not path.is_product:
        raise PathError("expected a product path")
    kinds = {(type(pt.p_part), type(pt.q_part)) for pt in path.points}
    if len(kinds) != 1:
        raise PathError("path mixes points from different spaces")
    return float(np.sum(space.norm.evaluate(path.steps[:, 0], path.steps[:, 1])))


# -- verticals -----------------------------------------------------------------


@dataclass(frozen=True)
class ProductVertical:
    """t -> (V_p(t), V_q(-t)) for component verticals through two anchors."""

    space: HoroSpace
    p_anchor: Any
    q_anchor: Any

    def __call__(self, t) -> HoroPoint:
        return HoroPoint(self.space.left.vertical_point(self.p_anchor, t),
                         self.space.right.vertical_point(self.q_anchor, -t))

    def segment(self, t0, t1) -> list[HoroPoint]:
        return [self(t) for t in _heights_between(self.space, t0, t1)]


def vertical_geodesic_through(space: HoroSpace, x: HoroPoint) -> ProductVertical:
    return ProductVertical(space, x.p_part, x.q_part)


def _heights_between(space: HoroSpace, t0, t1) -> list:
    if space.left.kind == "tree" or space.right.kind == "tree":
        if space.left.kind != space.right.kind:
            raise HoroError("mixed tree/plane products have no discrete vertical sampling")
        a, b = int(t0), int(t1)
        if a != t0 or b != t1:
            raise HoroError(f"tree heights must be integers, got {t0}, {t1}")
        step = 1 if b >= a else -1
        return list(range(a, b + step, step))
    n = max(2, int(math.ceil(abs(t1 - t0) / PLANE_STEP)) + 1)
    ts = list(np.linspace(float(t0), float(t1), n))
    ts[0], ts[-1] = t0, t1
    return ts


# -- the five-segment path -----------------------------------------------------

ROLES = ("descend", "bridge_low", "ascend", "bridge_high", "descend_to_target")


@dataclass(frozen=True)
class PathPlan:
    segments: tuple[PathH, ...]
    roles: tuple[str, ...]
    corners: tuple[HoroPoint, HoroPoint, HoroPoint, HoroPoint]
    total_length: float
    path: PathH
    reversed: bool = False

    def certified_within(self, space: HoroSpace, coarse) -> bool:
        """l_N(plan) <= coarse + 1152 delta C_N, compared exactly."""
        bound = as_big(coarse) + threshold(space.ledger, "DELTA_x1152_CN")
        return upper_rational(self.total_length) <= bound


def _bridge(space: HoroSpace, a: HoroPoint, b: HoroPoint, side: str) -> list[HoroPoint]:
    """Join two points that differ on one side only.

    The moving side follows a component geodesic; the other side rides its
    vertical so that heights keep summing to zero.
    """
    if a == b:
        return [a]
    if side == "q":
        moving, mover_a, mover_b = space.right, a.q_part, b.q_part
        fixed, anchor = space.left, a.p_part
        if fixed.distance(a.p_part, b.p_part) > 1e-9:
            raise HoroError("bridge endpoints differ on the fixed side")
    else:
        moving, mover_a, mover_b = space.left, a.p_part, b.p_part
        fixed, anchor = space.right, a.q_part
        if fixed.distance(a.q_part, b.q_part) > 1e-9:
            raise HoroError("bridge endpoints differ on the fixed side")
    track = moving.geodesic(mover_a, mover_b, BRIDGE_SAMPLES).points
    out = []
    for m in track:
        f = fixed.vertical_point(anchor, -moving.height(m))
        out.append(HoroPoint(f, m) if side == "q" else HoroPoint(m, f))
    out[0], out[-1] = a, b
    return out


def build_path(space: HoroSpace, x: HoroPoint, y: HoroPoint) -> PathPlan:
    if space.left.kind != space.right.kind:
        raise HoroError(f"no path builder for mixed product {space.label()}")
    if space.height(x) > space.height(y):
        plan = build_path(space, y, x)
        segs = tuple(s.reversed() for s in reversed(plan.segments))
        return PathPlan(segs, tuple(reversed(plan.roles)), plan.corners, plan.total_length,
                        plan.path.reversed(), True)
    if x == y:
        single = product_path(space, [x])
        return PathPlan((single,) * 5, ROLES, (x, x, x, x), 0.0, single)
    hx, hy = space.height(x), space.height(y)
    t_low = hx - dr_q(space, x, y) / 2
    t_high = hy + dr_p(space, x, y) / 2
    if space.exact:
        t_low, t_high = int(t_low), int(t_high)
    vx = ProductVertical(space, x.p_part, x.q_part)
    mid = ProductVertical(space, x.p_part, y.q_part)
    vy = ProductVertical(space, y.p_part, y.q_part)
    a1, a2 = vx(t_low), mid(t_low)
    a3, a4 = mid(t_high), vy(t_high)
    seg_pts = [
        [x] + vx.segment(hx, t_low)[1:],
        _bridge(space, a1, a2, "q"),
        mid.segment(t_low, t_high),
        _bridge(space, a3, a4, "p"),
        vy.segment(t_high, hy)[:-1] + [y],
    ]
    seg_pts[0][-1] = a1
    segments = tuple(product_path(space, pts) for pts in seg_pts)
    whole = segments[0]
    for s in segments[1:]:
        try:
            whole = whole.concat(s)
        except PathError as exc:
            raise HoroError("path segments do not connect") from exc
    total = path_length(space, whole)
    return PathPlan(segments, ROLES, (a1, a2, a3, a4), total, whole)
