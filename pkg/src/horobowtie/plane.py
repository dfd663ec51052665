"""The hyperbolic plane in log coordinates, ds^2 = dz^2 + e^{-2z} dx^2.

Height is z and the distinguished end is z -> +inf. Under Y = e^z this is the
upper half-plane, where geodesics are vertical lines and semicircles centred
on the axis. All semicircle arithmetic is done in coordinates rescaled by the
largest of |dx|, Y_u, Y_v so that heights up to 700 do not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .paths import PathH

Z_LIMIT = 700.0
# below this ratio of |dx| to the vertical scale a pair is treated as vertical
_VERTICAL_RATIO = 1e-13


class PlaneError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class PlanePoint:
    x: float
    z: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.z)):
            raise PlaneError(f"non-finite plane point ({self.x}, {self.z})")

    @property
    def height(self) -> float:
        return self.z

    def __str__(self) -> str:
        return format_point(self)


def format_point(u: PlanePoint) -> str:
    return f"P({float(u.x)!r},{float(u.z)!r})"


def _guard(*zs: float) -> None:
    for z in zs:
        if abs(z) > Z_LIMIT:
            raise PlaneError(f"|z| = {abs(z)} exceeds {Z_LIMIT}; e^z would overflow")


def plane_distance(u: PlanePoint, v: PlanePoint) -> float:
    _guard(u.z, v.z)
    return float(_distance_xz(v.x - u.x, u.z, v.z))


def _distance_xz(dx, zu, zv):
    # 2 asinh(sqrt((dx e^{-(zu+zv)/2} / 2)^2 + sinh^2((zu - zv)/2)))
    a = np.abs(dx) * np.exp(-(np.asarray(zu) + zv) / 2) / 2
    b = np.sinh((np.asarray(zu) - zv) / 2)
    return 2 * np.arcsinh(np.hypot(a, b))


def plane_distance_many(xu, zu, xv, zv) -> np.ndarray:
    """Vectorised distance for arrays of coordinates."""
    zu, zv = np.asarray(zu, dtype=float), np.asarray(zv, dtype=float)
    if np.any(np.abs(zu) > Z_LIMIT) or np.any(np.abs(zv) > Z_LIMIT):
        raise PlaneError(f"height beyond {Z_LIMIT}")
    return _distance_xz(np.asarray(xv, dtype=float) - xu, zu, zv)


def vertical_point(u: PlanePoint, t: float) -> PlanePoint:
    return PlanePoint(u.x, float(t))


@dataclass(frozen=True)
class _Arc:
    """Semicircle through two points, in coordinates scaled by `scale`.

    The first point sits at scaled abscissa 0; `centre` and `radius` are
    scaled too, so absolute values are x0 + scale * (...).
    """

    x0: float
    scale: float
    centre: float
    radius: float
    theta_u: float
    theta_v: float


def _arc(u: PlanePoint, v: PlanePoint) -> _Arc | None:
    _guard(u.z, v.z)
    dx = v.x - u.x
    zmax = max(u.z, v.z)
    # scale = max(|dx|, Y_u, Y_v), kept in log form to dodge overflow
    log_scale = max(zmax, math.log(abs(dx)) if dx != 0 else -math.inf)
    scale = math.exp(log_scale)
    d = dx / scale
    yu = math.exp(u.z - log_scale)
    yv = math.exp(v.z - log_scale)
    if abs(d) < _VERTICAL_RATIO * max(yu, yv):
        return None
    c = d / 2 + (yv - yu) * (yv + yu) / (2 * d)
    r = math.hypot(c, yu)
    return _Arc(u.x, scale, c, r, math.atan2(yu, -c), math.atan2(yv, d - c))


def geodesic_max_height(u: PlanePoint, v: PlanePoint) -> float:
    arc = _arc(u, v)
    if arc is None:
        return max(u.z, v.z)
    lo, hi = sorted((arc.theta_u, arc.theta_v))
    if lo <= math.pi / 2 <= hi:
        return math.log(arc.scale) + math.log(arc.radius)
    return max(u.z, v.z)


def plane_geodesic_points(u: PlanePoint, v: PlanePoint, samples: int) -> list[PlanePoint]:
    """Points on the geodesic from u to v, evenly spaced in arc length."""
    if samples < 2:
        raise PlaneError("samples must be >= 2")
    arc = _arc(u, v)
    if arc is None:
        zs = np.linspace(u.z, v.z, samples)
        pts = [PlanePoint(u.x, float(z)) for z in zs]
    else:
        # arc length along a semicircle is log tan(theta/2)
        su = math.log(math.tan(arc.theta_u / 2))
        sv = math.log(math.tan(arc.theta_v / 2))
        theta = 2 * np.arctan(np.exp(np.linspace(su, sv, samples)))
        xs = arc.x0 + arc.scale * (arc.centre + arc.radius * np.cos(theta))
        zs = math.log(arc.scale) + math.log(arc.radius) + np.log(np.sin(theta))
        pts = [PlanePoint(float(x), float(z)) for x, z in zip(xs, zs)]
    pts[0], pts[-1] = u, v
    return pts


def plane_geodesic(u: PlanePoint, v: PlanePoint, samples: int = 64) -> PathH:
    pts = plane_geodesic_points(u, v, samples)
    xs = np.array([p.x for p in pts])
    zs = np.array([p.z for p in pts])
    steps = plane_distance_many(xs[:-1], zs[:-1], xs[1:], zs[1:])
    return PathH(tuple(pts), steps)


# -- capped paths ----------------------------------------------------------


@dataclass(frozen=True)
class CappedPlan:
    """Best member of the ascend / follow horocycle / descend family.

    `exit_x` and `entry_x` are where the path meets and leaves the horocycle
    at height `cap`. When the cap is inactive both are None and the plan is
    the plain geodesic.
    """

    u: PlanePoint
    v: PlanePoint
    cap: float
    length: float
    exit_x: float | None
    entry_x: float | None
    rise: float = 0.0
    horocycle: float = 0.0
    fall: float = 0.0

    @property
    def capped(self) -> bool:
        return self.exit_x is not None


def _tangent_offset(z: float, cap: float) -> float:
    """Horizontal offset from a point at height z to the top of the geodesic
    that just touches height cap."""
    return math.exp(cap) * math.sqrt(-math.expm1(2 * (z - cap)))


def capped_plan(u: PlanePoint, v: PlanePoint, cap: float) -> CappedPlan:
    if u == v:
        raise PlaneError("capped path needs distinct endpoints")
    if cap < max(u.z, v.z):
        raise PlaneError(f"cap {cap} below an endpoint height ({u.z}, {v.z})")
    _guard(u.z, v.z, cap)
    if geodesic_max_height(u, v) <= cap:
        return CappedPlan(u, v, cap, plane_distance(u, v), None, None)
    sign = 1.0 if v.x >= u.x else -1.0
    # work left-to-right in a frame where u sits at abscissa 0
    span = abs(v.x - u.x)
    a_max = _tangent_offset(u.z, cap)
    b_min = span - _tangent_offset(v.z, cap)
    if a_max > b_min:
        raise PlaneError("tangent points cross; geodesic should not exceed the cap")
    rate = math.exp(-cap)

    def rise(a):
        return _distance_xz(a, u.z, cap)

    def fall(b):
        return _distance_xz(span - b, cap, v.z)

    # the two switch points decouple: optimise each on its feasible interval
    ra = minimize_scalar(lambda a: rise(a) - a * rate, bounds=(0.0, a_max), method="bounded",
                         options={"xatol": 1e-12 * max(a_max, 1.0)})
    rb = minimize_scalar(lambda b: fall(b) + b * rate, bounds=(b_min, span), method="bounded",
                         options={"xatol": 1e-12 * max(span, 1.0)})
    candidates = [(a_max, b_min), (float(ra.x), float(rb.x))]
    best = None
    for a, b in candidates:
        pieces = (float(rise(a)), (b - a) * rate, float(fall(b)))
        total = sum(pieces)
        if best is None or total < best[0]:
            best = (total, a, b, pieces)
    total, a, b, (l1, l2, l3) = best
    return CappedPlan(u, v, cap, total, u.x + sign * a, u.x + sign * b, l1, l2, l3)


def capped_min_length(u: PlanePoint, v: PlanePoint, cap: float) -> float:
    return capped_plan(u, v, cap).length


def capped_path(plan: CappedPlan, samples: int = 64) -> PathH:
    """Polyline realisation of a plan with exact step lengths.

    Steps on the horocycle carry horocyclic length |dx| e^{-cap}, which is
    what the path really travels; geodesic pieces carry chord distances.
    """
    if not plan.capped:
        return plane_geodesic(plan.u, plan.v, samples)
    top_a = PlanePoint(plan.exit_x, plan.cap)
    top_b = PlanePoint(plan.entry_x, plan.cap)
    first = plane_geodesic(plan.u, top_a, samples)
    last = plane_geodesic(top_b, plan.v, samples)
    xs = np.linspace(plan.exit_x, plan.entry_x, samples)
    flat = [PlanePoint(float(x), plan.cap) for x in xs]
    flat[0], flat[-1] = top_a, top_b
    flat_steps = np.abs(np.diff(xs)) * math.exp(-plan.cap)
    mid = PathH(tuple(flat), flat_steps)
    return first.concat(mid).concat(last)


def geodesic_point_at(u: PlanePoint, v: PlanePoint, s: float) -> PlanePoint:
    """Point at arc length s from u towards v (clamped to the segment)."""
    total = plane_distance(u, v)
    if total == 0:
        return u
    s = min(max(s, 0.0), total)
    arc = _arc(u, v)
    if arc is None:
        step = s if v.z >= u.z else -s
        return PlanePoint(u.x, u.z + step)
    su = math.log(math.tan(arc.theta_u / 2))
    sv = math.log(math.tan(arc.theta_v / 2))
    theta = 2 * math.atan(math.exp(su + math.copysign(s, sv - su)))
    x = arc.x0 + arc.scale * (arc.centre + arc.radius * math.cos(theta))
    z = math.log(arc.scale) + math.log(arc.radius) + math.log(math.sin(theta))
    return PlanePoint(x, z)
