"""Shape analysis of paths in a horospherical product."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import plane as pl
from .dlgraph import DLGraph, first_geodesic_idx
from .horoproduct import (
    HoroPoint,
    HoroSpace,
    ProductVertical,
    dr_p,
    dr_q,
    path_length,
    product_path,
)
from .ledger import as_big, threshold, upper_rational
from .paths import PathError, PathH

PLANE_HEIGHT_RESOLUTION = 1e-3


class IntegrityError(ValueError):
    pass


class TooShortError(ValueError):
    pass


def _height_fn(space):
    return space.height


def _length_params(space, path: PathH) -> np.ndarray:
    if path.is_product:
        return path.cumulative(space.norm)
    return path.cumulative()


# -- statistics ----------------------------------------------------------------


@dataclass(frozen=True)
class PathStats:
    length: float
    h_plus: float
    h_minus: float
    argmax: int
    argmin: int


def path_stats(space, path: PathH) -> PathStats:
    """Length and extremal heights; ties go to the smallest index."""
    if not path.points:
        raise PathError("empty path")
    hs = [space.height(pt) for pt in path.points]
    n = max(range(len(hs)), key=lambda i: (hs[i], -i))
    m = min(range(len(hs)), key=lambda i: (hs[i], i))
    length = path_length(space, path) if path.is_product else path.component_length()
    return PathStats(length, hs[n], hs[m], n, m)


# -- coarse monotonicity -------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    label: str  # "inc", "dec", or "flat" for a step that is neither
    start: int
    end: int


def _exact(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def _extends(ts, hs, s: int, e: int, c: Fraction, sign: int) -> bool:
    """Can point e join the monotone run that starts at s?"""
    te = ts[e]
    for i in range(s, e):
        if te - ts[i] > c and sign * (hs[e] - hs[i]) <= 0:
            return False
    return True


def monotone_decomposition(space, path: PathH, c=0) -> list[Segment]:
    """Greedy left-to-right split into maximal C-coarsely monotone runs.

    A run is increasing when any two of its points more than C apart in
    arc length have strictly increasing heights; decreasing symmetrically.
    Consecutive runs share their boundary point.
    """
    c = as_big(c)
    if c < 0:
        raise ValueError("coarseness must be >= 0")
    n = len(path)
    if n == 1:
        return []
    params = _length_params(space, path)
    hs = [space.height(pt) for pt in path.points]
    if c >= _exact(float(params[-1])):
        return [Segment(_net_label(hs[0], hs[-1]), 0, n - 1)]
    ts = [_exact(float(t)) for t in params]
    hx = [_exact(h) for h in hs]
    out: list[Segment] = []
    s = 0
    while s < n - 1:
        ends = {}
        for label, sign in (("inc", 1), ("dec", -1)):
            e = s
            while e + 1 < n and _extends(ts, hx, s, e + 1, c, sign):
                e += 1
            ends[label] = e
        best = max(ends.values())
        if best == s:
            out.append(Segment("flat", s, s + 1))
            s += 1
            continue
        both = [lab for lab, e in ends.items() if e == best]
        label = both[0] if len(both) == 1 else _net_label(hs[s], hs[best])
        out.append(Segment(label, s, best))
        s = best
    return out


def _net_label(h0, h1) -> str:
    return "dec" if h1 < h0 else "inc"


def pattern(segments: Sequence[Segment]) -> list[str]:
    return [s.label for s in segments]


def fits_pattern(labels: Sequence[str], template: Sequence[str]) -> bool:
    """True when labels is a contiguous piece of template (possibly degenerate)."""
    k = len(labels)
    if k == 0:
        return True
    return any(list(template[i : i + k]) == list(labels) for i in range(len(template) - k + 1))


# -- height bounds -------------------------------------------------------------


@dataclass(frozen=True)
class HeightBoundReport:
    h_minus: float
    h_plus: float
    expected_minus: float
    expected_plus: float
    dev_minus: float
    dev_plus: float
    certified_minus: bool
    certified_plus: bool

    @property
    def exact(self) -> bool:
        return self.dev_minus == 0 and self.dev_plus == 0


def verify_height_bounds(space: HoroSpace, path: PathH, oracle_distance=None) -> HeightBoundReport:
    """Compare the extremal heights of a geodesic with the coarse prediction.

    With h(x) <= h(y) the lowest point should sit near h(x) - d_r(q)/2 and
    the highest near h(y) + d_r(p)/2. Pass `oracle_distance` to have the
    path's length checked against it first.
    """
    if space.height(path.start) > space.height(path.end):
        path = path.reversed()
    st = path_stats(space, path)
    if oracle_distance is not None and abs(st.length - oracle_distance) > 1e-9:
        raise IntegrityError(f"path length {st.length} differs from oracle distance {oracle_distance}")
    x, y = path.start, path.end
    exp_minus = space.height(x) - dr_q(space, x, y) / 2
    exp_plus = space.height(y) + dr_p(space, x, y) / 2
    dm = abs(st.h_minus - exp_minus)
    dp = abs(st.h_plus - exp_plus)
    bound = threshold(space.ledger, "C0_x4")
    return HeightBoundReport(
        st.h_minus, st.h_plus, exp_minus, exp_plus, dm, dp,
        upper_rational(dm) <= bound, upper_rational(dp) <= bound,
    )


# -- distances to verticals and geodesics --------------------------------------


def component_dist_to_vertical(comp, z, anchor) -> float:
    """inf over t of d(z, V_anchor(t))."""
    hz = comp.height(z)
    if comp.kind == "tree":
        best = comp.distance(z, comp.vertical_point(anchor, hz))
        k = 1
        while k < best:
            for t in (hz - k, hz + k):
                best = min(best, comp.distance(z, comp.vertical_point(anchor, t)))
            k += 1
        return float(best)
    # the plane: closest point of a vertical line has a closed form
    dx = abs(z.x - anchor.x)
    return float(np.arcsinh(dx * math.exp(-z.z)))


def product_dist_to_vertical(space: HoroSpace, z: HoroPoint, v: ProductVertical) -> float:
    """inf over t of N(d_p(z_p, V_p(t)), d_q(z_q, V_q(-t)))."""
    hz = space.height(z)
    norm = space.norm
    if space.exact:
        def at(t):
            w = v(t)
            return norm.evaluate(space.left.distance(z.p_part, w.p_part),
                                 space.right.distance(z.q_part, w.q_part))

        best = at(hz)
        k = 1
        # both coordinates move by at least |t - hz|, so N does too
        while k < best:
            best = min(best, at(hz - k), at(hz + k))
            k += 1
        return float(best)

    def at_grid(ts):
        dp = pl.plane_distance_many(z.p_part.x, z.p_part.z, v.p_anchor.x, ts) if space.left.kind == "plane" else None
        dq = pl.plane_distance_many(z.q_part.x, z.q_part.z, v.q_anchor.x, -ts) if space.right.kind == "plane" else None
        return norm.evaluate(dp, dq)

    if space.left.kind != "plane" or space.right.kind != "plane":
        raise ValueError("mixed products are not supported here")
    best = float(at_grid(np.array([hz]))[0])
    ts = np.arange(hz - best, hz + best + PLANE_HEIGHT_RESOLUTION, PLANE_HEIGHT_RESOLUTION)
    return float(min(best, np.min(at_grid(ts))))


def component_dist_to_geodesic(comp, z, a, b) -> float:
    if comp.kind == "tree":
        return (comp.distance(z, a) + comp.distance(z, b) - comp.distance(a, b)) / 2
    pts = comp.geodesic(a, b, 512).points
    xs = np.array([p.x for p in pts])
    zs = np.array([p.z for p in pts])
    return float(np.min(pl.plane_distance_many(z.x, z.z, xs, zs)))


# -- shapes --------------------------------------------------------------------


@dataclass(frozen=True)
class ShapeReport:
    case: str  # TYPE1 / TYPE2 by the height-gap threshold, else EITHER
    shape: str  # the fitted shape, TYPE1 or TYPE2
    v1: ProductVertical
    corner: ProductVertical
    v2: ProductVertical
    kappa_eff: float
    kappa_other: float
    certified: bool


def _fit(space: HoroSpace, path: PathH, shape: str) -> tuple[float, tuple]:
    st = path_stats(space, path)
    x, y = path.start, path.end
    m, n = path.points[st.argmin], path.points[st.argmax]
    if shape == "TYPE1":
        v1 = ProductVertical(space, m.p_part, x.q_part)
        v2 = ProductVertical(space, y.p_part, n.q_part)
    else:
        v1 = ProductVertical(space, x.p_part, n.q_part)
        v2 = ProductVertical(space, m.p_part, y.q_part)
    corner = ProductVertical(space, m.p_part, n.q_part)
    kappa = 0.0
    for z in path.points:
        d = min(product_dist_to_vertical(space, z, v) for v in (v1, corner, v2))
        kappa = max(kappa, d)
    return kappa, (v1, corner, v2)


def classify_shape(space: HoroSpace, path: PathH) -> ShapeReport:
    x, y = path.start, path.end
    gap = as_big(space.height(y)) - as_big(space.height(x))
    seven = threshold(space.ledger, "C0_x7")
    if gap >= seven:
        case = "TYPE1"
    elif gap <= -seven:
        case = "TYPE2"
    else:
        case = "EITHER"
    k1, f1 = _fit(space, path, "TYPE1")
    k2, f2 = _fit(space, path, "TYPE2")
    if case == "TYPE1" or (case == "EITHER" and (k1 < k2 or (k1 == k2 and _starts_down(space, path)))):
        shape, kappa, other, fit = "TYPE1", k1, k2, f1
    else:
        shape, kappa, other, fit = "TYPE2", k2, k1, f2
    certified = upper_rational(kappa) <= threshold(space.ledger, "C0_x196_CN")
    return ShapeReport(case, shape, *fit, kappa, other, certified)


def _starts_down(space, path: PathH) -> bool:
    segs = monotone_decomposition(space, path, 0)
    return bool(segs) and segs[0].label == "dec"


# -- types ---------------------------------------------------------------------


@dataclass(frozen=True)
class TypeReport:
    is_hp_type: bool
    is_hq_type: bool
    kappa_hp: float
    kappa_hq: float
    kappa_vertical: float
    is_vertical: bool
    line_like: bool
    scale: float


def _projection_fit_geodesic(comp, pts: list) -> float:
    """Distance of points to the geodesic through their farthest pair."""
    best = (-1.0, 0, 0)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = comp.distance(pts[i], pts[j])
            if d > best[0]:
                best = (d, i, j)
    _, i, j = best
    a, b = pts[i], pts[j]
    return max(component_dist_to_geodesic(comp, z, a, b) for z in pts)


def _anchor_candidates(comp, pts: list) -> list:
    hs = [comp.height(z) for z in pts]
    idx = {0, len(pts) - 1, int(np.argmin(hs)), int(np.argmax(hs))}
    return [pts[i] for i in sorted(idx)]


def _projection_fit_vertical(comp, pts: list) -> float:
    return min(
        max(component_dist_to_vertical(comp, z, a) for z in pts)
        for a in _anchor_candidates(comp, pts)
    )


def classify_type(space: HoroSpace, path: PathH, scale: float = 0.0, min_steps: int = 20) -> TypeReport:
    """Fit the path against the two line types at a given scale.

    H_p-type means the q-side hugs one vertical while the p-side hugs a
    geodesic; H_q-type is the mirror image. `line_like` records whether the
    path changes monotonicity at most once, which every sub-segment of a
    bi-infinite geodesic does.
    """
    if len(path) - 1 < min_steps:
        raise TooShortError(f"path has {len(path) - 1} steps, need at least {min_steps}")
    ps = [z.p_part for z in path.points]
    qs = [z.q_part for z in path.points]
    p_geo = _projection_fit_geodesic(space.left, ps)
    q_geo = _projection_fit_geodesic(space.right, qs)
    p_vert = _projection_fit_vertical(space.left, ps)
    q_vert = _projection_fit_vertical(space.right, qs)
    k_hp = max(p_geo, q_vert)
    k_hq = max(q_geo, p_vert)
    k_vert = min(
        max(product_dist_to_vertical(space, z, ProductVertical(space, a, b)) for z in path.points)
        for a in _anchor_candidates(space.left, ps)
        for b in _anchor_candidates(space.right, qs)
    )
    segs = monotone_decomposition(space, path, Fraction(scale))
    return TypeReport(k_hp <= scale, k_hq <= scale, k_hp, k_hq, k_vert, k_vert <= scale, len(segs) <= 2, scale)


# -- dead ends -----------------------------------------------------------------


@dataclass(frozen=True)
class DeadEnd:
    vertex: HoroPoint
    index: int
    depth: int
    geodesic: list[HoroPoint] = field(repr=False)


def dead_end_census(g: DLGraph) -> list[DeadEnd]:
    """Vertices no geodesic from the origin can be extended past.

    A vertex is only judged when all p + q of its neighbors lie in the
    ball, so the verdict never depends on the ball's edge. That holds for
    every vertex below the radius and for some on the sphere itself.
    """
    if g.radius < 3:
        raise ValueError("dead-end census needs radius >= 3")
    d = g.d_origin
    degree = g.p + g.q
    out = []
    for v in range(len(g.vertices)):
        dv = int(d[v])
        nb = g.neighbors(v)
        if dv == 0 or len(nb) < degree:
            continue
        if all(int(d[w]) <= dv for w in nb):
            geo = first_geodesic_idx(g, v, g.origin)[::-1]
            out.append(DeadEnd(g.vertices[v], v, dv, [g.vertices[k] for k in geo]))
    return out


def dl_path(space: HoroSpace, g: DLGraph, idx: Sequence[int]) -> PathH:
    return product_path(space, [g.vertices[k] for k in idx])
