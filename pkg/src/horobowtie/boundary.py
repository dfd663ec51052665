"""Boundary cells of DL(p, q) and asymptotic classes of vertical rays.

A ray whose product height goes to -inf has its p-side falling into a
p-tree end while its q-side climbs to the distinguished end of the q-tree.
Its cell is tagged UP, after the q-side direction, and carries the p-side
digits. Rays whose height goes to +inf are tagged DOWN and carry q-side
digits. A ray whose both sides end at the distinguished ends would need
bounded height, which no geodesic ray has.

Cylinders are read on the levels just below the ray's starting height:
digit at level n-1, then n-2, down to n-k. The enumerated cells cover the
ends below the start vertex. A ray whose falling side first climbs past
the start and comes down elsewhere gets the digits from its confluence
with the start down to level n as well, written before a dot, so its
label lies outside the enumerated cells.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import tree as tr
from .horoproduct import HoroPoint, HoroSpace, coarse_distance, format_horo_point

DEFAULT_HORIZON = 50
DEFAULT_WINDOW = 10


class InconclusiveError(RuntimeError):
    pass


class UnsupportedError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class BoundaryPoint:
    variant: str  # "UP" or "DOWN"
    word: str
    flagged: bool = field(default=False, compare=False)

    @property
    def depth(self) -> int:
        return len(self.word.rsplit(".", 1)[-1])

    def __str__(self) -> str:
        side = "p" if self.variant == "UP" else "q"
        return f"{self.variant}[{side}={self.word}]"


def _require_trees(space: HoroSpace) -> None:
    if not space.exact:
        raise UnsupportedError("boundary cells need tree components")


def enumerate_cells(space: HoroSpace, k: int) -> list[BoundaryPoint]:
    _require_trees(space)
    if k < 1:
        raise ValueError("depth must be >= 1")

    def words(base: int) -> list[str]:
        out = []
        for code in range(base**k):
            digits = []
            for _ in range(k):
                code, d = divmod(code, base)
                digits.append(str(d))
            out.append("".join(reversed(digits)))
        return sorted(out)

    zero = "0" * k
    ups = [BoundaryPoint("UP", w, w == zero) for w in words(space.left.p)]
    downs = [BoundaryPoint("DOWN", w, w == zero) for w in words(space.right.p)]
    return ups + downs


@dataclass(frozen=True)
class RayWitness:
    """A finite path plus an optional vertical continuation.

    With `direction` = +1 the ray continues upward: the p-side climbs and
    the q-side descends, taking `tail_digits` one level at a time and zeros
    afterwards. With -1 the roles swap. With None the ray is only its
    prefix and every question about it must be settled within that data.
    """

    prefix: tuple[HoroPoint, ...]
    direction: int | None = None
    tail_digits: tuple[int, ...] = ()

    def point(self, t: int) -> HoroPoint:
        n = len(self.prefix)
        if t < n:
            return self.prefix[t]
        if self.direction is None:
            raise InconclusiveError(f"ray only known up to parameter {n - 1}")
        cur = self.prefix[-1]
        for s in range(t - n + 1):
            d = self.tail_digits[s] if s < len(self.tail_digits) else 0
            if self.direction > 0:
                cur = HoroPoint(tr.parent(cur.p_part), tr.child(cur.q_part, d))
            else:
                cur = HoroPoint(tr.child(cur.p_part, d), tr.parent(cur.q_part))
        return cur

    def points(self, upto: int) -> list[HoroPoint]:
        """Points at parameters 0..upto, built incrementally."""
        out = list(self.prefix[: upto + 1])
        if len(out) == upto + 1:
            return out
        if self.direction is None:
            raise InconclusiveError(f"ray only known up to parameter {len(self.prefix) - 1}")
        cur = out[-1]
        s = 0
        while len(out) <= upto:
            d = self.tail_digits[s] if s < len(self.tail_digits) else 0
            if self.direction > 0:
                cur = HoroPoint(tr.parent(cur.p_part), tr.child(cur.q_part, d))
            else:
                cur = HoroPoint(tr.child(cur.p_part, d), tr.parent(cur.q_part))
            out.append(cur)
            s += 1
        return out

    def shifted(self, steps: int) -> "RayWitness":
        """The same ray started `steps` later along the prefix."""
        if steps >= len(self.prefix):
            raise ValueError("can only shift within the prefix")
        return RayWitness(self.prefix[steps:], self.direction, self.tail_digits)


def vertical_ray(start: HoroPoint, direction: int, digits: Sequence[int] = ()) -> RayWitness:
    return RayWitness((start,), direction, tuple(digits))


def verify_ray(space: HoroSpace, ray: RayWitness, horizon: int = DEFAULT_HORIZON) -> bool:
    """Geodesic check of the finite part: d(r(0), r(t)) = t and unit steps."""
    pts = ray.points(horizon)
    o = pts[0]
    for t, z in enumerate(pts):
        if coarse_distance(space, o, z) != t:
            return False
        if t and coarse_distance(space, pts[t - 1], z) != 1:
            return False
    return True


def _direction(space: HoroSpace, ray: RayWitness, window: int) -> int:
    if ray.direction is not None:
        return ray.direction
    hs = [space.height(z) for z in ray.prefix[-(window + 1):]]
    if len(hs) < window + 1:
        raise InconclusiveError("prefix shorter than the stabilization window")
    steps = np.diff(hs)
    if np.all(steps > 0):
        return 1
    if np.all(steps < 0):
        return -1
    raise InconclusiveError("height not monotone over the stabilization window")


def ray_direction(space: HoroSpace, ray: RayWitness, k: int, window: int = DEFAULT_WINDOW) -> BoundaryPoint:
    _require_trees(space)
    sign = _direction(space, ray, window)
    o = ray.prefix[0]
    base = o.p_part.n if sign < 0 else o.q_part.n
    # walk until the falling side is below the last level we must read
    t = len(ray.prefix) - 1
    while True:
        z = ray.point(t)
        falling = z.p_part if sign < 0 else z.q_part
        if falling.n <= base - k:
            break
        if ray.direction is None:
            raise InconclusiveError(f"ray does not reach depth {k} below its start")
        t += 1
    start = o.p_part if sign < 0 else o.q_part
    top = tr.confluence_level(falling, start)
    # an end outside the subtree below the start needs its digits above the start level too
    lead = "".join(str(falling.digit_at(lvl)) for lvl in range(top - 1, base - 1, -1))
    word = "".join(str(falling.digit_at(base - i)) for i in range(1, k + 1))
    if lead:
        return BoundaryPoint("UP" if sign < 0 else "DOWN", f"{lead}.{word}", False)
    return BoundaryPoint("UP" if sign < 0 else "DOWN", word, word == "0" * k)


def _profile(space: HoroSpace, a: list, b: list, horizon: int, window: int, t_from: int = 0) -> np.ndarray:
    """D(t) = min over |s - t| <= window of d(a[t], b[s]) for t_from <= t <= horizon."""
    out = np.empty(horizon + 1 - t_from)
    for t in range(t_from, horizon + 1):
        best = coarse_distance(space, a[t], b[t])
        for s in range(max(0, t - window), t + window + 1):
            if s != t and best > 0:
                best = min(best, coarse_distance(space, a[t], b[s]))
        out[t - t_from] = best
    return out


def distance_profile(space: HoroSpace, r1: RayWitness, r2: RayWitness, horizon: int, window: int) -> np.ndarray:
    """D(t) = min over |s - t| <= window of d(r1(t), r2(s)), t = 0..horizon."""
    return _profile(space, r1.points(horizon), r2.points(horizon + window), horizon, window)


def _non_increasing(profile: np.ndarray) -> bool:
    return bool(np.all(np.diff(profile) <= 0))


def _check_horizon(rays: Sequence[RayWitness], horizon: int, window: int) -> None:
    if horizon < window:
        raise InconclusiveError(f"horizon {horizon} shorter than window {window}")
    for r in rays:
        if r.direction is None and len(r.prefix) < horizon + window + 1:
            raise InconclusiveError("ray not determined up to the horizon")


def _is_vertical_pair(r1: RayWitness, r2: RayWitness) -> bool:
    return (len(r1.prefix) == 1 and len(r2.prefix) == 1 and r1.prefix[0] == r2.prefix[0]
            and r1.direction == r2.direction)


def _decide(space: HoroSpace, a: list, b: list, matched: bool, horizon: int, window: int) -> bool:
    t0 = horizon - window
    if matched:
        prof = np.array([coarse_distance(space, a[t], b[t]) for t in range(t0, horizon + 1)])
        return _non_increasing(prof)
    return (_non_increasing(_profile(space, a, b, horizon, window, t0))
            and _non_increasing(_profile(space, b, a, horizon, window, t0)))


def asymptotic(space: HoroSpace, r1: RayWitness, r2: RayWitness, horizon: int = DEFAULT_HORIZON,
               window: int = DEFAULT_WINDOW, vertical_fast: bool = True) -> bool:
    """Finite-horizon test for bounded Hausdorff distance between two rays.

    The distance profile from each ray to the other must be non-increasing
    over the last `window` parameters up to `horizon`. For two vertical rays
    leaving the same point, matched parameters are compared directly.
    """
    _check_horizon((r1, r2), horizon, window)
    matched = vertical_fast and _is_vertical_pair(r1, r2)
    return _decide(space, r1.points(horizon + window), r2.points(horizon + window), matched, horizon, window)


def asymptotic_matrix(space: HoroSpace, rays: Sequence[RayWitness], horizon: int = DEFAULT_HORIZON,
                      window: int = DEFAULT_WINDOW) -> np.ndarray:
    """Pairwise asymptotic verdicts; the diagonal is true by reflexivity."""
    _check_horizon(rays, horizon, window)
    pts = [r.points(horizon + window) for r in rays]
    n = len(rays)
    out = np.eye(n, dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            if rays[i].direction is not None and rays[j].direction is not None \
                    and rays[i].direction != rays[j].direction:
                continue  # heights part ways linearly
            matched = _is_vertical_pair(rays[i], rays[j])
            out[i, j] = out[j, i] = _decide(space, pts[i], pts[j], matched, horizon, window)
    return out


def is_equivalence(m: np.ndarray) -> bool:
    """Reflexive, symmetric and transitive, the last via a boolean product."""
    m = np.asarray(m, dtype=bool)
    if not (np.all(np.diag(m)) and np.array_equal(m, m.T)):
        return False
    composed = (m.astype(np.int64) @ m.astype(np.int64)) > 0
    return bool(np.array_equal(composed, m))


def sample_vertical_rays(space: HoroSpace, n: int, seed: int, horizon: int = DEFAULT_HORIZON) -> list[RayWitness]:
    """Seeded vertical rays from the origin that straddle the horizon.

    Digits are drawn so that many rays share long common prefixes and first
    differ either well inside the horizon or just beyond it.
    """
    _require_trees(space)
    rng = np.random.default_rng(seed)
    o = HoroPoint(tr.origin(space.left.p), tr.origin(space.right.p))
    rays = []
    for _ in range(n):
        direction = int(rng.choice([-1, 1]))
        base = space.left.p if direction < 0 else space.right.p
        head = [int(d) for d in rng.integers(0, base, size=2)]
        split = int(rng.choice([3, horizon - 2, horizon, horizon + 3]))
        tail = [0] * (split - 1 - len(head)) + [int(rng.integers(0, base))]
        rays.append(vertical_ray(o, direction, head + tail))
    return rays


def label_at(space: HoroSpace, ray: RayWitness, depth: int) -> str:
    return str(ray_direction(space, ray, depth))


def format_ray(ray: RayWitness) -> str:
    start = format_horo_point(ray.prefix[0])
    return f"{start}+{ray.direction}:{''.join(map(str, ray.tail_digits))}"
