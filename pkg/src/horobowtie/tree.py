"""The (p+1)-regular tree seen from one of its ends.

A vertex at height n is the finitely supported digit sequence that records
which child was taken at every level l >= n on the way down from the end.
Zero digits are never stored, so equal vertices have equal representations.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

DEFAULT_VERTEX_BUDGET = 5_000_000


class TreeError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


@dataclass(frozen=True, slots=True, order=True)
class TreeVertex:
    p: int
    n: int
    digits: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.p < 2:
            raise TreeError(f"p must be >= 2, got {self.p}")
        last = None
        for level, digit in self.digits:
            if level < self.n:
                raise TreeError(f"digit at level {level} below height {self.n}")
            if not 0 < digit < self.p:
                raise TreeError(f"digit {digit} at level {level} must be in 1..{self.p - 1}")
            if last is not None and level <= last:
                raise TreeError("digit levels must be strictly ascending")
            last = level

    @classmethod
    def make(cls, p: int, n: int, digits: dict[int, int] | None = None) -> "TreeVertex":
        """Build from a level->digit map, dropping zeros."""
        items = sorted((lvl, d) for lvl, d in (digits or {}).items() if d != 0)
        return cls(p, n, tuple(items))

    @property
    def height(self) -> int:
        return self.n

    def digit_at(self, level: int) -> int:
        for lvl, d in self.digits:
            if lvl == level:
                return d
        return 0

    def digit_map(self) -> dict[int, int]:
        return dict(self.digits)

    def __str__(self) -> str:
        return format_vertex(self)


def origin(p: int) -> TreeVertex:
    return TreeVertex(p, 0, ())


def parent(v: TreeVertex) -> TreeVertex:
    return TreeVertex(v.p, v.n + 1, tuple(item for item in v.digits if item[0] != v.n))


def child(v: TreeVertex, d: int) -> TreeVertex:
    if not 0 <= d < v.p:
        raise TreeError(f"digit {d} out of range 0..{v.p - 1}")
    if d == 0:
        return TreeVertex(v.p, v.n - 1, v.digits)
    return TreeVertex(v.p, v.n - 1, ((v.n - 1, d),) + v.digits)


def children(v: TreeVertex) -> list[TreeVertex]:
    return [child(v, d) for d in range(v.p)]


def neighbors(v: TreeVertex) -> list[TreeVertex]:
    return [parent(v)] + children(v)


def ancestor(v: TreeVertex, height: int) -> TreeVertex:
    """The vertex at `height` on the upward ray from v (height >= v.n)."""
    if height < v.n:
        raise TreeError(f"ancestor height {height} below vertex height {v.n}")
    return TreeVertex(v.p, height, tuple(item for item in v.digits if item[0] >= height))


def vertical_point(v: TreeVertex, t: int) -> TreeVertex:
    """Point at height t on the vertical through v; below v take the zero child."""
    if t >= v.n:
        return ancestor(v, t)
    return TreeVertex(v.p, t, v.digits)


def confluence_level(u: TreeVertex, v: TreeVertex) -> int:
    """Height where the upward rays from u and v merge."""
    if u.p != v.p:
        raise TreeError(f"vertices from different trees (p={u.p}, p={v.p})")
    floor = max(u.n, v.n)
    du, dv = u.digits, v.digits
    i, j = len(du) - 1, len(dv) - 1
    # walk both digit lists from the top level down; the first mismatch decides
    while i >= 0 or j >= 0:
        lu = du[i][0] if i >= 0 else None
        lv = dv[j][0] if j >= 0 else None
        if lv is None or (lu is not None and lu > lv):
            level = lu
            mismatch = True
            i -= 1
        elif lu is None or lv > lu:
            level = lv
            mismatch = True
            j -= 1
        else:
            level = lu
            mismatch = du[i][1] != dv[j][1]
            i -= 1
            j -= 1
        if level < floor:
            break
        if mismatch:
            return level + 1
    return floor


def tree_distance(u: TreeVertex, v: TreeVertex) -> int:
    top = confluence_level(u, v)
    return (top - u.n) + (top - v.n)


def tree_relative_distance(u: TreeVertex, v: TreeVertex) -> int:
    return 2 * (confluence_level(u, v) - max(u.n, v.n))


def tree_geodesic(u: TreeVertex, v: TreeVertex) -> list[TreeVertex]:
    top = confluence_level(u, v)
    up = [ancestor(u, t) for t in range(u.n, top + 1)]
    down = [ancestor(v, t) for t in range(top - 1, v.n - 1, -1)]
    return up + down


# -- serialization ---------------------------------------------------------


def format_vertex(v: TreeVertex) -> str:
    body = ",".join(f"{lvl}:{d}" for lvl, d in v.digits)
    return f"T{v.p}(h={v.n};{body})"


def parse_vertex(text: str) -> TreeVertex:
    from .grammar import parse_tree_vertex

    return parse_tree_vertex(text)


# -- finite balls ----------------------------------------------------------


@dataclass(frozen=True)
class TreeBall:
    p: int
    center: TreeVertex
    radius: int
    vertices: tuple[TreeVertex, ...]
    adjacency: tuple[tuple[int, ...], ...]

    def index(self) -> dict[TreeVertex, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, nbrs in enumerate(self.adjacency) for j in nbrs if i < j]

    def to_json(self) -> str:
        return json.dumps(
            {
                "p": self.p,
                "radius": self.radius,
                "vertices": [format_vertex(v) for v in self.vertices],
                "edges": [list(e) for e in self.edges()],
            },
            sort_keys=True,
        )


def bfs_layers(
    start: Iterable, neighbor_fn, radius: int, budget: int
) -> dict:
    """Generic BFS returning vertex -> distance, failing past the budget."""
    dist = {}
    queue: deque = deque()
    for s in start:
        dist[s] = 0
        queue.append(s)
    while queue:
        v = queue.popleft()
        dv = dist[v]
        if dv == radius:
            continue
        for w in neighbor_fn(v):
            if w not in dist:
                dist[w] = dv + 1
                if len(dist) > budget:
                    raise BudgetError(f"ball exceeds vertex budget {budget}")
                queue.append(w)
    return dist


def generate_ball(
    p: int, center: TreeVertex | None = None, radius: int = 1, budget: int = DEFAULT_VERTEX_BUDGET
) -> TreeBall:
    if radius < 0:
        raise TreeError("radius must be >= 0")
    center = center if center is not None else origin(p)
    if center.p != p:
        raise TreeError("center belongs to a different tree")
    dist = bfs_layers([center], neighbors, radius, budget)
    verts = tuple(sorted(dist, key=format_vertex))
    idx = {v: i for i, v in enumerate(verts)}
    adj = tuple(
        tuple(sorted(idx[w] for w in neighbors(v) if w in idx)) for v in verts
    )
    return TreeBall(p, center, radius, verts, adj)


def iter_vertices_at_height(p: int, height: int, levels: range) -> Iterator[TreeVertex]:
    """All vertices at `height` whose digits live on `levels` (test helper)."""
    lv = [lvl for lvl in levels if lvl >= height]
    for code in range(p ** len(lv)):
        digits = {}
        for lvl in lv:
            code, d = divmod(code, p)
            digits[lvl] = d
        yield TreeVertex.make(p, height, digits)


def encode_digits(vertices: list[TreeVertex], lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """Dense (heights, digits[level lo..hi]) arrays for the array kernels."""
    heights = np.array([v.n for v in vertices], dtype=np.int64)
    table = np.zeros((len(vertices), hi - lo + 1), dtype=np.int8)
    for i, v in enumerate(vertices):
        for lvl, d in v.digits:
            if not lo <= lvl <= hi:
                raise TreeError(f"level {lvl} outside encoding window [{lo}, {hi}]")
            table[i, lvl - lo] = d
    return heights, table
