"""Finite balls of Diestel-Leader graphs as exact distance oracles.

DL(p, q) has a vertex (u, v) for every pair of tree vertices with
h(u) + h(v) = 0, and an edge whenever both sides move along a tree edge.
In a ball of radius R around the origin, a geodesic between x and y never
leaves the ball as long as d(o,x) + d(o,y) + d(x,y) <= 2R, since every
point z on it has d(o,z) <= min(d(o,x) + d(x,z), d(o,y) + d(z,y)).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from . import tree as tr
from .horoproduct import HoroPoint, format_horo_point
from .tree import BudgetError, TreeVertex

DEFAULT_BALL_BUDGET = 5_000_000
DEFAULT_GEODESIC_BUDGET = 1_000_000


class OracleError(ValueError):
    pass


def dl_neighbors(x: HoroPoint) -> list[HoroPoint]:
    u, v = x.p_part, x.q_part
    up_p = [HoroPoint(tr.parent(u), c) for c in tr.children(v)]
    up_q = [HoroPoint(c, tr.parent(v)) for c in tr.children(u)]
    return up_p + up_q


@dataclass(frozen=True, eq=False)
class DLGraph:
    p: int
    q: int
    radius: int
    vertices: tuple[HoroPoint, ...]
    indptr: np.ndarray
    indices: np.ndarray
    origin: int

    @cached_property
    def index(self) -> dict[HoroPoint, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def d_origin(self) -> np.ndarray:
        return self.bfs(self.origin)

    @cached_property
    def heights(self) -> np.ndarray:
        return np.array([v.p_part.n for v in self.vertices], dtype=np.int64)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def bfs(self, source: int, max_depth: int = 1 << 30) -> np.ndarray:
        return kernels.bfs_distances(self.indptr, self.indices, source, max_depth)

    def to_json(self) -> str:
        edges = [[i, int(j)] for i in range(len(self.vertices)) for j in self.neighbors(i) if i < j]
        return json.dumps(
            {"p": self.p, "q": self.q, "radius": self.radius,
             "vertices": [format_horo_point(v) for v in self.vertices], "edges": edges},
            sort_keys=True,
        )

    # tree projections, used by the array form of the coarse formula
    @cached_property
    def projections(self) -> "Projections":
        return Projections.build(self)


@dataclass(frozen=True, eq=False)
class Projections:
    p_parts: list[TreeVertex]
    q_parts: list[TreeVertex]
    pidx: np.ndarray
    qidx: np.ndarray
    dp: np.ndarray
    dq: np.ndarray

    @classmethod
    def build(cls, g: DLGraph) -> "Projections":
        p_parts = sorted({v.p_part for v in g.vertices})
        q_parts = sorted({v.q_part for v in g.vertices})
        pi = {v: i for i, v in enumerate(p_parts)}
        qi = {v: i for i, v in enumerate(q_parts)}
        pidx = np.array([pi[v.p_part] for v in g.vertices], dtype=np.int64)
        qidx = np.array([qi[v.q_part] for v in g.vertices], dtype=np.int64)
        return cls(p_parts, q_parts, pidx, qidx, _tree_matrix(p_parts), _tree_matrix(q_parts))


def _tree_matrix(parts: list[TreeVertex]) -> np.ndarray:
    levels = [lvl for v in parts for lvl, _ in v.digits] + [v.n for v in parts]
    lo, hi = min(levels), max(levels)
    heights, table = tr.encode_digits(parts, lo, hi)
    return kernels.tree_distance_matrix(heights, table, lo)


def dl_origin(p: int, q: int) -> HoroPoint:
    return HoroPoint(tr.origin(p), tr.origin(q))


def dl_ball(p: int, q: int, radius: int, budget: int = DEFAULT_BALL_BUDGET) -> DLGraph:
    if radius < 0:
        raise OracleError("radius must be >= 0")
    o = dl_origin(p, q)
    dist = tr.bfs_layers([o], dl_neighbors, radius, budget)
    verts = tuple(sorted(dist, key=format_horo_point))
    idx = {v: i for i, v in enumerate(verts)}
    indptr = np.zeros(len(verts) + 1, dtype=np.int64)
    rows = []
    for i, v in enumerate(verts):
        nb = sorted(idx[w] for w in dl_neighbors(v) if w in idx)
        rows.append(nb)
        indptr[i + 1] = indptr[i] + len(nb)
    indices = np.fromiter((j for nb in rows for j in nb), dtype=np.int64, count=int(indptr[-1]))
    return DLGraph(p, q, radius, verts, indptr, indices, idx[o])


def _locate(g: DLGraph, x: HoroPoint) -> int:
    try:
        return g.index[x]
    except KeyError:
        raise OracleError(f"{format_horo_point(x)} is outside the radius-{g.radius} ball") from None


def in_envelope(g: DLGraph, i: int, j: int, d: int) -> bool:
    return d >= 0 and int(g.d_origin[i]) + int(g.d_origin[j]) + d <= 2 * g.radius


def dl_bfs_distance(g: DLGraph, x: HoroPoint, y: HoroPoint) -> int:
    i, j = _locate(g, x), _locate(g, y)
    d = int(g.bfs(i)[j])
    if not in_envelope(g, i, j, d):
        raise OracleError(
            f"pair outside the oracle envelope: d(o,x) + d(o,y) + d(x,y) > {2 * g.radius}"
        )
    return d


def geodesic_dag(g: DLGraph, i: int, j: int) -> tuple[np.ndarray, np.ndarray, int]:
    dx = g.bfs(i)
    dy = g.bfs(j)
    d = int(dx[j])
    if not in_envelope(g, i, j, d):
        raise OracleError("pair outside the oracle envelope")
    return dx, dy, d


def dl_geodesic_count(g: DLGraph, x: HoroPoint, y: HoroPoint) -> int:
    i, j = _locate(g, x), _locate(g, y)
    dx, _, _ = geodesic_dag(g, i, j)
    return kernels.count_geodesics(g.indptr, g.indices, dx, j)


def dl_all_geodesics_idx(g: DLGraph, i: int, j: int, budget: int = DEFAULT_GEODESIC_BUDGET) -> list[list[int]]:
    dx, dy, d = geodesic_dag(g, i, j)
    count = kernels.count_geodesics(g.indptr, g.indices, dx, j)
    if count > budget:
        raise BudgetError(f"{count} geodesics exceed the enumeration budget {budget}")
    out: list[list[int]] = []
    path = [i]

    def walk(v: int) -> None:
        if v == j:
            out.append(list(path))
            return
        dv = dx[v]
        for w in g.neighbors(v):
            w = int(w)
            if dx[w] == dv + 1 and dy[w] == d - dv - 1:
                path.append(w)
                walk(w)
                path.pop()

    walk(i)
    return out


def dl_all_geodesics(g: DLGraph, x: HoroPoint, y: HoroPoint, budget: int = DEFAULT_GEODESIC_BUDGET) -> list[list[HoroPoint]]:
    i, j = _locate(g, x), _locate(g, y)
    return [[g.vertices[k] for k in path] for path in dl_all_geodesics_idx(g, i, j, budget)]


def first_geodesic_idx(g: DLGraph, i: int, j: int, dist_to_target: np.ndarray | None = None) -> list[int]:
    """The lexicographically smallest geodesic by vertex index."""
    dy = g.bfs(j) if dist_to_target is None else dist_to_target
    if dy[i] < 0:
        raise OracleError("target unreachable inside the ball")
    path = [i]
    v = i
    while v != j:
        v = int(min(w for w in g.neighbors(v) if dy[w] == dy[v] - 1))
        path.append(v)
    return path


def valid_pairs(g: DLGraph):
    """Yield (i, j, d) for unordered in-envelope pairs i <= j, in index order."""
    n = len(g.vertices)
    for i in range(n):
        budget = 2 * g.radius - int(g.d_origin[i])
        if budget < g.d_origin[i]:
            continue
        dist = g.bfs(i, budget)
        for j in np.nonzero(dist >= 0)[0]:
            j = int(j)
            if j >= i and in_envelope(g, i, j, int(dist[j])):
                yield i, j, int(dist[j])


@dataclass(frozen=True)
class ExactnessSummary:
    pairs: int
    matches: int
    max_abs_error: int

    @property
    def exact(self) -> bool:
        return self.pairs == self.matches


def exactness_census(g: DLGraph) -> ExactnessSummary:
    """BFS distance against the coarse formula on every valid pair."""
    pr = g.projections
    pairs, matches, err = kernels.pair_census(
        g.indptr, g.indices, g.d_origin, g.radius, g.heights, pr.pidx, pr.qidx, pr.dp, pr.dq
    )
    return ExactnessSummary(pairs, matches, err)
