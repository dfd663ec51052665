"""Reference implementations in plain numpy."""

from __future__ import annotations

import numpy as np


def _expand(indptr: np.ndarray, indices: np.ndarray, frontier: np.ndarray) -> np.ndarray:
    starts = indptr[frontier]
    lengths = indptr[frontier + 1] - starts
    total = int(lengths.sum())
    if total == 0:
        return np.zeros(0, dtype=indices.dtype)
    offsets = np.repeat(starts - (np.cumsum(lengths) - lengths), lengths)
    return indices[np.arange(total) + offsets]


def bfs_distances(indptr, indices, source, max_depth):
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int32)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    depth = 0
    while frontier.size and depth < max_depth:
        nbrs = _expand(indptr, indices, frontier)
        nbrs = np.unique(nbrs[dist[nbrs] < 0])
        depth += 1
        dist[nbrs] = depth
        frontier = nbrs.astype(np.int64)
    return dist


def tree_distance_matrix(heights, table, lo, rows=None):
    """Pairwise tree distances from dense digit tables (see tree.encode_digits)."""
    n, width = table.shape
    rows = np.arange(n) if rows is None else np.asarray(rows)
    levels = lo + np.arange(width)
    out = np.empty((rows.size, n), dtype=np.int64)
    chunk = max(1, 4_000_000 // max(n * width, 1))
    for s in range(0, rows.size, chunk):
        r = rows[s : s + chunk]
        floor = np.maximum(heights[r][:, None], heights[None, :])
        differ = table[r][:, None, :] != table[None, :, :]
        differ &= levels[None, None, :] >= floor[:, :, None]
        # highest differing level, or floor - 1 when none
        rev = differ[:, :, ::-1]
        any_diff = rev.any(axis=2)
        top = levels[width - 1 - rev.argmax(axis=2)]
        conf = np.where(any_diff, np.maximum(top + 1, floor), floor)
        out[s : s + chunk] = 2 * conf - heights[r][:, None] - heights[None, :]
    return out


def pair_census(indptr, indices, d_origin, radius, heights, pidx, qidx, dp, dq):
    """Compare BFS distance with the coarse formula on every valid pair.

    Returns (pairs, matches, max_abs_error) over unordered pairs {s, t}
    (s == t included) with d(o,s) + d(o,t) + d(s,t) <= 2 radius.
    """
    n = indptr.shape[0] - 1
    pairs = matches = 0
    max_err = 0
    for s in range(n):
        budget = 2 * radius - int(d_origin[s])
        if budget < d_origin[s]:
            continue
        dist = bfs_distances(indptr, indices, s, budget)
        t = np.arange(s, n)
        ds = dist[s:]
        ok = (ds >= 0) & (d_origin[s] + d_origin[s:] + ds <= 2 * radius)
        t = t[ok]
        if t.size == 0:
            continue
        coarse = dp[pidx[s], pidx[t]] + dq[qidx[s], qidx[t]] - np.abs(heights[s] - heights[t])
        err = np.abs(coarse - ds[ok])
        pairs += int(t.size)
        matches += int((err == 0).sum())
        max_err = max(max_err, int(err.max()))
    return pairs, matches, max_err


def count_geodesics(indptr, indices, dist_from_source, target):
    """Number of shortest paths from the BFS source to target."""
    d = int(dist_from_source[target])
    if d < 0:
        return 0
    counts = np.zeros(indptr.shape[0] - 1, dtype=np.int64)
    counts[dist_from_source == 0] = 1
    order = np.argsort(dist_from_source, kind="stable")
    for v in order:
        dv = dist_from_source[v]
        if dv <= 0 or dv > d:
            continue
        nb = indices[indptr[v] : indptr[v + 1]]
        counts[v] = counts[nb[dist_from_source[nb] == dv - 1]].sum()
    return int(counts[target])
