"""The same kernels compiled with numba."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def bfs_distances(indptr, indices, source, max_depth):
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int32)
    queue = np.empty(n, dtype=np.int64)
    dist[source] = 0
    queue[0] = source
    head, tail = 0, 1
    while head < tail:
        v = queue[head]
        head += 1
        dv = dist[v]
        if dv >= max_depth:
            continue
        for k in range(indptr[v], indptr[v + 1]):
            w = indices[k]
            if dist[w] < 0:
                dist[w] = dv + 1
                queue[tail] = w
                tail += 1
    return dist


@njit(cache=True)
def tree_distance_matrix(heights, table, lo, rows):
    n, width = table.shape
    out = np.empty((rows.shape[0], n), dtype=np.int64)
    for a in range(rows.shape[0]):
        i = rows[a]
        for j in range(n):
            floor = max(heights[i], heights[j])
            conf = floor
            for k in range(width - 1, -1, -1):
                level = lo + k
                if level < floor:
                    break
                if table[i, k] != table[j, k]:
                    conf = level + 1
                    break
            out[a, j] = 2 * conf - heights[i] - heights[j]
    return out


@njit(cache=True)
def pair_census(indptr, indices, d_origin, radius, heights, pidx, qidx, dp, dq):
    n = indptr.shape[0] - 1
    pairs = 0
    matches = 0
    max_err = 0
    for s in range(n):
        budget = 2 * radius - d_origin[s]
        if budget < d_origin[s]:
            continue
        dist = bfs_distances(indptr, indices, s, budget)
        for t in range(s, n):
            d = dist[t]
            if d < 0 or d_origin[s] + d_origin[t] + d > 2 * radius:
                continue
            coarse = dp[pidx[s], pidx[t]] + dq[qidx[s], qidx[t]] - abs(heights[s] - heights[t])
            err = abs(coarse - d)
            pairs += 1
            if err == 0:
                matches += 1
            if err > max_err:
                max_err = err
    return pairs, matches, max_err


@njit(cache=True)
def count_geodesics(indptr, indices, dist_from_source, target):
    d = dist_from_source[target]
    if d < 0:
        return 0
    n = indptr.shape[0] - 1
    counts = np.zeros(n, dtype=np.int64)
    order = np.argsort(dist_from_source, kind="mergesort")
    for v in order:
        dv = dist_from_source[v]
        if dv < 0 or dv > d:
            continue
        if dv == 0:
            counts[v] = 1
            continue
        c = 0
        for k in range(indptr[v], indptr[v + 1]):
            w = indices[k]
            if dist_from_source[w] == dv - 1:
                c += counts[w]
        counts[v] = c
    return counts[target]
