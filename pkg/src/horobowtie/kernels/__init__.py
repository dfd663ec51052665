"""Hot loops over graph arrays.

Set HOROBOWTIE_NO_JIT=1 to use the plain numpy versions; they are also used
when numba is not importable.
"""

from __future__ import annotations

import os

import numpy as np

from . import _numpy

BACKEND = "numpy"
_impl = _numpy
if os.environ.get("HOROBOWTIE_NO_JIT", "") not in ("1", "true", "yes"):
    try:
        from . import _numba as _impl  # noqa: F811

        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _impl = _numpy


def bfs_distances(indptr: np.ndarray, indices: np.ndarray, source: int, max_depth: int = 1 << 30) -> np.ndarray:
    return _impl.bfs_distances(indptr, indices, np.int64(source), np.int64(max_depth))


def tree_distance_matrix(heights: np.ndarray, table: np.ndarray, lo: int, rows=None) -> np.ndarray:
    rows = np.arange(table.shape[0], dtype=np.int64) if rows is None else np.asarray(rows, dtype=np.int64)
    return _impl.tree_distance_matrix(heights.astype(np.int64), table, np.int64(lo), rows)


def pair_census(indptr, indices, d_origin, radius, heights, pidx, qidx, dp, dq) -> tuple[int, int, int]:
    out = _impl.pair_census(
        indptr, indices, d_origin.astype(np.int64), np.int64(radius), heights.astype(np.int64),
        pidx.astype(np.int64), qidx.astype(np.int64), dp, dq,
    )
    return tuple(int(v) for v in out)


def count_geodesics(indptr, indices, dist_from_source, target: int) -> int:
    return int(_impl.count_geodesics(indptr, indices, dist_from_source, np.int64(target)))
