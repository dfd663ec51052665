"""Time the numba kernels against their numpy fallbacks on a DL ball.

    python3 benchmarks/bench_kernels.py --p 2 --q 3 --radius 6 --repeat 5

Both backends are imported directly, so the HOROBOWTIE_NO_JIT flag is not
needed here. Outputs are compared before any timing is reported.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from horobowtie import dlgraph as dg
from horobowtie import tree as tr
from horobowtie.kernels import _numba, _numpy


def _timed(fn, repeat: int) -> tuple[float, object]:
    out = fn()  # first call also triggers JIT compilation
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples), out


def _cases(g: dg.DLGraph):
    pr = g.projections
    census_args = (g.indptr, g.indices, g.d_origin.astype(np.int64), np.int64(g.radius), g.heights,
                   pr.pidx, pr.qidx, pr.dp, pr.dq)
    sources = np.arange(0, len(g.vertices), max(1, len(g.vertices) // 200), dtype=np.int64)
    parts = [v.p_part for v in g.vertices]
    levels = [lvl for v in parts for lvl, _ in v.digits] + [v.n for v in parts]
    lo, hi = min(levels), max(levels)
    heights, table = tr.encode_digits(parts, lo, hi)
    rows = np.arange(len(parts), dtype=np.int64)
    dist0 = g.bfs(g.origin)

    def bfs_all(mod):
        return lambda: [mod.bfs_distances(g.indptr, g.indices, s, np.int64(1 << 30)) for s in sources]

    def counts(mod):
        return lambda: [mod.count_geodesics(g.indptr, g.indices, dist0, np.int64(t)) for t in sources]

    return {
        f"bfs x{len(sources)}": bfs_all,
        "pair_census": lambda mod: (lambda: tuple(mod.pair_census(*census_args))),
        "tree_distance_matrix": lambda mod: (lambda: mod.tree_distance_matrix(heights, table, np.int64(lo), rows)),
        f"count_geodesics x{len(sources)}": counts,
    }


def _same(a, b) -> bool:
    if isinstance(a, list):
        return all(_same(x, y) for x, y in zip(a, b)) and len(a) == len(b)
    return bool(np.array_equal(np.asarray(a), np.asarray(b)))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--q", type=int, default=3)
    ap.add_argument("--radius", type=int, default=6)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    g = dg.dl_ball(args.p, args.q, args.radius)
    print(f"DL({args.p},{args.q}) radius {args.radius}: {len(g.vertices)} vertices, {len(g.indices) // 2} edges")
    print(f"{'kernel':<26}{'numpy s':>12}{'numba s':>12}{'speedup':>10}")
    for name, make in _cases(g).items():
        t_np, out_np = _timed(make(_numpy), args.repeat)
        t_nb, out_nb = _timed(make(_numba), args.repeat)
        if not _same(out_np, out_nb):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<26}{t_np:>12.5f}{t_nb:>12.5f}{t_np / max(t_nb, 1e-12):>9.1f}x")


if __name__ == "__main__":
    main()
