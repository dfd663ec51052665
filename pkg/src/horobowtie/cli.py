"""Command-line front end.

Exit codes: 0 when every check passes, 1 on a failed check, 2 for usage,
parse and budget problems, 3 when a result is inconclusive.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from functools import wraps

import click
import numpy as np

from . import boundary as bd
from . import dlgraph as dg
from . import geodesy as geo
from . import horoball as hb
from . import horoproduct as hp
from .grammar import PointParseError
from .ledger import LedgerError, log2_approx, lower_rational, parse_rational, threshold, upper_rational
from .norms import NormError, parse_norm
from .tree import BudgetError

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3

CENSUS_COLUMNS = ["x", "y", "bfs_dist", "coarse_dist", "hplus", "hminus", "pattern", "type_flags",
                  "kappa_eff", "dead_end"]
SWEEP_COLUMNS = ["delta_H", "kind", "capped_excess", "bound_value_log2", "holds", "status", "note"]


class UsageProblem(Exception):
    pass


class Inconclusive(Exception):
    pass


def _common(fn):
    """Attach the flags every command accepts."""
    options = [
        click.option("--norm", "norm_spec", default="l1", show_default=True, help="l<r>, l1, l2 or linf"),
        click.option("--delta", "delta_text", default="1", show_default=True, help="hyperbolicity constant (rational)"),
        click.option("--seed", default=0, type=click.IntRange(0, 2**64 - 1), show_default=True),
        click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True),
        click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None),
        click.option("--budget", default=dg.DEFAULT_BALL_BUDGET, type=click.IntRange(1), show_default=True),
    ]
    for opt in reversed(options):
        fn = opt(fn)

    @wraps(fn)
    def run(**kwargs):
        try:
            code = fn(**kwargs)
        except (PointParseError, NormError, LedgerError, UsageProblem, hp.HoroError,
                geo.TooShortError, bd.UnsupportedError) as exc:
            click.echo(f"error: {exc}", err=True)
            code = EXIT_USAGE
        except BudgetError as exc:
            click.echo(f"error: budget exceeded: {exc}", err=True)
            code = EXIT_USAGE
        except (Inconclusive, bd.InconclusiveError) as exc:
            click.echo(f"inconclusive: {exc}", err=True)
            code = EXIT_INCONCLUSIVE
        sys.exit(code)

    return run


def _norm_and_delta(norm_spec: str, delta_text: str):
    norm = parse_norm(norm_spec)
    delta = parse_rational(delta_text)
    if delta < 1:
        raise UsageProblem(f"--delta must be >= 1, got {delta}")
    return norm, delta


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _cell(r[k]) for k in columns})
    return buf.getvalue()


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return v


def _num(v):
    """JSON-friendly number: ints stay ints, floats pass through."""
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def _report(fmt: str, out_path: str | None, summary: dict, columns=None, rows=None) -> None:
    summary = {"schema": SCHEMA, **summary}
    if fmt == "csv" and columns is not None:
        _emit(_csv(columns, rows), out_path)
        # rows went to the file; the summary goes wherever they did not
        click.echo(_dumps(summary), nl=False, err=out_path is None)
    else:
        body = dict(summary)
        if rows is not None:
            body["rows"] = rows
        _emit(_dumps(body), out_path)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main() -> None:
    """Experiments on horospherical products of trees and hyperbolic planes."""


# -- dl-census -------------------------------------------------------------------


@main.command("dl-census")
@click.option("--p", "p", type=click.IntRange(2, 5), required=True)
@click.option("--q", "q", type=click.IntRange(2, 5), required=True)
@click.option("--radius", type=click.IntRange(0), required=True)
@_common
def dl_census(p, q, radius, norm_spec, delta_text, seed, fmt, out_path, budget) -> int:
    """Check distance, height and shape identities on every pair of a DL ball."""
    norm, delta = _norm_and_delta(norm_spec, delta_text)
    space = hp.dl_space(p, q, norm, delta)
    g = dg.dl_ball(p, q, radius, budget)
    dead = {d.index for d in geo.dead_end_census(g)} if radius >= 3 else set()
    rows, matches, heights_ok, max_kappa = [], 0, True, 0.0
    for i, j, d in dg.valid_pairs(g):
        x, y = g.vertices[i], g.vertices[j]
        coarse = hp.coarse_distance(space, x, y)
        matches += coarse == d
        path = geo.dl_path(space, g, dg.first_geodesic_idx(g, i, j))
        hb_report = geo.verify_height_bounds(space, path)
        heights_ok &= hb_report.exact
        if d:
            segs = geo.monotone_decomposition(space, path, 0)
            shape = geo.classify_shape(space, path)
            kind = geo.classify_type(space, path, 0.0, min_steps=1)
            flags = "+".join(n for n, f in (("Hp", kind.is_hp_type), ("Hq", kind.is_hq_type)) if f) or "none"
            kappa = shape.kappa_eff
            pattern = "-".join(geo.pattern(segs))
        else:
            flags, kappa, pattern = "point", 0.0, ""
        max_kappa = max(max_kappa, kappa)
        rows.append({
            "x": str(x), "y": str(y), "bfs_dist": d, "coarse_dist": _num(coarse),
            "hplus": _num(hb_report.h_plus), "hminus": _num(hb_report.h_minus),
            "pattern": pattern, "type_flags": flags, "kappa_eff": _num(kappa), "dead_end": j in dead,
        })
    checks = {
        "distance_exact": matches == len(rows),
        "height_bounds_exact": bool(heights_ok),
        "kappa_zero": max_kappa == 0,
    }
    summary = {
        "command": "dl-census", "p": p, "q": q, "radius": radius, "norm": norm.name,
        "pairs": len(rows), "exact_matches": matches, "max_kappa_eff": max_kappa,
        "dead_ends": len(dead) if radius >= 3 else None, "vertices": len(g.vertices),
        "checks": checks,
    }
    _report(fmt, out_path, summary, CENSUS_COLUMNS, rows)
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        click.echo(f"failed checks: {', '.join(failed)}", err=True)
        return EXIT_FAIL
    return EXIT_OK


# -- distance / path / classify -------------------------------------------------


def _points(x_text: str, y_text: str, norm, delta):
    x = hp.parse_horo_point(x_text)
    space = hp.space_for(x, norm, delta)
    y = hp.parse_horo_point(y_text, space)
    return space, x, y


def _bfs_if_in_ball(space, x, y, coarse, budget):
    if not space.exact:
        return None
    o = hp.origin(space)
    need = hp.coarse_distance(space, o, x) + hp.coarse_distance(space, o, y) + coarse
    radius = (need + 1) // 2
    try:
        g = dg.dl_ball(space.left.p, space.right.p, radius, budget)
    except BudgetError:
        return None
    return dg.dl_bfs_distance(g, x, y)


@main.command("distance")
@click.argument("x_text")
@click.argument("y_text")
@_common
def distance_cmd(x_text, y_text, norm_spec, delta_text, seed, fmt, out_path, budget) -> int:
    """Coarse, oracle and constructed distances between two points."""
    norm, delta = _norm_and_delta(norm_spec, delta_text)
    space, x, y = _points(x_text, y_text, norm, delta)
    coarse = hp.coarse_distance(space, x, y)
    plan = hp.build_path(space, x, y)
    bfs = _bfs_if_in_ball(space, x, y, coarse, budget)
    dh = hp.delta_h(space, x, y)
    slack = threshold(space.ledger, "C0_x15")
    lo_c, hi_c = (lower_rational(coarse), upper_rational(coarse)) if isinstance(coarse, float) else (coarse, coarse)
    lower = max(lo_c - slack, lower_rational(dh) if isinstance(dh, float) else dh)
    record = {
        "command": "distance", "space": space.label(), "norm": norm.name,
        "x": str(x), "y": str(y),
        "coarse": _num(coarse), "bfs": bfs, "built_path_length": _num(plan.total_length),
        "delta_h": _num(dh), "dr_p": _num(hp.dr_p(space, x, y)), "dr_q": _num(hp.dr_q(space, x, y)),
        "certified_bracket_log2": [
            log2_approx(lower) if lower > 0 else None,
            log2_approx(hi_c + slack),
        ],
        "build_path_certified": plan.certified_within(space, coarse),
    }
    if fmt == "csv":
        flat = {k: (json.dumps(v) if isinstance(v, list) else v) for k, v in record.items()}
        _emit(_csv(sorted(flat), [flat]), out_path)
    else:
        _emit(_dumps({"schema": SCHEMA, **record}), out_path)
    ok = plan.certified_within(space, coarse) and (bfs is None or (bfs == coarse == plan.total_length))
    return EXIT_OK if ok else EXIT_FAIL


@main.command("path")
@click.argument("x_text")
@click.argument("y_text")
@_common
def path_cmd(x_text, y_text, norm_spec, delta_text, seed, fmt, out_path, budget) -> int:
    """The five-piece path between two points, as plot-ready points."""
    norm, delta = _norm_and_delta(norm_spec, delta_text)
    space, x, y = _points(x_text, y_text, norm, delta)
    plan = hp.build_path(space, x, y)
    coarse = hp.coarse_distance(space, x, y)
    rows = []
    for role, seg in zip(plan.roles, plan.segments):
        for k, pt in enumerate(seg.points):
            rows.append({"segment": role, "index": k, "point": str(pt), "height": _num(space.height(pt))})
    summary = {
        "command": "path", "space": space.label(), "norm": norm.name, "x": str(x), "y": str(y),
        "total_length": _num(plan.total_length), "coarse": _num(coarse),
        "corners": [str(c) for c in plan.corners], "certified": plan.certified_within(space, coarse),
    }
    _report(fmt, out_path, summary, ["segment", "index", "point", "height"], rows)
    return EXIT_OK if summary["certified"] else EXIT_FAIL


@main.command("classify")
@click.argument("x_text")
@click.argument("y_text")
@click.option("--scale", default=0.0, type=click.FloatRange(0), show_default=True)
@click.option("--min-steps", default=20, type=click.IntRange(1), show_default=True)
@_common
def classify_cmd(x_text, y_text, scale, min_steps, norm_spec, delta_text, seed, fmt, out_path, budget) -> int:
    """Monotone pattern, shape fit and line type of the built path."""
    norm, delta = _norm_and_delta(norm_spec, delta_text)
    space, x, y = _points(x_text, y_text, norm, delta)
    path = hp.build_path(space, x, y).path
    segs = geo.monotone_decomposition(space, path, scale)
    shape = geo.classify_shape(space, path)
    kind = geo.classify_type(space, path, scale, min_steps)
    record = {
        "schema": SCHEMA, "command": "classify", "space": space.label(), "x": str(x), "y": str(y),
        "pattern": geo.pattern(segs),
        "shape": {"case": shape.case, "shape": shape.shape, "kappa_eff": shape.kappa_eff,
                  "kappa_other": shape.kappa_other, "certified": shape.certified},
        "type": {"is_hp_type": kind.is_hp_type, "is_hq_type": kind.is_hq_type, "kappa_hp": kind.kappa_hp,
                 "kappa_hq": kind.kappa_hq, "kappa_vertical": kind.kappa_vertical,
                 "is_vertical": kind.is_vertical, "line_like": kind.line_like, "scale": kind.scale},
    }
    if fmt == "csv":
        flat = {"pattern": "-".join(record["pattern"]), **{f"shape_{k}": v for k, v in record["shape"].items()},
                **{f"type_{k}": v for k, v in record["type"].items()}}
        _emit(_csv(sorted(flat), [flat]), out_path)
    else:
        _emit(_dumps(record), out_path)
    return EXIT_OK if shape.certified else EXIT_FAIL


# -- bounds-sweep ---------------------------------------------------------------


@main.command("bounds-sweep")
@click.option("--dh-min", default=2, type=int, show_default=True)
@click.option("--dh-max", default=8, type=int, show_default=True)
@click.option("--span-log", default=hb.DEFAULT_SPAN_LOG, type=click.FloatRange(1, 600), show_default=True,
              help="endpoints sit 2*exp(span-log) apart at height 0")
@click.option("--large-scale/--no-large-scale", default=True, show_default=True)
@_common
def bounds_sweep(dh_min, dh_max, span_log, large_scale, norm_spec, delta_text, seed, fmt, out_path, budget) -> int:
    """Capped-path excess against the cap deficit, with bound certificates."""
    _, delta = _norm_and_delta(norm_spec, delta_text)
    deficits = list(range(dh_min, dh_max + 1))
    if len(deficits) < 2:
        raise UsageProblem(f"empty sweep range [{dh_min}, {dh_max}]: need at least two deficits")
    if dh_max >= span_log:
        raise UsageProblem(f"deficit {dh_max} would put the cap below the endpoints")
    res = hb.exponential_sweep(deficits, span_log, large_scale, delta)
    rows = [r.as_dict() for r in res.rows]
    summary = {
        "command": "bounds-sweep", "delta": str(delta),
        "fitted_slope": res.slope, "fitted_slope_shifted": res.slope_shifted,
        "slope_ok": res.slope_ok(), "all_hold": res.all_hold, "skipped": res.skipped,
        "evaluated": len(res.rows) - res.skipped,
    }
    _report(fmt, out_path, summary, SWEEP_COLUMNS, rows)
    if not (res.all_hold and res.slope_ok()):
        reasons = ([] if res.all_hold else ["a certificate failed"]) + (
            [] if res.slope_ok() else [f"slope {res.slope:.4f} outside [0.95, 1.05]"])
        click.echo("failed checks: " + "; ".join(reasons), err=True)
        return EXIT_FAIL
    return EXIT_OK


# -- boundary -------------------------------------------------------------------


@main.command("boundary")
@click.option("--space", "space_kind", type=click.Choice(["dl", "sol", "treebolic"]), default="dl", show_default=True)
@click.option("--p", "p", type=click.IntRange(2, 5), default=2, show_default=True)
@click.option("--q", "q", type=click.IntRange(2, 5), default=3, show_default=True)
@click.option("--depth", type=click.IntRange(1, 12), default=2, show_default=True)
@click.option("--rays", "n_rays", type=click.IntRange(1), default=200, show_default=True)
@click.option("--horizon", type=click.IntRange(1), default=bd.DEFAULT_HORIZON, show_default=True)
@click.option("--window", type=click.IntRange(1), default=bd.DEFAULT_WINDOW, show_default=True)
@_common
def boundary_cmd(space_kind, p, q, depth, n_rays, horizon, window, norm_spec, delta_text, seed, fmt, out_path,
                 budget) -> int:
    """Boundary cells and the asymptotic classes of sampled vertical rays."""
    norm, delta = _norm_and_delta(norm_spec, delta_text)
    if space_kind == "sol":
        space = hp.sol_space(norm, delta)
    elif space_kind == "treebolic":
        space = hp.treebolic_space(q, norm, delta)
    else:
        space = hp.dl_space(p, q, norm, delta)
    cells = bd.enumerate_cells(space, depth)
    rays = bd.sample_vertical_rays(space, n_rays, seed, horizon)
    matrix = bd.asymptotic_matrix(space, rays, horizon, window)
    labels = [str(bd.ray_direction(space, r, horizon)) for r in rays]
    same_label = np.array([[a == b for b in labels] for a in labels])
    cell_names = {str(c) for c in cells}
    short = [str(bd.ray_direction(space, r, depth)) for r in rays]
    classes, class_of = {}, []
    for row in matrix:
        key = tuple(np.nonzero(row)[0])
        class_of.append(classes.setdefault(key, len(classes)))
    checks = {
        "cell_counts": (sum(c.variant == "UP" for c in cells), sum(c.variant == "DOWN" for c in cells))
        == (space.left.p ** depth, space.right.p ** depth),
        "equivalence": bd.is_equivalence(matrix),
        "matches_labels": bool(np.array_equal(matrix, same_label)),
        "rays_in_cells": all(s in cell_names for s in short),
    }
    summary = {
        "command": "boundary", "space": space.label(), "depth": depth, "horizon": horizon, "window": window,
        "seed": seed, "cells": [{"cell": str(c), "flagged": c.flagged} for c in cells],
        "up_cells": sum(c.variant == "UP" for c in cells), "down_cells": sum(c.variant == "DOWN" for c in cells),
        "classes": len(classes), "checks": checks,
    }
    rows = [{"ray": bd.format_ray(r), "cell": s, "label": lab, "class": k}
            for r, s, lab, k in zip(rays, short, labels, class_of)]
    _report(fmt, out_path, summary, ["ray", "cell", "label", "class"], rows)
    failed = [k for k, ok in checks.items() if not ok]
    if failed:
        click.echo(f"failed checks: {', '.join(failed)}", err=True)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    main()
