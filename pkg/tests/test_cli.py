import csv
import io
import json

import pytest
from click.testing import CliRunner

from horobowtie.cli import main

ORIGIN = "T2(h=0;)|T2(h=0;)"


def run(*args):
    return CliRunner().invoke(main, list(args))


def test_distance_example():
    r = run("distance", ORIGIN, "T2(h=0;0:1)|T2(h=0;)")
    assert r.exit_code == 0, r.output
    d = json.loads(r.stdout)
    assert (d["coarse"], d["bfs"], d["built_path_length"]) == (2, 2, 2)
    assert d["schema"] == 1 and d["build_path_certified"]


def test_distance_same_point():
    d = json.loads(run("distance", ORIGIN, ORIGIN).stdout)
    assert d["coarse"] == d["bfs"] == d["built_path_length"] == d["delta_h"] == 0
    assert d["dr_p"] == d["dr_q"] == 0


def test_distance_plane():
    r = run("distance", "P(0,0)|P(0,0)", "P(4,0)|P(4,0)")
    assert r.exit_code == 0, r.output
    d = json.loads(r.stdout)
    assert d["bfs"] is None and d["build_path_certified"]


@pytest.mark.parametrize("text", ["T2(h=0;", "T2(h=1;)|T2(h=0;)", "nonsense"])
def test_malformed_point_exit_2(text):
    assert run("distance", ORIGIN, text).exit_code == 2


def test_bad_norm_and_delta():
    assert run("distance", ORIGIN, ORIGIN, "--norm", "l0.5").exit_code == 2
    assert run("distance", ORIGIN, ORIGIN, "--delta", "1/2").exit_code == 2


def test_census_radius_zero():
    r = run("dl-census", "--p", "2", "--q", "2", "--radius", "0")
    assert r.exit_code == 0
    d = json.loads(r.stdout)
    assert d["pairs"] == d["exact_matches"] == 1 and d["vertices"] == 1


def test_census_csv(tmp_path):
    out = tmp_path / "census.csv"
    r = run("dl-census", "--p", "2", "--q", "2", "--radius", "4", "--format", "csv", "--out", str(out))
    assert r.exit_code == 0, r.output
    summary = json.loads(r.stdout)
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert list(rows[0]) == ["x", "y", "bfs_dist", "coarse_dist", "hplus", "hminus", "pattern",
                             "type_flags", "kappa_eff", "dead_end"]
    assert summary["pairs"] == len(rows) == summary["exact_matches"]
    assert summary["dead_ends"] == 1
    assert all(r["bfs_dist"] == r["coarse_dist"] for r in rows)


def test_census_budget():
    r = run("dl-census", "--p", "2", "--q", "3", "--radius", "6", "--budget", "100")
    assert r.exit_code == 2 and "budget" in r.stderr


def test_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        run("boundary", "--rays", "30", "--seed", "7", "--format", "csv", "--out", str(out))
    assert a.read_bytes() == b.read_bytes()
    j1 = run("dl-census", "--p", "2", "--q", "3", "--radius", "3").stdout
    j2 = run("dl-census", "--p", "2", "--q", "3", "--radius", "3").stdout
    assert j1 == j2


def test_boundary_default():
    r = run("boundary", "--rays", "40")
    assert r.exit_code == 0, r.output
    d = json.loads(r.stdout)
    assert (d["up_cells"], d["down_cells"]) == (4, 9)
    assert all(d["checks"].values())


def test_boundary_unsupported_and_inconclusive():
    assert run("boundary", "--space", "sol").exit_code == 2
    assert run("boundary", "--horizon", "5", "--rays", "5").exit_code == 3


def test_bounds_sweep_contract():
    r = run("bounds-sweep")
    d = json.loads(r.stdout)
    assert d["all_hold"] and d["skipped"] > 0
    # the raw slope misses the 1 +- 0.05 window, so the command reports failure
    assert d["slope_ok"] is False and r.exit_code == 1
    assert "slope" in r.stderr


def test_bounds_sweep_empty_range():
    assert run("bounds-sweep", "--dh-min", "5", "--dh-max", "5").exit_code == 2
    assert run("bounds-sweep", "--dh-min", "5", "--dh-max", "3").exit_code == 2


def test_path_and_classify():
    r = run("path", ORIGIN, "T2(h=0;0:1)|T2(h=0;)", "--format", "csv")
    assert r.exit_code == 0
    assert r.stdout.splitlines()[0] == "segment,index,point,height"
    far = "T2(h=0;10:1)|T2(h=0;)"
    r = run("classify", ORIGIN, far)
    assert r.exit_code == 0, r.output
    d = json.loads(r.stdout)
    assert d["pattern"] == ["inc", "dec"] and d["type"]["is_hp_type"]
    assert run("classify", ORIGIN, "T2(h=0;0:1)|T2(h=0;)").exit_code == 2
