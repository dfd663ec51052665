import networkx as nx
import pytest
from hypothesis import given, strategies as st

import oracles
from horobowtie import dlgraph as dg
from horobowtie import geodesy as ge
from horobowtie import horoproduct as hp
from horobowtie import tree as tr
from horobowtie.horoproduct import HoroPoint
from horobowtie.ledger import threshold
from horobowtie.paths import PathError
from horobowtie.plane import PlanePoint

S22 = hp.dl_space(2, 2)
O = dg.dl_origin(2, 2)


def walk(space, start, moves):
    """'u' raises the product height (p to parent, q to child d); 'd' lowers it."""
    pts, cur = [start], start
    for m, d in moves:
        if m == "u":
            cur = HoroPoint(tr.parent(cur.p_part), tr.child(cur.q_part, d))
        else:
            cur = HoroPoint(tr.child(cur.p_part, d), tr.parent(cur.q_part))
        pts.append(cur)
    return hp.product_path(space, pts)


VERTICAL = [("u", 0)] * 20
INC_DEC = [("u", 0)] * 10 + [("d", 1)] + [("d", 0)] * 9
DEC_INC = [("d", 0)] * 10 + [("u", 1)] + [("u", 0)] * 9
THREE = [("d", 0)] * 5 + [("u", 1)] + [("u", 0)] * 9 + [("d", 1)] + [("d", 0)] * 4


def test_path_stats_examples():
    v = hp.vertical_geodesic_through(S22, O)
    st_ = ge.path_stats(S22, hp.product_path(S22, v.segment(0, 5)))
    assert (st_.h_plus, st_.h_minus, st_.length) == (5, 0, 5)
    g = dg.dl_ball(2, 2, 4)
    y = HoroPoint(tr.TreeVertex.make(2, 0, {0: 1}), tr.origin(2))
    path = hp.product_path(S22, dg.dl_all_geodesics(g, O, y)[0])
    st_ = ge.path_stats(S22, path)
    assert (st_.h_plus, st_.h_minus, st_.length) == (1, 0, 2)
    one = ge.path_stats(S22, hp.product_path(S22, [O]))
    assert one.length == 0 and one.h_plus == one.h_minus


def test_path_stats_ties_smallest_index():
    path = walk(S22, O, [("u", 0), ("d", 0), ("u", 0)])
    s = ge.path_stats(S22, path)
    assert (s.argmax, s.argmin) == (1, 0)


def test_decomposition_examples():
    assert ge.pattern(ge.monotone_decomposition(S22, walk(S22, O, VERTICAL), 0)) == ["inc"]
    assert ge.pattern(ge.monotone_decomposition(S22, walk(S22, O, THREE), 0)) == ["dec", "inc", "dec"]
    zig = walk(S22, O, [("u", 0), ("u", 0), ("d", 0)] * 4)
    assert len(ge.monotone_decomposition(S22, zig, 0)) > 1
    assert ge.pattern(ge.monotone_decomposition(S22, zig, 4)) == ["inc"]
    assert ge.pattern(ge.monotone_decomposition(S22, zig, 100)) == ["inc"]


def test_decomposition_segments_tile_the_path():
    path = walk(S22, O, THREE)
    segs = ge.monotone_decomposition(S22, path, 0)
    assert segs[0].start == 0 and segs[-1].end == len(path) - 1
    assert all(a.end == b.start for a, b in zip(segs, segs[1:]))


@given(st.lists(st.tuples(st.sampled_from("ud"), st.integers(0, 1)), min_size=1, max_size=25))
def test_decomposition_labels_are_monotone(moves):
    path = walk(S22, O, moves)
    hs = [S22.height(z) for z in path.points]
    for seg in ge.monotone_decomposition(S22, path, 0):
        run = hs[seg.start : seg.end + 1]
        if seg.label == "inc":
            assert all(a < b for a, b in zip(run, run[1:]))
        elif seg.label == "dec":
            assert all(a > b for a, b in zip(run, run[1:]))


@pytest.mark.parametrize("p, q", [(2, 2), (2, 3)])
def test_height_bounds_exact_on_geodesics(p, q):
    space = hp.dl_space(p, q)
    g = dg.dl_ball(p, q, 4)
    for i, j, d in list(dg.valid_pairs(g))[::5]:
        for idx in dg.dl_all_geodesics_idx(g, i, j):
            rep = ge.verify_height_bounds(space, ge.dl_path(space, g, idx), oracle_distance=d)
            assert rep.exact and rep.certified_minus and rep.certified_plus


def test_height_bounds_integrity_error():
    g = dg.dl_ball(2, 2, 4)
    path = walk(S22, O, [("u", 0), ("d", 0)])
    with pytest.raises(ge.IntegrityError):
        ge.verify_height_bounds(S22, path, oracle_distance=0)
    assert g.radius == 4


def test_height_bounds_vertical_zero():
    rep = ge.verify_height_bounds(S22, walk(S22, O, VERTICAL))
    assert rep.dev_minus == 0 and rep.dev_plus == 0


def test_height_bounds_plane_certified():
    space = hp.sol_space()
    x = HoroPoint(PlanePoint(0, 0), PlanePoint(0, 0))
    y = HoroPoint(PlanePoint(6, 0.5), PlanePoint(-4, -0.5))
    rep = ge.verify_height_bounds(space, hp.build_path(space, x, y).path)
    assert rep.certified_minus and rep.certified_plus
    # the bridge arcs overshoot the corner heights a little; the witness is not a geodesic
    assert 0 < rep.dev_minus < 1 and 0 < rep.dev_plus < 1


@pytest.mark.parametrize("p, q", [(2, 2), (2, 3)])
def test_shape_kappa_zero_on_dl(p, q):
    space = hp.dl_space(p, q)
    g = dg.dl_ball(p, q, 4)
    for i, j, _ in list(dg.valid_pairs(g))[::11]:
        for idx in dg.dl_all_geodesics_idx(g, i, j)[:3]:
            path = ge.dl_path(space, g, idx)
            rep = ge.classify_shape(space, path)
            assert rep.kappa_eff == 0 and rep.certified
            if rep.shape == "TYPE1" and path.points[0] != path.points[-1]:
                assert ge.fits_pattern(ge.pattern(ge.monotone_decomposition(space, path, 0)), ["dec", "inc", "dec"])


def test_shape_vertical_and_plane():
    rep = ge.classify_shape(S22, walk(S22, O, VERTICAL))
    assert rep.kappa_eff == 0
    space = hp.sol_space()
    x = HoroPoint(PlanePoint(0, 0), PlanePoint(0, 0))
    y = HoroPoint(PlanePoint(5, 0), PlanePoint(5, 0))
    assert ge.classify_shape(space, hp.build_path(space, x, y).path).certified


def test_fits_pattern():
    assert ge.fits_pattern(["inc", "dec"], ["dec", "inc", "dec"])
    assert not ge.fits_pattern(["dec", "dec"], ["dec", "inc", "dec"])


def test_classify_type_lines():
    vert = ge.classify_type(S22, walk(S22, O, VERTICAL))
    assert vert.is_hp_type and vert.is_hq_type and vert.is_vertical and vert.kappa_hp == 0
    hp_only = ge.classify_type(S22, walk(S22, O, INC_DEC))
    assert hp_only.is_hp_type and not hp_only.is_hq_type
    hq_only = ge.classify_type(S22, walk(S22, O, DEC_INC))
    assert hq_only.is_hq_type and not hq_only.is_hp_type


def test_classify_type_three_phase():
    path = walk(S22, O, THREE)
    assert hp.coarse_distance(S22, path.start, path.end) == len(path) - 1
    rep = ge.classify_type(S22, path)
    assert not rep.is_hp_type and not rep.is_hq_type and not rep.line_like
    assert rep.kappa_hp == hp.dr_q(S22, path.start, path.end) / 2
    assert ge.classify_type(S22, path, scale=rep.kappa_hp).is_hp_type


def test_lines_are_geodesics():
    for moves in (VERTICAL, INC_DEC, DEC_INC, THREE):
        path = walk(S22, O, moves)
        assert hp.coarse_distance(S22, path.start, path.end) == len(path) - 1


def test_classify_type_too_short():
    with pytest.raises(ge.TooShortError):
        ge.classify_type(S22, walk(S22, O, VERTICAL[:10]))


def test_dead_end_examples():
    assert ge.dead_end_census(dg.dl_ball(2, 2, 3)) == []
    ends = ge.dead_end_census(dg.dl_ball(2, 2, 4))
    assert [str(e.vertex) for e in ends] == ["T2(h=0;0:1)|T2(h=0;0:1)"]
    assert ends[0].depth == 4 and len(ends[0].geodesic) == 5
    with pytest.raises(ValueError):
        ge.dead_end_census(dg.dl_ball(2, 2, 2))


@pytest.mark.parametrize("p, q, radius", [(2, 2, 4), (2, 2, 5), (2, 3, 4)])
def test_dead_ends_recheck_with_oracle(p, q, radius):
    """Every neighbour of a reported dead end is no farther from the origin."""
    ends = ge.dead_end_census(dg.dl_ball(p, q, radius))
    ref, o = oracles.dl_graph(p, q, radius + 1)
    dist = nx.single_source_shortest_path_length(ref, o)
    top = radius + 2
    for e in ends:
        v = oracles.dl_encode(e.vertex, top)
        assert dist[v] == e.depth
        assert ref.degree(v) == p + q
        assert all(dist[w] <= dist[v] for w in ref.neighbors(v))
        assert e.geodesic[0] == dg.dl_origin(p, q) and e.geodesic[-1] == e.vertex


def test_verticals_never_dead_ends():
    g = dg.dl_ball(2, 2, 5)
    verts = {e.vertex for e in ge.dead_end_census(g)}
    v = hp.vertical_geodesic_through(S22, O)
    assert not any(v(t) in verts for t in range(-5, 6))


def test_seventeen_c0_coarse_single_phase():
    """With coarseness 17 C0 every census geodesic is one monotone run."""
    g = dg.dl_ball(2, 2, 4)
    c = threshold(S22.ledger, "C0_x17")
    for i, j, _ in list(dg.valid_pairs(g))[::9]:
        path = ge.dl_path(S22, g, dg.first_geodesic_idx(g, i, j))
        assert len(ge.monotone_decomposition(S22, path, c)) <= 1


def test_empty_path_rejected():
    with pytest.raises(PathError):
        hp.product_path(S22, [])
