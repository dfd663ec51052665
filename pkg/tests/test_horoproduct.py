import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from horobowtie import dlgraph as dg
from horobowtie import horoproduct as hp
from horobowtie.horoproduct import HoroError, HoroPoint
from horobowtie.ledger import as_big, threshold
from horobowtie.norms import lr_norm
from horobowtie.plane import PlanePoint
from horobowtie.tree import TreeVertex

DL22 = hp.dl_space(2, 2)


def T(n, digits=None, p=2):
    return TreeVertex.make(p, n, digits or {})


def P(x, z):
    return PlanePoint(float(x), float(z))


def test_make_point_examples():
    assert hp.make_horo_point(DL22, T(0), T(0)) == hp.origin(DL22)
    with pytest.raises(HoroError, match="sum = 1"):
        hp.make_horo_point(DL22, T(1), T(0))
    tb = hp.treebolic_space(2)
    hp.make_horo_point(tb, P(0, 2.0), T(-2, {-2: 1}))


def test_parse_point():
    x = hp.parse_horo_point("T2(h=0;0:1)|T2(h=0;)")
    assert x == HoroPoint(T(0, {0: 1}), T(0))
    assert str(x) == "T2(h=0;0:1)|T2(h=0;)"
    with pytest.raises(HoroError):
        hp.parse_horo_point("T2(h=1;)|T2(h=0;)")


def test_coarse_examples():
    o = hp.origin(DL22)
    assert hp.coarse_distance(DL22, o, HoroPoint(T(0, {0: 1}), T(0))) == 2
    assert hp.coarse_distance(DL22, o, HoroPoint(T(2), T(-2, {-2: 1}))) == 2
    assert hp.coarse_distance(DL22, o, o) == 0


def test_ledger_delta_rule():
    space = hp.HoroSpace(hp.TreeSpace(2, 3), hp.TreeSpace(2, 1))
    assert space.ledger.delta == 3
    with pytest.raises(HoroError):
        hp.HoroSpace(hp.TreeSpace(2, 3), hp.TreeSpace(2, 1), ledger=hp.ConstantsLedger(1))


def test_vertical_examples():
    v = hp.vertical_geodesic_through(DL22, hp.origin(DL22))
    assert v(3) == HoroPoint(T(3), T(-3))
    seg = hp.product_path(DL22, v.segment(0, 5))
    for r in (1, 2, math.inf):
        assert hp.HoroSpace(DL22.left, DL22.right, lr_norm(r)).norm.evaluate(1, 1) == pytest.approx(1)
        assert hp.path_length(hp.HoroSpace(DL22.left, DL22.right, lr_norm(r)), seg) == pytest.approx(5)
    x = HoroPoint(T(1, {3: 1}), T(-1, {0: 1}))
    assert hp.vertical_geodesic_through(DL22, x)(1) == x


def test_build_path_example():
    o = hp.origin(DL22)
    y = HoroPoint(T(0, {0: 1}), T(0))
    plan = hp.build_path(DL22, o, y)
    assert plan.total_length == 2
    assert list(plan.path.points) == [o, HoroPoint(T(1), T(-1)), y]
    assert plan.corners[0] == plan.corners[1] and plan.corners[2] == plan.corners[3]


def test_build_path_trivial():
    o = hp.origin(DL22)
    plan = hp.build_path(DL22, o, o)
    assert plan.total_length == 0 and len(plan.path) == 1


@pytest.mark.parametrize("p, q, radius", [(2, 2, 5), (2, 3, 4), (3, 3, 3)])
def test_build_path_equals_bfs(p, q, radius):
    space = hp.dl_space(p, q)
    g = dg.dl_ball(p, q, radius)
    for i, j, d in dg.valid_pairs(g):
        x, y = g.vertices[i], g.vertices[j]
        plan = hp.build_path(space, x, y)
        assert plan.total_length == d
        assert plan.path.start == x and plan.path.end == y
        assert plan.corners[0] == plan.corners[1] and plan.corners[2] == plan.corners[3]
        lo = space.height(x) - hp.dr_q(space, x, y) / 2 if space.height(x) <= space.height(y) else None
        if lo is not None:
            assert space.height(plan.corners[0]) == lo


def test_build_path_heights_of_corners_plane():
    space = hp.sol_space()
    x = HoroPoint(P(0, 0), P(0, 0))
    y = HoroPoint(P(4, 1), P(-3, -1))
    plan = hp.build_path(space, x, y)
    a1, a2, a3, a4 = plan.corners
    assert space.height(a1) == pytest.approx(space.height(x) - hp.dr_q(space, x, y) / 2)
    assert space.height(a3) == pytest.approx(space.height(y) + hp.dr_p(space, x, y) / 2)
    assert plan.certified_within(space, hp.coarse_distance(space, x, y))


@given(st.floats(-30, 30), st.floats(-30, 30), st.floats(-4, 4), st.floats(-4, 4), st.floats(-4, 4))
def test_build_path_certified_plane(px, qx, h0, h1, x0):
    space = hp.sol_space()
    x = HoroPoint(P(x0, h0), P(-x0, -h0))
    y = HoroPoint(P(px, h1), P(qx, -h1))
    plan = hp.build_path(space, x, y)
    coarse = hp.coarse_distance(space, x, y)
    assert plan.certified_within(space, coarse)
    # tighter desk-scale sanity: the witness path is within a few units of the coarse value
    assert plan.total_length <= coarse + 8


def test_build_path_certified_other_norms():
    for r in (2, math.inf):
        space = hp.sol_space(lr_norm(r))
        x = HoroPoint(P(0, 0), P(0, 0))
        y = HoroPoint(P(4, 0), P(4, 0))
        plan = hp.build_path(space, x, y)
        assert plan.certified_within(space, hp.coarse_distance(space, x, y))


def test_mixed_product_path_unsupported():
    tb = hp.treebolic_space(2)
    x = HoroPoint(P(0, 0), T(0))
    y = HoroPoint(P(5, 1), T(-1, {-1: 1}))
    with pytest.raises(HoroError):
        hp.build_path(tb, x, y)


def test_path_length_rejects_mixed():
    space = hp.sol_space()
    pts = [HoroPoint(P(0, 0), P(0, 0)), HoroPoint(T(0), T(0))]
    path = hp.PathH(tuple(pts), [[1.0, 1.0]])
    with pytest.raises(hp.PathError):
        hp.path_length(space, path)


@pytest.mark.parametrize("p, q", [(2, 2), (2, 3)])
def test_sandwich_and_lower_bound(p, q):
    """1/2 (d_p + d_q) <= d <= 2 C_N (d_p + d_q) and d >= Δh, exactly."""
    space = hp.dl_space(p, q)
    g = dg.dl_ball(p, q, 4)
    two_cn = 2 * space.ledger.c_norm
    for i, j, d in dg.valid_pairs(g):
        x, y = g.vertices[i], g.vertices[j]
        dp = space.left.distance(x.p_part, y.p_part)
        dq = space.right.distance(x.q_part, y.q_part)
        assert Fraction(dp + dq, 2) <= d <= two_cn * (dp + dq)
        assert d >= hp.delta_h(space, x, y)


def test_lr_comparison_certified():
    """ℓ_r and ℓ_1 coarse values agree on DL pairs far inside the ledger gap."""
    from horobowtie.ledger import lr_comparison_bound

    g = dg.dl_ball(2, 2, 4)
    gap = lr_comparison_bound(1)
    s1, s2 = hp.dl_space(2, 2, lr_norm(1)), hp.dl_space(2, 2, lr_norm(2))
    for i, j, _ in dg.valid_pairs(g):
        x, y = g.vertices[i], g.vertices[j]
        assert abs(as_big(hp.coarse_distance(s2, x, y)) - as_big(hp.coarse_distance(s1, x, y))) <= gap


def test_vertical_lines_are_geodesics():
    g = dg.dl_ball(2, 3, 5)
    v = hp.vertical_geodesic_through(hp.dl_space(2, 3), dg.dl_origin(2, 3))
    for t1 in range(-2, 3):
        for t2 in range(-2, 3):
            assert dg.dl_bfs_distance(g, v(t1), v(t2)) == abs(t1 - t2)


def test_certification_uses_threshold():
    assert threshold(DL22.ledger, "DELTA_x1152_CN") == 1152
