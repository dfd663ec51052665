import itertools

import numpy as np
import pytest

from horobowtie import boundary as bd
from horobowtie import dlgraph as dg
from horobowtie import horoproduct as hp
from horobowtie import tree as tr
from horobowtie.horoproduct import HoroPoint

S23 = hp.dl_space(2, 3)
O = dg.dl_origin(2, 3)


def test_cell_counts():
    cells = bd.enumerate_cells(hp.dl_space(2, 2), 1)
    assert [str(c) for c in cells] == ["UP[p=0]", "UP[p=1]", "DOWN[q=0]", "DOWN[q=1]"]
    cells = bd.enumerate_cells(S23, 2)
    assert sum(c.variant == "UP" for c in cells) == 4
    assert sum(c.variant == "DOWN" for c in cells) == 9


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_flagged_cell_every_depth(k):
    cells = bd.enumerate_cells(S23, k)
    flagged = [str(c) for c in cells if c.flagged]
    assert flagged == [f"UP[p={'0' * k}]", f"DOWN[q={'0' * k}]"]


def test_cells_unsupported_for_planes():
    with pytest.raises(bd.UnsupportedError):
        bd.enumerate_cells(hp.sol_space(), 1)
    with pytest.raises(bd.UnsupportedError):
        bd.enumerate_cells(hp.treebolic_space(2), 1)


def test_ray_direction_examples():
    up = bd.vertical_ray(O, -1, [])
    assert str(bd.ray_direction(S23, up, 3)) == "UP[p=000]"
    assert bd.ray_direction(S23, up, 3).flagged
    down = bd.vertical_ray(O, +1, [1])
    assert str(bd.ray_direction(S23, down, 3)) == "DOWN[q=100]"


def test_rays_are_geodesic():
    for ray in (bd.vertical_ray(O, -1, [1, 0, 1]), bd.vertical_ray(O, +1, [2, 1])):
        assert bd.verify_ray(S23, ray, 30)


def _descend_then_ascend(tail):
    """Down three steps, then up forever with the q-side leaving via digit 1."""
    pts, cur = [O], O
    for d in (1, 0, 0):
        cur = HoroPoint(tr.child(cur.p_part, d), tr.parent(cur.q_part))
        pts.append(cur)
    cur = HoroPoint(tr.parent(cur.p_part), tr.child(cur.q_part, 1))
    pts.append(cur)
    return bd.RayWitness(tuple(pts), +1, tuple(tail))


def test_descend_then_ascend():
    ray = _descend_then_ascend([0, 0, 2, 1, 0])
    assert bd.verify_ray(S23, ray, 40)
    label = bd.ray_direction(S23, ray, 3)
    # the q-side leaves the subtree under the start at level 2, digit 1
    assert str(label) == "DOWN[q=100.210]" and label.depth == 3 and not label.flagged
    assert label not in bd.enumerate_cells(S23, 3)
    twin = bd.vertical_ray(O, +1, [2, 1, 0])
    assert not bd.asymptotic(S23, ray, twin)
    assert bd.asymptotic(S23, ray, ray.shifted(4))


def test_asymptotic_examples():
    r = bd.vertical_ray(O, +1, [1, 0, 1])
    assert bd.asymptotic(S23, r, r)
    # starts differ in one p-digit; the p-sides climb and merge
    x = HoroPoint(tr.TreeVertex.make(2, 0, {0: 1}), O.q_part)
    s = bd.vertical_ray(x, +1, [1, 0, 1])
    assert bd.asymptotic(S23, r, s) and bd.asymptotic(S23, s, r)
    assert bd.ray_direction(S23, r, 5) == bd.ray_direction(S23, s, 5)
    assert not bd.asymptotic(S23, r, bd.vertical_ray(O, -1, [1, 0, 1]))
    # falling sides that split apart diverge
    assert not bd.asymptotic(S23, r, bd.vertical_ray(O, +1, [0, 0, 1]))
    assert not bd.asymptotic(S23, bd.vertical_ray(O, -1, [1]), bd.vertical_ray(x, -1, [1]))


def test_reparametrization_invariance():
    ray = _descend_then_ascend([1, 2])
    later = ray.shifted(2)
    assert bd.asymptotic(S23, ray, later)
    vert = bd.vertical_ray(O, -1, [1, 1])
    pts = tuple(vert.points(4))
    assert bd.asymptotic(S23, vert, bd.RayWitness(pts[2:], -1, ()))


def test_distance_profile_bounded_for_asymptotic_pair():
    a = bd.vertical_ray(O, +1, [1, 0, 1])
    b = bd.vertical_ray(HoroPoint(tr.TreeVertex.make(2, 0, {0: 1}), O.q_part), +1, [1, 0, 1])
    prof = bd.distance_profile(S23, a, b, 40, 10)
    assert prof.max() <= 2 and np.all(np.diff(prof) <= 0)
    c = bd.vertical_ray(O, +1, [2, 0, 1])
    assert np.all(np.diff(bd.distance_profile(S23, a, c, 40, 10)[1:]) > 0)


def test_inconclusive_cases():
    r = bd.vertical_ray(O, -1, [])
    with pytest.raises(bd.InconclusiveError):
        bd.asymptotic(S23, r, r, horizon=5, window=10)
    stub = bd.RayWitness(tuple(r.points(5)))
    with pytest.raises(bd.InconclusiveError):
        bd.asymptotic(S23, stub, r)
    wiggle = bd.RayWitness((O, HoroPoint(tr.parent(O.p_part), tr.child(O.q_part, 0)), O))
    with pytest.raises(bd.InconclusiveError):
        bd.ray_direction(S23, wiggle, 1, window=2)


def test_prefix_only_ray_classifies_when_long_enough():
    full = bd.vertical_ray(O, +1, [2, 2, 1])
    stub = bd.RayWitness(tuple(full.points(20)))
    assert bd.ray_direction(S23, stub, 3) == bd.ray_direction(S23, full, 3)


def test_sampled_matrix_partition():
    rays = bd.sample_vertical_rays(S23, 40, seed=3)
    m = bd.asymptotic_matrix(S23, rays)
    assert bd.is_equivalence(m)
    labels = [bd.label_at(S23, r, 50) for r in rays]
    assert np.array_equal(m, np.array([[a == b for b in labels] for a in labels]))
    # no class mixes UP and DOWN rays
    for i, j in itertools.product(range(len(rays)), repeat=2):
        if m[i, j]:
            assert rays[i].direction == rays[j].direction


def test_matrix_agrees_with_pairwise_calls():
    rays = bd.sample_vertical_rays(S23, 12, seed=11)
    m = bd.asymptotic_matrix(S23, rays)
    for i, j in itertools.combinations(range(len(rays)), 2):
        assert m[i, j] == bd.asymptotic(S23, rays[i], rays[j], vertical_fast=False)


def test_is_equivalence_rejects():
    assert not bd.is_equivalence(np.array([[1, 1, 0], [1, 1, 1], [0, 1, 1]], bool))
    assert not bd.is_equivalence(np.array([[1, 1], [0, 1]], bool))
    assert not bd.is_equivalence(np.array([[0]], bool))


def test_sampling_deterministic():
    a = [bd.format_ray(r) for r in bd.sample_vertical_rays(S23, 10, seed=5)]
    b = [bd.format_ray(r) for r in bd.sample_vertical_rays(S23, 10, seed=5)]
    assert a == b
