import random
from fractions import Fraction as F

import pytest

from saet.errors import NotCommonFace, PreconditionViolated
from saet.intervals import Interval, sqrt_enclosure
from saet.metric import (
    certificate_for,
    certify_epsilon,
    face_functionals,
    incenter,
    separating_hyperplane,
)
from saet.rationals import affinely_independent, dot


def random_simplex(rng, dim, n):
    while True:
        verts = [
            tuple(F(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(n))
            for _ in range(dim + 1)
        ]
        if len(set(verts)) == dim + 1 and affinely_independent(verts):
            return verts


def interior_point(rng, verts):
    w = [F(rng.randint(1, 12)) for _ in verts]
    t = sum(w)
    return tuple(sum(wi * v[c] for wi, v in zip(w, verts)) / t for c in range(len(verts[0])))


def test_reference_triangle_functionals():
    ff = face_functionals([(0, 0), (1, 0), (0, 1)])
    # barycentric forms in vertex order: 1-x-y, x, y
    assert [f((0, 0)) for f in ff.forms] == [1, 0, 0]
    assert [f((1, 0)) for f in ff.forms] == [0, 1, 0]
    assert [f((0, 1)) for f in ff.forms] == [0, 0, 1]
    assert set(ff.norm_sq) == {F(2), F(1)}
    assert ff.norm_sq[0] == 2  # normal of the hypotenuse form


def test_unit_segment_functionals():
    ff = face_functionals([(0,), (1,)])
    vals = sorted((f((F(1, 3),)), q) for f, q in zip(ff.forms, ff.norm_sq))
    assert vals == [(F(1, 3), 1), (F(2, 3), 1)]


def test_partition_of_unity_random():
    rng = random.Random(11)
    for _ in range(25):
        verts = random_simplex(rng, rng.randint(1, 3), 4)
        ff = face_functionals(verts)
        for _ in range(10):
            x = interior_point(rng, verts)
            assert sum(f(x) for f in ff.forms) == 1
        # symbolic: the sum is the constant-1 affine form
        total = ff.forms[0]
        for f in ff.forms[1:]:
            total = total + f
        assert total.c0 == 1 and all(c == 0 for c in total.c)


def test_incenter_unit_segment():
    p, r = incenter([(0,), (1,)])
    assert p[0].contains(F(1, 2)) and r.contains(F(1, 2))
    assert r.is_exact()


def test_incenter_right_triangle():
    p, r = incenter([(0, 0), (1, 0), (0, 1)], F(1, 2**60))
    # p = (1 - sqrt(2)/2, same), r = 1 - sqrt(2)/2
    s2 = sqrt_enclosure(2, 80)
    expect = 1 - s2 * F(1, 2)
    assert p[0].overlaps(expect) and p[1].overlaps(expect) and r.overlaps(expect)
    assert r.width <= F(1, 2**60)
    # equidistance: facet-distance intervals pairwise overlap
    ff = face_functionals([(0, 0), (1, 0), (0, 1)])
    dists = []
    for form, nsq in zip(ff.forms, ff.norm_sq):
        val = Interval(form.c0)
        for c, coord in zip(form.c, p.coords):
            val = val + coord * c
        dists.append(val / sqrt_enclosure(nsq, 80))
    for i in range(3):
        for j in range(i + 1, 3):
            assert dists[i].overlaps(dists[j])


def test_incenter_beats_grid():
    # dense-grid oracle: no grid point of the simplex has larger distance
    # to the boundary than the certified inradius (squared comparison)
    rng = random.Random(5)
    for _ in range(6):
        verts = random_simplex(rng, 2, 2)
        ff = face_functionals(verts)
        _, r = incenter(verts, F(1, 2**40))
        best = F(0)
        m = 25
        for i in range(1, m):
            for j in range(1, m - i):
                bary = [F(i, m), F(j, m), F(m - i - j, m)]
                x = tuple(
                    sum(b * v[c] for b, v in zip(bary, verts)) for c in range(2)
                )
                d2 = min(
                    form(x) ** 2 / nsq for form, nsq in zip(ff.forms, ff.norm_sq)
                )
                best = max(best, d2)
        assert best <= r.hi * r.hi


def test_separating_hyperplane_shared_vertex():
    h = separating_hyperplane([(0, 0), (1, 0)], [(0, 0), (0, 1)])
    assert h.form((0, 0)) == 0
    assert h.form((1, 0)) <= -1
    assert h.form((0, 1)) >= 1


def test_separating_hyperplane_disjoint_slabs():
    h = separating_hyperplane([(0, 0), (1, 0)], [(0, 1), (1, 1)])
    assert h.form((0, 0)) <= -1 and h.form((1, 0)) <= -1
    assert h.form((0, 1)) >= 1 and h.form((1, 1)) >= 1


def test_separating_hyperplane_rejects_overlap():
    with pytest.raises(NotCommonFace):
        separating_hyperplane([(0, 0), (2, 0)], [(1, 0), (3, 0)])


def glued_pair(rng):
    # shared face plus one extra vertex on each side of a separating axis
    n = 3
    dim_shared = rng.randint(1, 2)
    while True:
        shared = [
            tuple(F(rng.randint(-4, 4), 2) for _ in range(n - 1)) + (F(0),)
            for _ in range(dim_shared)
        ]
        e1 = tuple(F(rng.randint(-4, 4), 2) for _ in range(n - 1)) + (F(rng.randint(1, 4)),)
        e2 = tuple(F(rng.randint(-4, 4), 2) for _ in range(n - 1)) + (F(-rng.randint(1, 4)),)
        v1, v2 = shared + [e1], shared + [e2]
        if (
            len(set(v1)) == len(v1)
            and len(set(v2)) == len(v2)
            and affinely_independent(v1)
            and affinely_independent(v2)
        ):
            return v1, v2, shared


def test_separation_on_random_glued_pairs():
    rng = random.Random(7)
    for _ in range(40):
        v1, v2, shared = glued_pair(rng)
        h = separating_hyperplane(v1, v2)
        assert all(h.form(v) == 0 for v in shared)
        assert all(h.form(v) <= -1 for v in v1 if v not in shared)
        assert all(h.form(v) >= 1 for v in v2 if v not in shared)


def test_certify_epsilon_diagonal(square):
    tau = square.id_of((0, 2))
    eps = certify_epsilon(square, tau)
    assert 0 < eps < 1
    # recheck at the returned value and at a 10x finer snapped value
    certificate_for(square, tau, eps)
    certificate_for(square, tau, eps / 4)


def test_certify_epsilon_vertex(square):
    eps = certify_epsilon(square, square.id_of((0,)))
    assert 0 < eps < 1
    recs = certificate_for(square, square.id_of((0,)), eps)
    assert all(r["kind"] == "face_clearance" for r in recs)


def test_certify_epsilon_with_peer(square):
    t1, t2 = square.id_of((0, 1)), square.id_of((0, 5))
    eps = certify_epsilon(square, t1, peers=[t2])
    recs = certificate_for(square, t1, eps, peers=[t2])
    kinds = {r["kind"] for r in recs}
    assert "apex_ball_clearance" in kinds


def test_certify_epsilon_rejects_nested_peer(square):
    with pytest.raises(PreconditionViolated):
        certify_epsilon(square, square.id_of((0, 1)), peers=[square.id_of((0,))])


def test_perpendicular_segments_tubes_meet_in_vertex(square):
    # certified eps keeps the two tubes apart except at the shared vertex
    from saet.tubes import ON_BOUNDARY, OUTSIDE, Tube, tube_membership

    t1, t2 = square.id_of((0, 1)), square.id_of((0, 3))
    eps = min(
        certify_epsilon(square, t1, peers=[t2]),
        certify_epsilon(square, t2, peers=[t1]),
    )
    tube1 = Tube(square.coords(t1), eps)
    tube2 = Tube(square.coords(t2), eps)
    rng = random.Random(9)
    for _ in range(500):
        x = (F(rng.randint(-8, 40), 32), F(rng.randint(-8, 40), 32))
        if tube_membership(tube1, x) != OUTSIDE and tube_membership(tube2, x) != OUTSIDE:
            assert x == (0, 0)
