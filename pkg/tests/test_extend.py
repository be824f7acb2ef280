import random
from fractions import Fraction as F

import pytest

from saet.complexes import PLSet, closure
from saet.errors import ConflictFound, HypothesisViolated, NotAFace, Unbounded
from saet.extend import (
    DIRECTION_DEPENDENT,
    INFINITE,
    VALUE,
    PLFFunction,
    RatioForm,
    dim2_extension,
    face_limit,
    graph_closure_oracle,
    lattice_points,
    ratio_forms_equal_on,
    weak_extension,
)
from saet.fixtures import (
    interpolated_pl_function,
    scaled_slope_function_c,
    slope_function_c,
    step_function_a,
)
from saet.rationals import AffineForm

X = AffineForm(0, (1, 0, 0))
Y = AffineForm(0, (0, 1, 0))
Z = AffineForm(0, (0, 0, 1))


def wall_ids(k, pred, dim=None):
    out = []
    for i, s in enumerate(k.simplices):
        if dim is not None and s.dim != dim:
            continue
        if all(pred(k.vertices[v]) for v in s.vertex_ids):
            out.append(i)
    return out


def test_lattice_unisolvence_helper():
    pts = lattice_points([(0, 0), (1, 0), (0, 1)], 3)
    assert len(pts) == 10  # dim of cubics in 2 variables


def test_face_limit_wall_values(wedge, fix_c):
    f = slope_function_c()
    k = f.complex
    y0_wall = k.id_of((0, 1, 4))
    xy_wall = k.id_of((0, 2, 5))
    r = face_limit(f, k.id_of((0, 1, 4, 5)), y0_wall)
    assert r.kind == VALUE
    one = RatioForm.constant(1, 3)
    assert ratio_forms_equal_on(r.value, one, k.coords(y0_wall))
    r2 = face_limit(f, k.id_of((0, 1, 2, 5)), xy_wall)
    assert r2.kind == VALUE
    zero = RatioForm.constant(0, 3)
    assert ratio_forms_equal_on(r2.value, zero, k.coords(xy_wall))


def test_face_limit_pl_restriction(square, fix_a):
    f = step_function_a(fix_a)
    k = f.complex
    tri = k.id_of((0, 1, 2))
    edge = k.id_of((0, 1))
    r = face_limit(f, tri, edge)
    assert r.kind == VALUE
    assert ratio_forms_equal_on(r.value, RatioForm.constant(1, 2), k.coords(edge))


def test_face_limit_needs_face(square, fix_a):
    f = step_function_a(fix_a)
    with pytest.raises(NotAFace):
        face_limit(f, square.id_of((0, 1, 2)), square.id_of((0, 3)))


def test_face_limit_direction_dependent(wedge, fix_c):
    g = scaled_slope_function_c(fix_c)
    k = g.complex
    tet = k.id_of((0, 3, 4, 5))
    z_edge = k.id_of((0, 3))
    assert face_limit(g, tet, z_edge).kind == DIRECTION_DEPENDENT


def test_face_limit_infinite():
    # 1/x on a segment with the pole at an endpoint
    from saet.complexes import build_complex

    k = build_complex([(0,), (1,)], [(0, 1)])
    m = PLSet(k, [k.id_of((0, 1))])
    f = PLFFunction(
        m,
        {k.id_of((0, 1)): RatioForm([AffineForm(1, (0,))], AffineForm(0, (1,)))},
    )
    r = face_limit(f, k.id_of((0, 1)), k.id_of((0,)))
    assert r.kind == INFINITE
    rep = weak_extension(f)
    assert k.id_of((0,)) not in rep.v_set.members


def test_weak_extension_sharpness(wedge, fix_c):
    g = scaled_slope_function_c(fix_c)
    rep = weak_extension(g)
    k = g.complex
    origin = k.id_of((0,))
    zaxis = set(wall_ids(k, lambda v: v[0] == 0 and v[1] == 0)) - {origin}
    assert rep.y_set.members == zaxis
    assert rep.hypothesis_ok
    assert rep.y_dim_ok
    # wall values: z on y=0, 0 on x=y, 0 at the origin
    for w in wall_ids(k, lambda v: v[1] == 0, dim=2):
        assert ratio_forms_equal_on(rep.value_on(w), RatioForm.affine(Z), k.coords(w))
    for w in wall_ids(k, lambda v: v[0] == v[1], dim=2):
        assert ratio_forms_equal_on(
            rep.value_on(w), RatioForm.constant(0, 3), k.coords(w)
        )
    val0 = rep.value_on(origin).as_affine()
    assert val0 is not None and val0.is_zero()


def test_weak_extension_step(square, fix_a):
    f = step_function_a(fix_a)
    rep = weak_extension(f)
    axis_minus_origin = set(
        wall_ids(square, lambda v: v[1] == 0)
    ) - {square.id_of((0,))}
    assert set(rep.conflicts) == axis_minus_origin
    assert set(rep.hypothesis_violations) == axis_minus_origin
    assert not rep.hypothesis_ok


def test_weak_extension_global_affine(square, fix_a):
    form = AffineForm(F(1, 3), (2, -1))
    f = PLFFunction(
        fix_a, {sid: RatioForm.affine(form) for sid in fix_a.members}
    )
    rep = weak_extension(f)
    assert not rep.y_set.members
    assert rep.v_set.members == closure(fix_a).members
    for sid in rep.v_set.members:
        assert ratio_forms_equal_on(
            rep.values[sid], RatioForm.affine(form), square.coords(sid)
        )


def test_dim2_extension_fix_b(square, fix_b):
    f = interpolated_pl_function(
        fix_b, {vid: square.vertices[vid][0] for vid in range(len(square.vertices))}
    )
    rep = dim2_extension(f)
    assert not rep.y_set.members
    # G = x on the whole closure
    for sid in rep.v_set.members:
        assert ratio_forms_equal_on(
            rep.values[sid],
            RatioForm.affine(AffineForm(0, (1, 0))),
            square.coords(sid),
        )


def test_dim2_extension_random_pl(square, fix_b):
    rng = random.Random(21)
    for _ in range(15):
        vals = {
            vid: F(rng.randint(-12, 12), rng.randint(1, 4))
            for vid in range(len(square.vertices))
        }
        f = interpolated_pl_function(fix_b, vals)
        rep = dim2_extension(f)
        assert not rep.y_set.members
        # G restricted to members equals f exactly
        for sid in fix_b.members:
            assert ratio_forms_equal_on(
                rep.values[sid], f.pieces[sid], square.coords(sid)
            )


def test_dim2_extension_rejects_step(square, fix_a):
    f = step_function_a(fix_a)
    with pytest.raises(HypothesisViolated):
        dim2_extension(f)


def test_dim2_extension_rejects_wrong_dim(wedge, fix_c):
    g = scaled_slope_function_c(fix_c)
    with pytest.raises(HypothesisViolated):
        dim2_extension(g)


def test_graph_closure_oracle_fibers(square, fix_a):
    f = step_function_a(fix_a)
    orc = graph_closure_oracle(f)
    assert orc.fiber_at((F(1, 2), F(0))) == (0, 1)
    # fibers over points of M are singletons
    rng = random.Random(31)
    for _ in range(60):
        p = (F(rng.randint(-64, 64), 64), F(rng.randint(-64, 64), 64))
        if fix_a.contains_point(p):
            assert len(orc.fiber_at(p)) == 1


def test_graph_closure_oracle_matches_extension(square, fix_a, fix_b):
    rng = random.Random(41)
    cases = [step_function_a(fix_a)]
    for _ in range(5):
        vals = {
            vid: F(rng.randint(-9, 9), rng.randint(1, 3))
            for vid in range(len(square.vertices))
        }
        cases.append(interpolated_pl_function(fix_b, vals))
    for f in cases:
        rep = weak_extension(f)
        orc = graph_closure_oracle(f)
        m = f.domain
        for beta in sorted(closure(m).members - m.members):
            forms = orc.fiber_forms(beta)
            if beta in rep.values:
                assert len(forms) == 1
                assert ratio_forms_equal_on(
                    forms[0], rep.values[beta], square.coords(beta)
                )
            elif beta in rep.conflicts:
                assert len(forms) > 1


def test_graph_closure_oracle_rejects_fractional(wedge, fix_c):
    with pytest.raises(Unbounded):
        graph_closure_oracle(scaled_slope_function_c(fix_c))


def test_extension_soundness_along_segments(square, fix_b):
    # sampled member points approaching a face: |f(y) - G(x)| decreases
    f = interpolated_pl_function(
        fix_b, {vid: square.vertices[vid][1] for vid in range(len(square.vertices))}
    )
    rep = weak_extension(f)
    k = square
    beta = k.id_of((0, 2))  # wall edge of the upper cone
    x = (F(1, 4), F(1, 4))
    inner = (F(1, 8), F(3, 4))  # in the upper cone
    g_val = rep.values[beta](x)
    gaps = []
    for j in range(1, 6):
        t = F(1, 2**j)
        y = tuple(xi + t * (ii - xi) for xi, ii in zip(x, inner))
        gaps.append(abs(f.evaluate(y) - g_val))
    assert all(a >= b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < F(1, 10)


def test_continuity_validation():
    from saet.complexes import build_complex

    k = build_complex([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])
    m = PLSet(k, [k.id_of((0, 1, 2)), k.id_of((0, 1))])
    pieces = {
        k.id_of((0, 1, 2)): RatioForm.constant(1, 2),
        k.id_of((0, 1)): RatioForm.constant(2, 2),
    }
    with pytest.raises(ValueError):
        PLFFunction(m, pieces)
    f = PLFFunction(m, pieces, validate_continuity=False)
    assert f.continuity_violations


def test_denominator_sign_validation(square, fix_a):
    bad = {sid: RatioForm([AffineForm(1, (0, 0))], AffineForm(0, (0, 1)))
           for sid in fix_a.members}
    with pytest.raises(ValueError):
        PLFFunction(fix_a, bad, validate_continuity=False)
