import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from saet.complexes import PLSet
from saet.errors import (
    GermNotInTau,
    LimitOutsideClosure,
    NotEventuallyInDomain,
    PoleAtZero,
    PreconditionViolated,
    SameApex,
)
from saet.extend import PLFFunction, RatioForm, weak_extension
from saet.fixtures import (
    interpolated_pl_function,
    scaled_slope_function_c,
    step_function_a,
)
from saet.germs import (
    ADJACENT,
    NOT_ADJACENT,
    GermValue,
    PathGerm,
    adjacency_test,
    cone_restriction,
    core,
    depth,
    distinct_homs_witness,
    eval_hom,
    evaluate,
    hom_via_cone,
    is_in_extension,
)
from saet.rationals import AffineForm

rationals = st.fractions(
    min_value=-8, max_value=8, max_denominator=16
)


def coord_function(m: PLSet, axis: int) -> PLFFunction:
    n = m.complex.n
    form = AffineForm(0, [int(i == axis) for i in range(n)])
    return PLFFunction(
        m, {sid: RatioForm.affine(form) for sid in m.members},
        validate_continuity=False,
    )


def test_path_validation():
    with pytest.raises(ValueError):
        PathGerm([(1, (0, 0), (1, 0)), (2, (5, 5), (1, 0))])  # jump at t=1
    p = PathGerm([(1, (0, 0), (1, 0)), (2, (F(1, 2), 0), (F(1, 2), 0))])
    assert p.at(F(1, 2)) == (F(1, 2), 0)
    assert p.at(2) == (F(3, 2), 0)
    with pytest.raises(ValueError):
        PathGerm([])


def test_evaluate_examples(fix_a, fix_c):
    fx = coord_function(fix_a, 0)
    assert evaluate(fx, PathGerm.linear((0, 0), (1, F(1, 2)))).pair() == (0, 1)
    g = scaled_slope_function_c(fix_c)
    val = evaluate(g, PathGerm.linear((0, 0, 1), (2, 1, 0)))
    assert val.pair() == (F(1, 2), 0)
    # constant path at a member point
    const = PathGerm.linear((F(1, 4), F(1, 2)), (0, 0))
    fs = step_function_a(fix_a)
    assert evaluate(fs, const).pair() == (1, 0)


def test_evaluate_outside_domain(fix_a):
    fs = step_function_a(fix_a)
    with pytest.raises(NotEventuallyInDomain):
        evaluate(fs, PathGerm.linear((0, 0), (1, 0)))  # germ on the axis


def test_evaluate_pole():
    from saet.complexes import build_complex

    k = build_complex([(0,), (1,)], [(0, 1)])
    m = PLSet(k, [k.id_of((0, 1))])
    f = PLFFunction(
        m, {k.id_of((0, 1)): RatioForm([AffineForm(1, (0,))], AffineForm(0, (1,)))}
    )
    with pytest.raises(PoleAtZero):
        evaluate(f, PathGerm.linear((0,), (1,)))


def test_core(fix_a):
    a1 = PathGerm([(1, (0, 0), (1, F(1, 2)))])
    a2 = PathGerm([(F(1, 2), (0, 0), (1, F(1, 2))), (1, (F(1, 4), F(1, 8)), (F(1, 2), F(1, 4)))])
    assert core(a1) == core(a2)
    assert core(a1).germ() == ((0, 0), (1, F(1, 2)))
    # cores are computed by evaluating the coordinate projections
    fx, fy = coord_function(fix_a, 0), coord_function(fix_a, 1)
    ax = PathGerm.linear((0, 0), (1, F(1, 2)))
    c, v = core(ax).germ()
    assert evaluate(fx, ax).pair() == (c[0], v[0])
    assert evaluate(fy, ax).pair() == (c[1], v[1])


def test_adjacency_dichotomy(square, fix_a):
    up = PathGerm.linear((0, 0), (1, F(1, 2)))
    assert is_in_extension(up, fix_a) and adjacency_test(up, fix_a) == ADJACENT
    axis_to_origin = PathGerm.linear((0, 0), (1, 0))
    assert not is_in_extension(axis_to_origin, fix_a)
    assert adjacency_test(axis_to_origin, fix_a) == ADJACENT  # limit is in M
    axis_inside = PathGerm.linear((F(1, 2), 0), (1, 0))
    assert adjacency_test(axis_inside, fix_a) == NOT_ADJACENT
    escaping = PathGerm.linear((1, 0), (1, 0))  # leaves the square
    assert adjacency_test(escaping, fix_a) == NOT_ADJACENT
    const_out = PathGerm.linear((F(1, 2), 0), (0, 0))
    assert adjacency_test(const_out, fix_a) == NOT_ADJACENT


def test_adjacency_locally_closed_matches_membership(square):
    # on a locally closed set, Adjacent iff the germ is in the set
    tris = [i for i in range(len(square.simplices)) if square.dim_of(i) == 2]
    open_square = PLSet(square, tris)
    cases = [
        PathGerm.linear((0, 0), (1, F(1, 2))),
        PathGerm.linear((0, 0), (1, 0)),
        PathGerm.linear((F(1, 2), F(1, 2)), (0, 0)),
    ]
    for alpha in cases:
        assert (adjacency_test(alpha, open_square) == ADJACENT) == is_in_extension(
            alpha, open_square
        )


def test_depth(fix_a):
    const_in = PathGerm.linear((F(1, 4), F(1, 2)), (0, 0))
    assert depth(const_in, fix_a) == 0
    moving = PathGerm.linear((0, 0), (1, F(1, 2)))
    assert depth(moving, fix_a) == 1
    boundary_moving = PathGerm.linear((F(1, 2), 0), (1, 0))
    assert depth(boundary_moving, fix_a) == 1
    outside = PathGerm.linear((7, 7), (0, 0))
    with pytest.raises(LimitOutsideClosure):
        depth(outside, fix_a)


def test_depth_monotone_under_closure(square, fix_a):
    from saet.complexes import closure

    cl = closure(fix_a)
    for alpha in (
        PathGerm.linear((F(1, 4), F(1, 2)), (0, 0)),
        PathGerm.linear((0, 0), (1, F(1, 2))),
    ):
        assert depth(alpha, cl) <= depth(alpha, fix_a)


def test_eval_hom_cases(square, fix_b, fix_c):
    fB = interpolated_pl_function(
        fix_b, {vid: square.vertices[vid][0] for vid in range(len(square.vertices))}
    )
    repB = weak_extension(fB)
    wall = PathGerm.linear((0, 0), (1, 1))
    assert eval_hom(fB, wall, repB).pair() == (0, 1)
    inside = PathGerm.linear((0, 0), (0, 1))
    assert eval_hom(fB, inside, repB) == evaluate(fB, inside)
    g = scaled_slope_function_c(fix_c)
    repC = weak_extension(g)
    wall_to_origin = PathGerm.linear((0, 0, 0), (2, 0, 1))
    val = eval_hom(g, wall_to_origin, repC)
    assert val.a == 0  # the extension values 0 at the origin
    assert val.pair() == (0, 1)  # z along the path


def test_eval_hom_global_affine(square, fix_b):
    form = AffineForm(F(1, 2), (1, -2))
    f = PLFFunction(fix_b, {sid: RatioForm.affine(form) for sid in fix_b.members})
    rep = weak_extension(f)
    for alpha in (
        PathGerm.linear((0, 0), (1, 1)),
        PathGerm.linear((0, 0), (0, 1)),
    ):
        expected = (
            form(alpha.limit),
            form(tuple(c + v for c, v in zip(*alpha.germ()))) - form(alpha.limit),
        )
        assert eval_hom(f, alpha, rep).pair() == expected


def test_eval_hom_bad_set(square, fix_a):
    f = step_function_a(fix_a)
    rep = weak_extension(f)
    axis_to_origin = PathGerm.linear((0, 0), (1, 0))
    from saet.errors import GermInBadSet

    with pytest.raises(GermInBadSet):
        eval_hom(f, axis_to_origin, rep)


def test_ring_homomorphism_properties(square, fix_b):
    rng = random.Random(3)
    vals1 = {v: F(rng.randint(-6, 6), 2) for v in range(len(square.vertices))}
    vals2 = {v: F(rng.randint(-6, 6), 2) for v in range(len(square.vertices))}
    f = interpolated_pl_function(fix_b, vals1)
    g = interpolated_pl_function(fix_b, vals2)
    alpha = PathGerm.linear((0, 0), (F(1, 3), 1))
    vf, vg = evaluate(f, alpha), evaluate(g, alpha)
    assert evaluate(f + g, alpha).pair() == (vf + vg).pair()
    product = evaluate(f * g, alpha)
    assert product.pair() == vf.mul_first_order(vg).pair()


def test_positivity(square, fix_b):
    # f > 0 on the carrier cell implies a strictly positive germ value
    f = interpolated_pl_function(
        fix_b,
        {v: abs(square.vertices[v][1]) + 1 for v in range(len(square.vertices))},
    )
    alpha = PathGerm.linear((0, 0), (0, 1))
    assert evaluate(f, alpha) > GermValue(0, 0)
    # product case with second-order contact: series comparison decides
    g = f * f
    val = evaluate(coord_function(fix_b, 1) * coord_function(fix_b, 1), alpha)
    assert val.pair() == (0, 0)
    assert val > GermValue(0, 0, series=([F(0)], [F(1)]))


@settings(max_examples=80, deadline=None)
@given(rationals, rationals, rationals, rationals)
def test_germ_value_lex_order(a1, b1, a2, b2):
    g1, g2 = GermValue(a1, b1), GermValue(a2, b2)
    assert (g1.pair() < g2.pair()) == (g1 < g2)
    assert (g1.pair() == g2.pair()) == (g1 == g2)


def test_cone_restriction_preconditions(wedge, fix_c):
    k = wedge
    tau = k.id_of((0, 1))
    sigma = k.id_of((0, 1, 2, 5))
    b = k.barycenter(sigma)
    v = k.vertices[2]
    good_q = tuple(F(1, 2) * (x + y) for x, y in zip(v, b))
    cone = cone_restriction(fix_c, tau, sigma, good_q)
    assert cone.validate_inclusions(30, 0)["ok"]
    with pytest.raises(PreconditionViolated):
        cone_restriction(fix_c, tau, sigma, (5, 5, 5))  # off the segment
    with pytest.raises(PreconditionViolated):
        cone_restriction(fix_c, k.id_of((0, 2)), sigma, good_q)  # tau in M
    with pytest.raises(PreconditionViolated):
        triangle = k.id_of((0, 1, 4))
        cone_restriction(fix_c, tau, triangle, good_q)  # dim gap < 2


def test_cone_restriction_membership(wedge, fix_c):
    k = wedge
    tau = k.id_of((0, 1))
    sigma = k.id_of((0, 1, 2, 5))
    b = k.barycenter(sigma)
    v = k.vertices[2]
    q = tuple(F(1, 2) * (x + y) for x, y in zip(v, b))
    cone = cone_restriction(fix_c, tau, sigma, q)
    mid_tau = (F(1, 2), 0, 0)
    assert not cone.member(mid_tau)  # base cell outside the marked set
    toward = tuple(F(3, 4) * a + F(1, 4) * c for a, c in zip(mid_tau, q))
    assert cone.member(toward)


def test_hom_via_cone_and_witness(wedge, fix_c):
    k = wedge
    tau = k.id_of((0, 1))
    sigma = k.id_of((0, 1, 2, 5))
    b = k.barycenter(sigma)
    v = k.vertices[2]
    q1 = tuple(F(2, 3) * x + F(1, 3) * y for x, y in zip(v, b))
    q2 = tuple(F(1, 3) * x + F(2, 3) * y for x, y in zip(v, b))
    alpha = PathGerm.linear((F(1, 2), 0, 0), (F(1, 8), 0, 0))
    g = scaled_slope_function_c(fix_c)
    cone1 = cone_restriction(fix_c, tau, sigma, q1)
    val = hom_via_cone(g, cone1, cone1 and alpha)
    assert isinstance(val, GermValue)
    with pytest.raises(GermNotInTau):
        hom_via_cone(g, cone1, PathGerm.linear((F(1, 4), F(1, 8), 0), (1, 0, 0)))

    witness, v1, v2 = distinct_homs_witness(fix_c, tau, sigma, q1, q2, alpha)
    assert v1.pair() == (0, 0)
    assert v2 != v1 and v2 > GermValue(0, 0)
    assert core(alpha) == core(alpha)
    with pytest.raises(SameApex):
        distinct_homs_witness(fix_c, tau, sigma, q1, q1, alpha)
    # witness vanishes identically on the first cone, equals g's PL factor
    # on the second (sampled exactly)
    rng = random.Random(9)
    for _ in range(20):
        t = F(rng.randint(1, 15), 16)
        s = F(rng.randint(1, 15), 16)
        base = alpha.at(t)
        x1 = tuple((1 - s) * a + s * b for a, b in zip(base, q1))
        x2 = tuple((1 - s) * a + s * b for a, b in zip(base, q2))
        assert witness(x1) == 0
        assert witness(x2) == witness.g.evaluate(x2)


def test_witness_continuity_spot_checks(wedge, fix_c):
    # f = f0 * g extends by zero across the base cell: values shrink toward it
    k = wedge
    tau = k.id_of((0, 1))
    sigma = k.id_of((0, 1, 2, 5))
    b = k.barycenter(sigma)
    v = k.vertices[2]
    q1 = tuple(F(2, 3) * x + F(1, 3) * y for x, y in zip(v, b))
    q2 = tuple(F(1, 3) * x + F(2, 3) * y for x, y in zip(v, b))
    alpha = PathGerm.linear((F(1, 2), 0, 0), (F(1, 8), 0, 0))
    witness, _, _ = distinct_homs_witness(fix_c, tau, sigma, q1, q2, alpha)
    # f extends by zero across M ∩ boundary(tau): approaching the origin
    # vertex (in M, on the base boundary) the values shrink to zero;
    # across the open base cell f genuinely jumps, which is the point
    origin = (0, 0, 0)
    inner = (F(1, 2), F(1, 4), F(1, 4))
    vals = []
    for j in range(1, 7):
        t = F(1, 4**j)
        x = tuple((1 - t) * a + t * d for a, d in zip(origin, inner))
        vals.append(abs(witness(x)))
    assert vals[-1] < vals[0]
    assert vals[-1] < F(1, 1000)
    assert witness(origin) == 0
