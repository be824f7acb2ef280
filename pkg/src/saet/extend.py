"""Weak continuous extension of piecewise linear-fractional functions.

A function on a marked set is given per member cell as a ratio of affine
forms (an optional second affine factor in the numerator covers products
like coordinate * linear-fractional, needed for the sharpness fixture).
For each boundary cell the limits of the adjacent pieces are computed as
exact forms; agreeing limits extend the function, disagreements or
direction-dependent limits go to the conflict set, and denominator
degenerations with nonvanishing numerator are excluded from the extension
neighborhood.  The closed graph of a piecewise-linear input provides an
independent fiber oracle for the same data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

from .complexes import Complex, PLSet, closure, germ_connected, local_dim
from .errors import ConflictFound, HypothesisViolated, NotAFace, Unbounded
from .geometry import SimplexGeometry
from .rationals import AffineForm, Vec, rat, vec

VALUE = "Value"
DIRECTION_DEPENDENT = "DirectionDependent"
INFINITE = "Infinite"


class RatioForm:
    """(product of at most two affine forms) / (affine form)."""

    __slots__ = ("factors", "den")

    def __init__(self, factors: Sequence[AffineForm], den: AffineForm | None = None):
        factors = tuple(factors)
        if not 1 <= len(factors) <= 2:
            raise ValueError("numerator must have one or two affine factors")
        self.factors = factors
        self.den = den if den is not None else AffineForm.constant(1, len(factors[0].c))

    @staticmethod
    def affine(form: AffineForm) -> "RatioForm":
        return RatioForm([form])

    @staticmethod
    def constant(value, n: int) -> "RatioForm":
        return RatioForm([AffineForm.constant(value, n)])

    def is_pl(self) -> bool:
        return self.den.is_constant() and len(self.factors) == 1

    def numerator_value(self, x: Vec) -> Fraction:
        out = Fraction(1)
        for f in self.factors:
            out *= f(x)
        return out

    def __call__(self, x: Vec) -> Fraction:
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at {x}")
        return self.numerator_value(x) / d

    def as_affine(self) -> AffineForm | None:
        """The affine form this ratio equals identically, when it is one."""
        consts = [f for f in self.factors if f.is_constant()]
        lins = [f for f in self.factors if not f.is_constant()]
        if not self.den.is_constant() or len(lins) > 1:
            return None
        scale = Fraction(1) / self.den.c0
        for c in consts:
            scale *= c.c0
        if not lins:
            return AffineForm.constant(scale, len(self.den.c))
        return lins[0].scale(scale)

    def __repr__(self):
        return f"RatioForm({list(self.factors)!r} / {self.den!r})"


def lattice_points(vertices: Sequence[Vec], order: int) -> list[Vec]:
    """Principal lattice of the given order on a simplex: the points with
    barycentric coordinates k_i/order.  Unisolvent for degree <= order."""
    k = len(vertices)
    pts = []
    for combo in combinations_with_replacement(range(k), order):
        weights = [Fraction(combo.count(i), order) for i in range(k)]
        pts.append(
            tuple(
                sum(w * v[c] for w, v in zip(weights, vertices))
                for c in range(len(vertices[0]))
            )
        )
    return pts


def ratio_forms_equal_on(a: RatioForm, b: RatioForm, face_vertices: Sequence[Vec]) -> bool:
    """Exact equality of two ratio forms as functions on the affine hull.

    Cross-multiplied: num_a * den_b - num_b * den_a vanishes identically on
    the hull; this has degree <= 3, so the order-3 lattice decides it.
    """
    for p in lattice_points(face_vertices, 3):
        lhs = a.numerator_value(p) * b.den(p)
        rhs = b.numerator_value(p) * a.den(p)
        if lhs != rhs:
            return False
    return True


def _vanishes_on_hull(form: AffineForm, vertices: Sequence[Vec]) -> bool:
    return all(form(v) == 0 for v in vertices)


def _proportional_on_hull(
    f: AffineForm, g: AffineForm, vertices: Sequence[Vec]
) -> Fraction | None:
    """lambda with f = lambda g on the affine hull, or None."""
    witness = next((v for v in vertices if g(v) != 0), None)
    if witness is None:
        return None  # g vanishes on the hull; no useful ratio
    lam = f(witness) / g(witness)
    for p in lattice_points(vertices, 1):
        if f(p) != lam * g(p):
            return None
    return lam


def _bounded_quotient_on(
    num: AffineForm, den: AffineForm, vertices: Sequence[Vec]
) -> bool:
    """Whether num/den is bounded on the simplex (den nonvanishing inside).

    With den > 0 on the open cell, num/den <= c holds iff num - c den <= 0
    at the vertices, so boundedness is exactly: num vanishes at every
    vertex where den does.
    """
    return all(num(v) == 0 for v in vertices if den(v) == 0)


@dataclass
class LimitResult:
    kind: str
    value: RatioForm | None = None

    def __repr__(self):
        if self.kind == VALUE:
            return f"LimitResult(Value {self.value!r})"
        return f"LimitResult({self.kind})"


class PLFFunction:
    """Piecewise linear-fractional function on a marked set.

    ``pieces`` maps member simplex ids to RatioForms.  Denominators must
    keep a strict sign on each open piece (vertex zeros allowed only on
    faces).  Continuity across shared member faces is validated by exact
    cross-multiplied form equality; the check can be disabled to express
    the discontinuous step fixtures, in which case the violations are kept
    for the extension report.
    """

    def __init__(self, domain: PLSet, pieces: dict, validate_continuity: bool = True):
        self.domain = domain
        self.complex: Complex = domain.complex
        self.pieces: dict[int, RatioForm] = {}
        for key, ratio in pieces.items():
            sid = self.complex.id_of(key)
            if sid not in domain.members:
                raise ValueError(f"piece assigned to non-member simplex {sid}")
            if not isinstance(ratio, RatioForm):
                ratio = RatioForm.affine(ratio)
            self.pieces[sid] = ratio
        missing = domain.members - set(self.pieces)
        if missing:
            raise ValueError(f"missing pieces for member simplices {sorted(missing)}")
        for sid, ratio in self.pieces.items():
            vals = [ratio.den(v) for v in self.complex.coords(sid)]
            pos, neg = any(v > 0 for v in vals), any(v < 0 for v in vals)
            if (pos and neg) or not (pos or neg):
                raise ValueError(
                    f"denominator changes sign or vanishes on open simplex {sid}"
                )
        self.continuity_violations = self._continuity_violations()
        if validate_continuity and self.continuity_violations:
            raise ValueError(
                f"pieces disagree on shared member faces: {self.continuity_violations}"
            )

    def _continuity_violations(self) -> list[tuple[int, int]]:
        out = []
        for beta in sorted(self.domain.members):
            face_verts = self.complex.coords(beta)
            for sigma in self.complex.cofaces[beta]:
                if sigma == beta or sigma not in self.domain.members:
                    continue
                if not ratio_forms_equal_on(
                    self.pieces[beta], self.pieces[sigma], face_verts
                ):
                    out.append((beta, sigma))
        return out

    def evaluate(self, x: Vec) -> Fraction:
        sid = self.domain.locate(vec(x))
        if sid is None:
            raise ValueError(f"{x} is not in the domain")
        return self.pieces[sid](vec(x))

    # algebra on shared piece structure (piecewise-linear operands)
    def __add__(self, other: "PLFFunction") -> "PLFFunction":
        assert self.domain == other.domain
        pieces = {}
        for sid in self.domain.members:
            a, b = self.pieces[sid], other.pieces[sid]
            if not (a.is_pl() and b.is_pl()):
                raise ValueError("sum supported for piecewise-linear operands")
            pieces[sid] = RatioForm.affine(
                a.factors[0].scale(1 / a.den.c0) + b.factors[0].scale(1 / b.den.c0)
            )
        return PLFFunction(self.domain, pieces, validate_continuity=False)

    def __mul__(self, other: "PLFFunction") -> "PLFFunction":
        assert self.domain == other.domain
        pieces = {}
        for sid in self.domain.members:
            a, b = self.pieces[sid], other.pieces[sid]
            if not (a.is_pl() and b.is_pl()):
                raise ValueError("product supported for piecewise-linear operands")
            pieces[sid] = RatioForm(
                [a.factors[0].scale(1 / a.den.c0), b.factors[0].scale(1 / b.den.c0)]
            )
        return PLFFunction(self.domain, pieces, validate_continuity=False)


def face_limit(f: PLFFunction, sigma, beta) -> LimitResult:
    """Limit of the piece on sigma along approaches to the open cell of beta.

    Exact case analysis on the restrictions to the affine hull of beta:
    nonvanishing denominator restricts the ratio; a denominator vanishing
    identically needs the numerator to vanish too (else Infinite), and the
    surviving quotient has a well-defined limit exactly when a vanishing
    factor is proportional to the denominator over the hull of sigma, with
    a bounded-quotient fallback when the remaining prefactor vanishes.
    """
    k = f.complex
    sigma_id, beta_id = k.id_of(sigma), k.id_of(beta)
    if not k.simplex(beta_id).is_face_of(k.simplex(sigma_id)):
        raise NotAFace(f"{beta_id} is not a face of {sigma_id}")
    piece = f.pieces[sigma_id]
    beta_verts = k.coords(beta_id)
    sigma_verts = k.coords(sigma_id)
    n = k.n

    den = piece.den
    if not _vanishes_on_hull(den, beta_verts):
        return _restrict_ratio(piece, beta_verts, sigma_verts, n)

    zero = [f_ for f_ in piece.factors if _vanishes_on_hull(f_, beta_verts)]
    nonzero = [f_ for f_ in piece.factors if not _vanishes_on_hull(f_, beta_verts)]
    if not zero:
        return LimitResult(INFINITE)

    if len(zero) == 1:
        lam = _proportional_on_hull(zero[0], den, sigma_verts)
        if lam is not None:
            rest = nonzero[0] if nonzero else AffineForm.constant(1, n)
            return LimitResult(VALUE, RatioForm([rest.scale(lam)]))
        return LimitResult(DIRECTION_DEPENDENT)

    # both factors vanish on the hull of beta, denominator too
    for i in (0, 1):
        lam = _proportional_on_hull(zero[i], den, sigma_verts)
        if lam is not None:
            return LimitResult(VALUE, RatioForm.constant(0, n))
        if _bounded_quotient_on(zero[i], den, sigma_verts):
            # bounded quotient times a factor vanishing on beta: limit 0
            return LimitResult(VALUE, RatioForm.constant(0, n))
    return LimitResult(DIRECTION_DEPENDENT)


def _restrict_ratio(
    piece: RatioForm, beta_verts, sigma_verts, n: int
) -> LimitResult:
    """Restriction of a ratio with nonvanishing denominator to a face."""
    factors = list(piece.factors)
    den = piece.den
    # cancel factors proportional to the denominator over the face hull
    for i, f_ in enumerate(factors):
        lam = _proportional_on_hull(f_, den, beta_verts)
        if lam is not None:
            rest = factors[1 - i] if len(factors) == 2 else AffineForm.constant(1, n)
            return LimitResult(VALUE, RatioForm([rest.scale(lam)]))
    den_vals = [den(v) for v in beta_verts]
    if any(v > 0 for v in den_vals) and any(v < 0 for v in den_vals):
        return LimitResult(INFINITE)  # pole crosses the face
    if any(v == 0 for v in den_vals):
        # denominator vanishes on part of the closed face: keep the ratio
        # only when the numerator vanishes there too (bounded), else the
        # extension cannot cover the face
        for v in beta_verts:
            if den(v) == 0 and piece.numerator_value(v) != 0:
                return LimitResult(INFINITE)
    return LimitResult(VALUE, RatioForm(factors, den))


@dataclass
class ExtensionReport:
    """Outcome of the weak continuous extension construction."""

    domain: PLSet
    v_set: PLSet
    y_set: PLSet
    values: dict[int, RatioForm]
    hypothesis_ok: bool
    hypothesis_violations: list[int]
    y_dim_ok: bool
    y_dim_violations: list[int]
    infinite_faces: list[int]
    conflicts: dict[int, list[LimitResult]] = field(default_factory=dict)
    continuity_violations: list[tuple[int, int]] = field(default_factory=list)

    def value_on(self, simplex) -> RatioForm:
        sid = self.domain.complex.id_of(simplex)
        return self.values[sid]


def weak_extension(f: PLFFunction) -> ExtensionReport:
    """Per-face limit analysis over the boundary of the marked set.

    Returns the extension neighborhood (closure minus the closures of the
    denominator-degeneration faces), the conflict set, and the extension
    value forms on the remaining boundary faces.  The germ-connectivity
    hypothesis is checked, not assumed; when it holds, the conflict set is
    verified to have local codimension >= 2 inside the set.
    """
    m = f.domain
    k = f.complex
    cl = closure(m)
    boundary = sorted(cl.members - m.members)

    hypothesis_violations = [
        sid for sid in sorted(cl.members) if not germ_connected(m, sid)
    ]

    values: dict[int, RatioForm] = dict(f.pieces)
    conflicts: dict[int, list[LimitResult]] = {}
    infinite: list[int] = []
    for beta in boundary:
        adjacent = [
            sid for sid in k.cofaces[beta] if sid != beta and sid in m.members
        ]
        limits = [face_limit(f, sid, beta) for sid in adjacent]
        if any(r.kind == INFINITE for r in limits):
            infinite.append(beta)
            continue
        if any(r.kind == DIRECTION_DEPENDENT for r in limits):
            conflicts[beta] = limits
            continue
        beta_verts = k.coords(beta)
        first = limits[0].value
        if all(ratio_forms_equal_on(first, r.value, beta_verts) for r in limits[1:]):
            values[beta] = first
        else:
            conflicts[beta] = limits

    excluded: set[int] = set()
    if infinite:
        excluded = closure(PLSet(k, infinite)).members
    v_set = PLSet(k, cl.members - excluded)
    y_set = PLSet(k, set(conflicts) - excluded)

    y_dim_violations = []
    if not hypothesis_violations:
        for beta in sorted(y_set.members):
            y_dim = max(
                k.dim_of(c) for c in k.cofaces[beta] if c in y_set.members
            )
            if y_dim > local_dim(m, beta) - 2:
                y_dim_violations.append(beta)

    return ExtensionReport(
        domain=m,
        v_set=v_set,
        y_set=y_set,
        values={sid: val for sid, val in values.items() if sid in v_set.members},
        hypothesis_ok=not hypothesis_violations,
        hypothesis_violations=hypothesis_violations,
        y_dim_ok=not y_dim_violations,
        y_dim_violations=y_dim_violations,
        infinite_faces=infinite,
        conflicts=conflicts,
        continuity_violations=f.continuity_violations,
    )


def dim2_extension(f: PLFFunction) -> ExtensionReport:
    """Continuous extension for two-dimensional connected-germ sets.

    Checks the hypotheses exactly and then requires an empty conflict set;
    a conflict here would contradict the two-dimensional extension theorem
    and is surfaced as a hard error.
    """
    if f.domain.dim() != 2:
        raise HypothesisViolated(f"domain has dimension {f.domain.dim()}, not 2")
    report = weak_extension(f)
    if not report.hypothesis_ok:
        raise HypothesisViolated(
            f"germ disconnected at simplices {report.hypothesis_violations}"
        )
    if report.y_set.members or report.conflicts:
        raise ConflictFound(
            f"conflict set {sorted(report.y_set.members)} should be empty in dimension 2"
        )
    return report


class GraphClosureOracle:
    """Fibers of the closed graph complex of a piecewise-linear function.

    The graph of each piece is a simplex in R^(n+1); the closure of their
    union is the union of the closed graph simplices, so the fiber over a
    point is the set of piece values over member cells whose closed cell
    contains the point.  Entirely independent of the limit analysis.
    """

    def __init__(self, f: PLFFunction):
        for sid, piece in f.pieces.items():
            if not piece.is_pl():
                raise Unbounded(
                    "graph-closure oracle requires piecewise-linear pieces"
                )
        self.f = f
        self.k = f.complex
        self._geos = {
            sid: SimplexGeometry(self.k.coords(sid)) for sid in f.domain.members
        }
        # exact boundedness certificate: vertex values over all pieces
        self.bound = max(
            abs(piece(v))
            for sid, piece in f.pieces.items()
            for v in self.k.coords(sid)
        ) if f.pieces else Fraction(0)

    def fiber_at(self, q: Vec) -> tuple[Fraction, ...]:
        q = vec(q)
        vals = set()
        for sid, geo in self._geos.items():
            if geo.contains(q):
                vals.add(self.f.pieces[sid](q))
        return tuple(sorted(vals))

    def fiber_forms(self, beta) -> list[RatioForm]:
        """Deduplicated value forms over a face of the closed graph."""
        beta_id = self.k.id_of(beta)
        beta_verts = self.k.coords(beta_id)
        forms: list[RatioForm] = []
        for sid in self.k.cofaces[beta_id]:
            if sid == beta_id or sid not in self.f.domain.members:
                continue
            cand = self.f.pieces[sid]
            if not any(ratio_forms_equal_on(cand, g, beta_verts) for g in forms):
                forms.append(cand)
        return forms


def graph_closure_oracle(f: PLFFunction) -> GraphClosureOracle:
    return GraphClosureOracle(f)
