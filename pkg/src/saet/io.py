"""JSON serialization of complexes, marked sets, functions and paths.

Rationals travel as "numerator/denominator" strings in lowest terms
(integers allowed as shorthand); floats are rejected.  Simplex ids refer
to the canonical ordering of the face closure: sorted by (dimension,
vertex-id tuple).
"""

from __future__ import annotations

import json
from fractions import Fraction

from .complexes import Complex, PLSet, build_complex
from .errors import ParseError
from .extend import PLFFunction, RatioForm
from .germs import PathGerm
from .rationals import AffineForm, rat, rat_str


def _rat_in(x) -> Fraction:
    if isinstance(x, float):
        raise ParseError(f"float {x!r} not accepted; use 'p/q' strings")
    try:
        return rat(x)
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise ParseError(f"bad rational {x!r}: {e}") from None


def complex_to_dict(k: Complex, marked: PLSet | None = None) -> dict:
    data = {
        "n": k.n,
        "vertices": [[rat_str(c) for c in v] for v in k.vertices],
        "simplices": [list(k.simplex(t).vertex_ids) for t in k.top_ids],
    }
    if marked is not None:
        data["in_M"] = sorted(marked.members)
    return data


def complex_from_dict(data: dict, validate: bool = True) -> tuple[Complex, PLSet | None]:
    try:
        vertices = [tuple(_rat_in(c) for c in v) for v in data["vertices"]]
        tops = [tuple(int(i) for i in t) for t in data["simplices"]]
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed complex data: {e}") from None
    k = build_complex(vertices, tops, validate=validate)
    marked = None
    if "in_M" in data:
        ids = data["in_M"]
        if any(not isinstance(i, int) or not 0 <= i < len(k.simplices) for i in ids):
            raise ParseError("in_M must list valid simplex ids")
        marked = PLSet(k, ids)
    return k, marked


def save_complex(path: str, k: Complex, marked: PLSet | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(complex_to_dict(k, marked), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_complex(path: str, validate: bool = True) -> tuple[Complex, PLSet | None]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON in {path}: {e}") from None
    return complex_from_dict(data, validate=validate)


def _affine_to_list(form: AffineForm) -> list[str]:
    return [rat_str(form.c0)] + [rat_str(c) for c in form.c]


def _affine_from_list(coeffs, n: int) -> AffineForm:
    vals = [_rat_in(c) for c in coeffs]
    if len(vals) != n + 1:
        raise ParseError(f"affine form needs {n + 1} coefficients, got {len(vals)}")
    return AffineForm(vals[0], vals[1:])


def function_to_dict(f: PLFFunction) -> dict:
    pieces = []
    for sid in sorted(f.pieces):
        ratio = f.pieces[sid]
        entry = {"simplex": sid, "den": _affine_to_list(ratio.den)}
        if len(ratio.factors) == 1:
            entry["num"] = _affine_to_list(ratio.factors[0])
        else:
            entry["num_factors"] = [_affine_to_list(g) for g in ratio.factors]
        pieces.append(entry)
    return {"pieces": pieces}


def function_from_dict(data: dict, domain: PLSet,
                       validate_continuity: bool = True) -> PLFFunction:
    n = domain.complex.n
    pieces = {}
    try:
        for entry in data["pieces"]:
            sid = int(entry["simplex"])
            den = _affine_from_list(entry.get("den", [1] + [0] * n), n)
            if "num_factors" in entry:
                factors = [_affine_from_list(c, n) for c in entry["num_factors"]]
            else:
                factors = [_affine_from_list(entry["num"], n)]
            pieces[sid] = RatioForm(factors, den)
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed function data: {e}") from None
    return PLFFunction(domain, pieces, validate_continuity=validate_continuity)


def save_function(path: str, f: PLFFunction) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(function_to_dict(f), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_function(path: str, domain: PLSet,
                  validate_continuity: bool = True) -> PLFFunction:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON in {path}: {e}") from None
    return function_from_dict(data, domain, validate_continuity=validate_continuity)


def path_to_dict(alpha: PathGerm) -> dict:
    return {
        "pieces": [
            {
                "t_end": rat_str(p.t_end),
                "c": [rat_str(x) for x in p.c],
                "v": [rat_str(x) for x in p.v],
            }
            for p in alpha.pieces
        ]
    }


def path_from_dict(data: dict) -> PathGerm:
    try:
        pieces = [
            (
                _rat_in(p["t_end"]),
                [_rat_in(x) for x in p["c"]],
                [_rat_in(x) for x in p["v"]],
            )
            for p in data["pieces"]
        ]
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed path data: {e}") from None
    try:
        return PathGerm(pieces)
    except ValueError as e:
        raise ParseError(str(e)) from None


def save_path(path: str, alpha: PathGerm) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(path_to_dict(alpha), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_path(path: str) -> PathGerm:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON in {path}: {e}") from None
    return path_from_dict(data)


def carved_to_dict(carved) -> dict:
    """Serializable record of a carved set: base reference plus per-unit
    parameters and certificates."""
    units = []
    for u in carved.units:
        if u.is_ball:
            units.append(
                {
                    "kind": "ball",
                    "center": [rat_str(c) for c in u.outer.center],
                    "radius_sq": rat_str(u.outer.radius_sq),
                    "certificate": u.certificate,
                }
            )
        else:
            units.append(
                {
                    "kind": "tube",
                    "base": [[rat_str(c) for c in v] for v in u.outer.vertices],
                    "eps_sq": rat_str(u.outer.eps_sq),
                    "certificate": u.certificate,
                }
            )
    return {"in_M": sorted(carved.base.members), "units": units}
