"""Exact rational scalars, vectors and small dense linear algebra.

Everything in this module is exact: inputs and outputs are
``fractions.Fraction`` and no operation ever rounds.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Vec = tuple[Fraction, ...]


def rat(x) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass Fractions, ints or 'p/q' strings")
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def rat_str(x: Fraction) -> str:
    """Serialize a Fraction as "p/q" in lowest terms ("p" when integral)."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def vec(coords: Iterable) -> Vec:
    return tuple(rat(c) for c in coords)


def vadd(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vsub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vscale(c: Fraction, a: Vec) -> Vec:
    return tuple(c * x for x in a)


def dot(a: Vec, b: Vec) -> Fraction:
    return sum((x * y for x, y in zip(a, b, strict=True)), Fraction(0))


def norm_sq(a: Vec) -> Fraction:
    return dot(a, a)


def dist_sq(a: Vec, b: Vec) -> Fraction:
    return norm_sq(vsub(a, b))


def mat_vec(m: Sequence[Sequence[Fraction]], v: Vec) -> Vec:
    return tuple(dot(tuple(row), v) for row in m)


def solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve a square nonsingular system exactly by Gaussian elimination."""
    n = len(matrix)
    a = [list(row) + [r] for row, r in zip(matrix, rhs, strict=True)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def invert(matrix: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Exact inverse of a square nonsingular matrix."""
    n = len(matrix)
    a = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Exact rank of a list of row vectors."""
    a = [list(r) for r in rows]
    if not a:
        return 0
    m, n = len(a), len(a[0])
    rk = 0
    for col in range(n):
        piv = next((r for r in range(rk, m) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[rk], a[piv] = a[piv], a[rk]
        inv = 1 / a[rk][col]
        a[rk] = [x * inv for x in a[rk]]
        for r in range(m):
            if r != rk and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[rk])]
        rk += 1
        if rk == m:
            break
    return rk


def gram(vectors: Sequence[Vec]) -> list[list[Fraction]]:
    return [[dot(u, v) for v in vectors] for u in vectors]


def affinely_independent(points: Sequence[Vec]) -> bool:
    if len(points) <= 1:
        return True
    edges = [vsub(p, points[0]) for p in points[1:]]
    return rank(edges) == len(edges)


class AffineForm:
    """An affine function c0 + <c, x> on Q^n with exact coefficients."""

    __slots__ = ("c0", "c")

    def __init__(self, c0, c: Iterable):
        self.c0 = rat(c0)
        self.c = vec(c)

    def __call__(self, x: Vec) -> Fraction:
        return self.c0 + dot(self.c, x)

    def __eq__(self, other) -> bool:
        return isinstance(other, AffineForm) and self.c0 == other.c0 and self.c == other.c

    def __hash__(self):
        return hash((self.c0, self.c))

    def __add__(self, other: "AffineForm") -> "AffineForm":
        return AffineForm(self.c0 + other.c0, vadd(self.c, other.c))

    def __sub__(self, other: "AffineForm") -> "AffineForm":
        return AffineForm(self.c0 - other.c0, vsub(self.c, other.c))

    def scale(self, k) -> "AffineForm":
        k = rat(k)
        return AffineForm(k * self.c0, vscale(k, self.c))

    def is_zero(self) -> bool:
        return self.c0 == 0 and all(x == 0 for x in self.c)

    def is_constant(self) -> bool:
        return all(x == 0 for x in self.c)

    def gradient(self) -> Vec:
        return self.c

    def __repr__(self):
        terms = [rat_str(self.c0)]
        terms += [f"{rat_str(ci)}*x{i}" for i, ci in enumerate(self.c) if ci != 0]
        return "AffineForm(" + " + ".join(terms) + ")"

    @staticmethod
    def constant(value, n: int) -> "AffineForm":
        return AffineForm(value, [0] * n)

    @staticmethod
    def coordinate(i: int, n: int) -> "AffineForm":
        return AffineForm(0, [int(j == i) for j in range(n)])
