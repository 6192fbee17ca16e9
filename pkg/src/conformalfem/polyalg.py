"""Homogeneous barycentric polynomial algebra on a tetrahedron.

A scalar polynomial of degree k is stored as a map from exponent 4-tuples
(alpha_0..alpha_3, summing to k) to exact rational coefficients.  Storage is
homogeneous: a polynomial of lower true degree is embedded at degree k by
multiplying with powers of (lambda_0 + lambda_1 + lambda_2 + lambda_3) = 1.
Arithmetic between operands of different stored degree aligns them first, so
degree bookkeeping never leaks into results.

Vector and 3x3-matrix values are componentwise wrappers sharing one degree.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

from gmpy2 import fac, mpq

from .scalarfield import Rational

Exp = tuple[int, int, int, int]

_VARS = (
    (1, 0, 0, 0),
    (0, 1, 0, 0),
    (0, 0, 1, 0),
    (0, 0, 0, 1),
)


@lru_cache(maxsize=None)
def monomials(degree: int, support: tuple[int, ...] = (0, 1, 2, 3)) -> tuple[Exp, ...]:
    """All exponent tuples of the given total degree, lexicographically sorted.

    ``support`` restricts to monomials in the barycentric coordinates of a
    sub-simplex (face: 3 indices, edge: 2 indices).
    """
    out = []
    for combo in combinations_with_replacement(support, degree):
        e = [0, 0, 0, 0]
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return tuple(sorted(out))


class BaryPoly:
    """Homogeneous polynomial in the four barycentric coordinates."""

    __slots__ = ("degree", "terms")

    def __init__(self, degree: int, terms: dict[Exp, Rational] | None = None):
        self.degree = degree
        self.terms: dict[Exp, Rational] = {}
        if terms:
            for e, c in terms.items():
                if c != 0:
                    self.terms[e] = mpq(c)

    @staticmethod
    def zero(degree: int = 0) -> "BaryPoly":
        return BaryPoly(degree)

    @staticmethod
    def constant(c, degree: int = 0) -> "BaryPoly":
        if degree == 0:
            return BaryPoly(0, {(0, 0, 0, 0): mpq(c)})
        return BaryPoly(0, {(0, 0, 0, 0): mpq(c)}).homogenize(degree)

    @staticmethod
    def coordinate(i: int) -> "BaryPoly":
        return BaryPoly(1, {_VARS[i]: mpq(1)})

    @staticmethod
    def monomial(exp: Exp, coeff=1) -> "BaryPoly":
        return BaryPoly(sum(exp), {tuple(exp): mpq(coeff)})

    def is_zero(self) -> bool:
        return not self.terms

    def homogenize(self, degree: int) -> "BaryPoly":
        """Embed at a higher degree via powers of sum(lambda) = 1."""
        if degree == self.degree:
            return self
        if degree < self.degree:
            raise ValueError("cannot lower homogeneous degree")
        d = degree - self.degree
        out: dict[Exp, Rational] = {}
        pascal = monomials(d)
        mult = {e: _multinomial(d, e) for e in pascal}
        for e, c in self.terms.items():
            for g, m in mult.items():
                key = (e[0] + g[0], e[1] + g[1], e[2] + g[2], e[3] + g[3])
                prev = out.get(key)
                out[key] = c * m if prev is None else prev + c * m
        return BaryPoly(degree, out)

    def _aligned(self, other: "BaryPoly"):
        d = max(self.degree, other.degree)
        return self.homogenize(d), other.homogenize(d), d

    def __add__(self, other: "BaryPoly") -> "BaryPoly":
        a, b, d = self._aligned(other)
        out = dict(a.terms)
        for e, c in b.terms.items():
            prev = out.get(e)
            s = c if prev is None else prev + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return BaryPoly(d, out)

    def __sub__(self, other: "BaryPoly") -> "BaryPoly":
        return self + (-other)

    def __neg__(self) -> "BaryPoly":
        return BaryPoly(self.degree, {e: -c for e, c in self.terms.items()})

    def scale(self, c) -> "BaryPoly":
        c = mpq(c)
        if c == 0:
            return BaryPoly(self.degree)
        return BaryPoly(self.degree, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, BaryPoly):
            out: dict[Exp, Rational] = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    key = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3])
                    prev = out.get(key)
                    v = c1 * c2
                    s = v if prev is None else prev + v
                    if s == 0:
                        out.pop(key, None)
                    else:
                        out[key] = s
            return BaryPoly(self.degree + other.degree, out)
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, BaryPoly):
            return NotImplemented
        a, b, _ = self._aligned(other)
        return a.terms == b.terms

    def __hash__(self):
        raise TypeError("BaryPoly is unhashable")

    def lambda_derivative(self, i: int) -> "BaryPoly":
        """d/d(lambda_i), degree drops by one."""
        out: dict[Exp, Rational] = {}
        for e, c in self.terms.items():
            a = e[i]
            if a == 0:
                continue
            key = list(e)
            key[i] = a - 1
            key = tuple(key)
            prev = out.get(key)
            v = c * a
            out[key] = v if prev is None else prev + v
        return BaryPoly(max(self.degree - 1, 0), out)

    def directional_derivative(self, direction: Sequence[Rational], grads) -> "BaryPoly":
        """Derivative along a constant Cartesian direction vector."""
        out = BaryPoly.zero(max(self.degree - 1, 0))
        for j in range(4):
            c = sum(mpq(direction[a]) * grads[j][a] for a in range(3))
            if c != 0:
                out = out + self.lambda_derivative(j).scale(c)
        return out

    def restrict_zero(self, i: int) -> "BaryPoly":
        """Substitute lambda_i = 0 (restriction to the opposite face)."""
        return BaryPoly(
            self.degree, {e: c for e, c in self.terms.items() if e[i] == 0}
        )

    def evaluate(self, lam: Sequence[Rational]) -> Rational:
        total = mpq(0)
        for e, c in self.terms.items():
            v = c
            for i in range(4):
                a = e[i]
                if a:
                    v = v * mpq(lam[i]) ** a
            total += v
        return total

    def evaluate_float(self, lam, ctx):
        total = ctx.mp.mpf(0)
        for e, c in self.terms.items():
            v = ctx.to_float(c)
            for i in range(4):
                if e[i]:
                    v *= lam[i] ** e[i]
            total += v
        return total

    def coefficient(self, exp: Exp) -> Rational:
        return self.terms.get(tuple(exp), mpq(0))

    def __repr__(self):
        if not self.terms:
            return f"BaryPoly(0; deg {self.degree})"
        parts = [f"{c}*l{''.join(map(str, e))}" for e, c in sorted(self.terms.items())]
        return " + ".join(parts)


@lru_cache(maxsize=None)
def _multinomial(n: int, exp: Exp):
    v = fac(n)
    for a in exp:
        v //= fac(a)
    return mpq(v)


def poly_mul(a: BaryPoly, b: BaryPoly) -> BaryPoly:
    return a * b


def cartesian_derivative(p: BaryPoly, geom, axis: int) -> BaryPoly:
    """d/dx_axis via the chain rule with the constant gradients of lambda."""
    grads = geom.bary_gradients if hasattr(geom, "bary_gradients") else geom
    out = BaryPoly.zero(max(p.degree - 1, 0))
    for j in range(4):
        c = grads[j][axis]
        if c != 0:
            out = out + p.lambda_derivative(j).scale(c)
    return out


@lru_cache(maxsize=None)
def _cell_weight(exp: Exp) -> Rational:
    n = sum(exp)
    v = fac(3)
    for a in exp:
        v *= fac(a)
    return mpq(v, fac(n + 3))


def integrate_cell(p: BaryPoly, geom) -> Rational:
    """Exact integral over the tetrahedron (true measure)."""
    vol = geom.volume if hasattr(geom, "volume") else mpq(geom)
    total = mpq(0)
    for e, c in p.terms.items():
        total += c * _cell_weight(e)
    return total * vol


@lru_cache(maxsize=None)
def _face_weight(exp: Exp) -> Rational:
    n = sum(exp)
    v = fac(2)
    for a in exp:
        v *= fac(a)
    return mpq(v, fac(n + 2))


def integrate_face(p: BaryPoly, face: int) -> Rational:
    """Integral over face ``face`` against the scaled (measure / area) weight.

    Monomials containing lambda_face restrict to zero and drop out, so the
    argument need not be restricted beforehand.
    """
    total = mpq(0)
    for e, c in p.terms.items():
        if e[face] == 0:
            total += c * _face_weight(e)
    return total


@lru_cache(maxsize=None)
def _edge_weight(exp: Exp) -> Rational:
    n = sum(exp)
    v = fac(1)
    for a in exp:
        v *= fac(a)
    return mpq(v, fac(n + 1))


def integrate_edge(p: BaryPoly, edge_support: tuple[int, int]) -> Rational:
    """Integral over the edge spanned by two vertices, scaled measure."""
    i, j = edge_support
    others = [a for a in range(4) if a not in (i, j)]
    total = mpq(0)
    for e, c in p.terms.items():
        if e[others[0]] == 0 and e[others[1]] == 0:
            total += c * _edge_weight(e)
    return total


class VecPoly:
    """R^3-valued polynomial; components share one homogeneous degree."""

    __slots__ = ("comps", "degree")

    def __init__(self, comps: Sequence[BaryPoly]):
        comps = list(comps)
        if len(comps) != 3:
            raise ValueError("VecPoly needs 3 components")
        d = max(c.degree for c in comps)
        self.comps = tuple(c.homogenize(d) for c in comps)
        self.degree = d

    @staticmethod
    def zero(degree: int = 0) -> "VecPoly":
        return VecPoly([BaryPoly.zero(degree)] * 3)

    @staticmethod
    def constant(v) -> "VecPoly":
        return VecPoly([BaryPoly.constant(x) for x in v])

    def __getitem__(self, i: int) -> BaryPoly:
        return self.comps[i]

    def __add__(self, other: "VecPoly") -> "VecPoly":
        return VecPoly([a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other: "VecPoly") -> "VecPoly":
        return VecPoly([a - b for a, b in zip(self.comps, other.comps)])

    def __neg__(self):
        return VecPoly([-a for a in self.comps])

    def scale(self, c) -> "VecPoly":
        return VecPoly([a.scale(c) for a in self.comps])

    def mul_poly(self, q: BaryPoly) -> "VecPoly":
        return VecPoly([a * q for a in self.comps])

    def dot_const(self, v) -> BaryPoly:
        out = BaryPoly.zero(self.degree)
        for a, x in zip(self.comps, v):
            out = out + a.scale(x)
        return out

    def dot(self, other: "VecPoly") -> BaryPoly:
        out = BaryPoly.zero(self.degree + other.degree)
        for a, b in zip(self.comps, other.comps):
            out = out + a * b
        return out

    def cross_const(self, v) -> "VecPoly":
        a = self.comps
        return VecPoly(
            [
                a[1].scale(v[2]) - a[2].scale(v[1]),
                a[2].scale(v[0]) - a[0].scale(v[2]),
                a[0].scale(v[1]) - a[1].scale(v[0]),
            ]
        )

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def __eq__(self, other):
        return all(a == b for a, b in zip(self.comps, other.comps))

    def restrict_zero(self, i: int) -> "VecPoly":
        return VecPoly([c.restrict_zero(i) for c in self.comps])

    def evaluate(self, lam):
        return tuple(c.evaluate(lam) for c in self.comps)

    def __repr__(self):
        return f"VecPoly({list(self.comps)!r})"


SYMMETRY_TAGS = ("general", "S", "T", "K", "ST")


class MatPoly:
    """3x3-matrix-valued polynomial with an advisory symmetry tag."""

    __slots__ = ("entries", "degree", "tag")

    def __init__(self, entries, tag: str = "general"):
        rows = [list(r) for r in entries]
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("MatPoly needs 3x3 entries")
        d = max(e.degree for r in rows for e in r)
        self.entries = tuple(tuple(e.homogenize(d) for e in r) for r in rows)
        self.degree = d
        if tag not in SYMMETRY_TAGS:
            raise ValueError(f"unknown symmetry tag {tag!r}")
        self.tag = tag

    @staticmethod
    def zero(degree: int = 0, tag: str = "general") -> "MatPoly":
        z = BaryPoly.zero(degree)
        return MatPoly([[z, z, z]] * 3, tag)

    @staticmethod
    def constant(m, tag: str = "general") -> "MatPoly":
        return MatPoly([[BaryPoly.constant(x) for x in row] for row in m], tag)

    @staticmethod
    def from_poly_times_matrix(p: BaryPoly, m, tag: str = "general") -> "MatPoly":
        return MatPoly([[p.scale(x) for x in row] for row in m], tag)

    @staticmethod
    def identity(degree: int = 0) -> "MatPoly":
        one = BaryPoly.constant(1)
        zero = BaryPoly.zero()
        return MatPoly(
            [[one, zero, zero], [zero, one, zero], [zero, zero, one]], "S"
        ).homogenize(degree)

    def homogenize(self, degree: int) -> "MatPoly":
        return MatPoly(
            [[e.homogenize(degree) for e in row] for row in self.entries], self.tag
        )

    def __getitem__(self, ij) -> BaryPoly:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> VecPoly:
        return VecPoly(list(self.entries[i]))

    def col(self, j: int) -> VecPoly:
        return VecPoly([self.entries[i][j] for i in range(3)])

    def _merge_tag(self, other: "MatPoly") -> str:
        return self.tag if self.tag == other.tag else "general"

    def __add__(self, other: "MatPoly") -> "MatPoly":
        return MatPoly(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ],
            self._merge_tag(other),
        )

    def __sub__(self, other: "MatPoly") -> "MatPoly":
        return MatPoly(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ],
            self._merge_tag(other),
        )

    def __neg__(self):
        return MatPoly([[-e for e in row] for row in self.entries], self.tag)

    def scale(self, c) -> "MatPoly":
        return MatPoly([[e.scale(c) for e in row] for row in self.entries], self.tag)

    def mul_poly(self, q: BaryPoly) -> "MatPoly":
        return MatPoly([[e * q for e in row] for row in self.entries], self.tag)

    def transpose(self) -> "MatPoly":
        return MatPoly(
            [[self.entries[j][i] for j in range(3)] for i in range(3)], self.tag
        )

    def trace_poly(self) -> BaryPoly:
        return self.entries[0][0] + self.entries[1][1] + self.entries[2][2]

    def matvec_const(self, v) -> VecPoly:
        return VecPoly([self.row(i).dot_const(v) for i in range(3)])

    def premul_const_vec(self, v) -> VecPoly:
        """v . U  (row vector times matrix), returned as a vector."""
        return VecPoly([self.col(j).dot_const(v) for j in range(3)])

    def mul_const_left(self, m) -> "MatPoly":
        """Constant matrix times polynomial matrix."""
        out = []
        for i in range(3):
            row = []
            for j in range(3):
                s = BaryPoly.zero(self.degree)
                for k in range(3):
                    s = s + self.entries[k][j].scale(m[i][k])
                row.append(s)
            out.append(row)
        return MatPoly(out)

    def mul_const_right(self, m) -> "MatPoly":
        out = []
        for i in range(3):
            row = []
            for j in range(3):
                s = BaryPoly.zero(self.degree)
                for k in range(3):
                    s = s + self.entries[i][k].scale(m[k][j])
                row.append(s)
            out.append(row)
        return MatPoly(out)

    def frobenius(self, other: "MatPoly") -> BaryPoly:
        out = BaryPoly.zero(self.degree + other.degree)
        for i in range(3):
            for j in range(3):
                out = out + self.entries[i][j] * other.entries[i][j]
        return out

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def __eq__(self, other):
        return all(
            a == b
            for ra, rb in zip(self.entries, other.entries)
            for a, b in zip(ra, rb)
        )

    def restrict_zero(self, i: int) -> "MatPoly":
        return MatPoly(
            [[e.restrict_zero(i) for e in row] for row in self.entries], self.tag
        )

    def evaluate(self, lam):
        return tuple(
            tuple(e.evaluate(lam) for e in row) for row in self.entries
        )

    def check_tag(self) -> bool:
        """Exact validation of the advisory symmetry tag."""
        if self.tag in ("S", "ST") and not (self - self.transpose()).is_zero():
            return False
        if self.tag == "K" and not (self + self.transpose()).is_zero():
            return False
        if self.tag in ("T", "ST") and not self.trace_poly().is_zero():
            return False
        return True

    def __repr__(self):
        return f"MatPoly(deg {self.degree}, tag {self.tag})"


def dot_const_grad(v: Sequence[Rational], grads) -> list[Rational]:
    """Chain-rule coefficients of the directional derivative v . nabla."""
    return [sum(mpq(v[a]) * grads[j][a] for a in range(3)) for j in range(4)]
