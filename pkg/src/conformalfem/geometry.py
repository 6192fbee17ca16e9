"""Tetrahedron combinatorics and exact geometric frames.

Face index i is the face opposite vertex i; its barycentric coordinate is
lambda_i.  Edges are keyed by their sorted vertex-index pair (a, b); the two
faces containing edge (a, b) are the faces opposite the remaining vertices.

All frames are *scaled*: outward normals are the rational vectors
N_i = -grad(lambda_i) (a positive multiple of the unit normal), and tangents
are vertex differences.  Unit-normal data (heights, areas, unit tangents) is
materialized exactly only on tetrahedra where the relevant square roots are
rational, such as the shipped unit fixture.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import isqrt
from typing import Sequence

from gmpy2 import mpq

from .polyalg import BaryPoly
from .scalarfield import Rational


class DegenerateGeometryError(ValueError):
    """Vertices are affinely dependent."""


Vec = tuple[Rational, Rational, Rational]


def vec(x, y, z) -> Vec:
    return (mpq(x), mpq(y), mpq(z))


def v_add(a, b) -> Vec:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def v_sub(a, b) -> Vec:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def v_scale(c, a) -> Vec:
    c = mpq(c)
    return (c * a[0], c * a[1], c * a[2])


def v_dot(a, b) -> Rational:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def v_cross(a, b) -> Vec:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def det3(a, b, c) -> Rational:
    return v_dot(a, v_cross(b, c))


def rational_sqrt(q) -> Rational | None:
    """Exact square root of a rational, or None when irrational."""
    q = mpq(q)
    if q < 0:
        return None
    n, d = int(q.numerator), int(q.denominator)
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return mpq(rn, rd)
    return None


@dataclass(frozen=True)
class EdgeFrame:
    """Directed data for the edge between vertices a < b."""

    verts: tuple[int, int]
    tangent: Vec                 # v_b - v_a, unnormalized
    faces: tuple[int, int]       # the two incident faces, sorted
    transversal: tuple[Vec, Vec]  # rational pair spanning tangent-perp
    length: Rational | None      # exact |tangent| when rational

    @property
    def support(self) -> tuple[int, int]:
        return self.verts

    def unit_tangent(self) -> Vec:
        if self.length is None:
            raise ValueError("edge length is irrational; use the unit fixture")
        inv = 1 / self.length
        return v_scale(inv, self.tangent)


class TetGeometry:
    """Exact derived data of one tetrahedron with rational vertices."""

    def __init__(self, vertices: Sequence[Sequence]):
        vs = [vec(*v) for v in vertices]
        if len(vs) != 4:
            raise ValueError("need 4 vertices")
        e = [v_sub(vs[i], vs[0]) for i in (1, 2, 3)]
        d = det3(*e)
        if d == 0:
            raise DegenerateGeometryError("coplanar vertices")
        self.orientation_fixed = d < 0
        if d < 0:
            vs[2], vs[3] = vs[3], vs[2]
            e = [v_sub(vs[i], vs[0]) for i in (1, 2, 3)]
            d = det3(*e)
        self.vertices: tuple[Vec, ...] = tuple(vs)
        self.volume: Rational = mpq(d, 6)

        # gradients of lambda_1..3 are rows of the inverse edge matrix
        cof = [
            v_cross(e[1], e[2]),
            v_cross(e[2], e[0]),
            v_cross(e[0], e[1]),
        ]
        grads = [v_scale(1 / d, c) for c in cof]
        g0 = v_scale(-1, v_add(v_add(grads[0], grads[1]), grads[2]))
        self.bary_gradients: tuple[Vec, ...] = (g0, *grads)

        # outward scaled normals and per-face frames (built lazily by tensorops)
        self.scaled_normals: tuple[Vec, ...] = tuple(
            v_scale(-1, g) for g in self.bary_gradients
        )
        self.edges: dict[tuple[int, int], EdgeFrame] = {}
        for a, b in combinations(range(4), 2):
            t = v_sub(vs[b], vs[a])
            faces = tuple(sorted(set(range(4)) - {a, b}))
            n1 = _any_perp(t)
            n2 = v_cross(t, n1)
            self.edges[(a, b)] = EdgeFrame(
                verts=(a, b),
                tangent=t,
                faces=faces,
                transversal=(n1, n2),
                length=rational_sqrt(v_dot(t, t)),
            )

    # face index -> sorted vertex triple
    def face_vertices(self, face: int) -> tuple[int, int, int]:
        return tuple(i for i in range(4) if i != face)

    def face_oriented_boundary(self, face: int) -> list[tuple[int, int]]:
        """Directed edges (tail, head) following the outward-normal orientation."""
        a, b, c = self.face_vertices(face)
        n = self.scaled_normals[face]
        vs = self.vertices
        s = det3(v_sub(vs[b], vs[a]), v_sub(vs[c], vs[a]), n)
        if s > 0:
            return [(a, b), (b, c), (c, a)]
        return [(a, c), (c, b), (b, a)]

    def face_area_doubled(self, face: int) -> Rational | None:
        """Exact 2*area when rational, else None."""
        a, b, c = self.face_vertices(face)
        cr = v_cross(
            v_sub(self.vertices[b], self.vertices[a]),
            v_sub(self.vertices[c], self.vertices[a]),
        )
        return rational_sqrt(v_dot(cr, cr))

    def unit_normal(self, face: int) -> Vec | None:
        n = self.scaled_normals[face]
        ln = rational_sqrt(v_dot(n, n))
        if ln is None:
            return None
        return v_scale(1 / ln, n)

    def height(self, face: int) -> Rational | None:
        """Distance from face to the opposite vertex; rational iff |N| is."""
        n = self.scaled_normals[face]
        ln = rational_sqrt(v_dot(n, n))
        if ln is None:
            return None
        # grad(lambda_face) = -n_unit / h  =>  h = 1 / |grad lambda_face|
        return 1 / ln

    def height_squared(self, face: int) -> Rational:
        n = self.scaled_normals[face]
        return 1 / v_dot(n, n)

    def is_unit_frame(self) -> bool:
        return all(self.unit_normal(f) is not None for f in range(4)) and all(
            e.length is not None for e in self.edges.values()
        )

    def barycentric(self, point: Sequence) -> tuple[Rational, ...]:
        p = vec(*point)
        lams = []
        for j in range(4):
            g = self.bary_gradients[j]
            lams.append(v_dot(g, v_sub(p, self.vertices[0])) + (1 if j == 0 else 0))
        # lambda_j(x) = lambda_j(v0) + grad . (x - v0); lambda(v0) = e_0
        return tuple(lams)

    def point_of(self, lam: Sequence) -> Vec:
        out = (mpq(0), mpq(0), mpq(0))
        for j in range(4):
            out = v_add(out, v_scale(lam[j], self.vertices[j]))
        return out


def _any_perp(t: Vec) -> Vec:
    """A rational vector perpendicular to t (t nonzero)."""
    axes = [(mpq(1), mpq(0), mpq(0)), (mpq(0), mpq(1), mpq(0)), (mpq(0), mpq(0), mpq(1))]
    best = min(range(3), key=lambda i: abs(t[i]))
    return v_cross(t, axes[best])


def build_geometry(vertices) -> TetGeometry:
    return TetGeometry(vertices)


def reference_tet() -> TetGeometry:
    return TetGeometry([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])


# Tetrahedron with four rational unit normals, rational edge lengths, face
# areas, and heights.  Found by exhaustive search over Pythagorean-quadruple
# unit vectors (find_unit_fixture regenerates it).
UNIT_FIXTURE_VERTICES = ((9, 0, 108), (0, 108, 0), (0, 12, 128), (0, 12, 72))


def unit_fixture_tet() -> TetGeometry:
    geom = TetGeometry(UNIT_FIXTURE_VERTICES)
    assert geom.is_unit_frame()
    return geom


def bubble(geom_or_none, entity) -> BaryPoly:
    """Cell/face/edge bubble as an exact homogeneous monomial.

    entity: "cell", a face index 0..3, or an edge vertex pair (a, b).
    """
    if entity == "cell":
        return BaryPoly.monomial((1, 1, 1, 1))
    if isinstance(entity, int):
        e = [1, 1, 1, 1]
        e[entity] = 0
        return BaryPoly.monomial(tuple(e))
    a, b = entity
    e = [0, 0, 0, 0]
    e[a] = 1
    e[b] = 1
    return BaryPoly.monomial(tuple(e))


def random_tet(rng, span: int = 4, denom: int = 3) -> TetGeometry:
    """Seeded random non-degenerate tetrahedron with small rational vertices."""
    while True:
        verts = [
            tuple(
                mpq(rng.randint(-span, span), rng.randint(1, denom))
                for _ in range(3)
            )
            for _ in range(4)
        ]
        try:
            geom = TetGeometry(verts)
        except DegenerateGeometryError:
            continue
        if abs(geom.volume) >= mpq(1, 50):
            return geom


def find_unit_fixture(max_denominator: int = 25, want: int = 1):
    """Exhaustive search for unit-frame tetrahedra.

    Enumerates rational unit vectors (Pythagorean quadruples) up to the
    denominator bound, keeps 4-subsets whose pairwise cross products have
    rational norms and that close up with positive weights, and intersects
    the face planes.  Doubles the bound when nothing is found.
    """
    from fractions import Fraction
    from itertools import permutations, product

    def is_square_frac(q: Fraction) -> bool:
        return (
            q >= 0
            and isqrt(q.numerator) ** 2 == q.numerator
            and isqrt(q.denominator) ** 2 == q.denominator
        )

    bound = max_denominator
    while True:
        vecs = set()
        for d in range(1, bound + 1):
            for a in range(0, d + 1):
                for b in range(a, d + 1):
                    c2 = d * d - a * a - b * b
                    if c2 < 0:
                        break
                    c = isqrt(c2)
                    if c * c != c2 or c < b:
                        continue
                    for perm in set(permutations((a, b, c))):
                        for signs in product((1, -1), repeat=3):
                            vecs.add(
                                tuple(
                                    Fraction(s * x, d)
                                    for s, x in zip(signs, perm)
                                )
                            )
        vecs = sorted(vecs)

        def dot_f(u, v):
            return sum(x * y for x, y in zip(u, v))

        def compatible(u, v):
            d = dot_f(u, v)
            return d not in (1, -1) and is_square_frac(1 - d * d)

        n = len(vecs)
        adj = [set() for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if compatible(vecs[i], vecs[j]):
                    adj[i].add(j)
                    adj[j].add(i)

        found = []
        for i in range(n):
            for j in sorted(adj[i]):
                if j <= i:
                    continue
                cij = adj[i] & adj[j]
                for k in sorted(cij):
                    if k <= j:
                        continue
                    for l in sorted(cij & adj[k]):
                        if l <= k:
                            continue
                        tet = _tet_from_unit_normals(
                            [vecs[i], vecs[j], vecs[k], vecs[l]]
                        )
                        if tet is not None:
                            found.append(tet)
                            if len(found) >= want:
                                return found
        if found:
            return found
        bound *= 2


def _tet_from_unit_normals(ns):
    from fractions import Fraction

    def cross_f(u, v):
        return (
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        )

    def dot_f(u, v):
        return sum(x * y for x, y in zip(u, v))

    def det_f(a, b, c):
        return dot_f(a, cross_f(b, c))

    w = [(-1) ** i * det_f(*[ns[j] for j in range(4) if j != i]) for i in range(4)]
    if any(x == 0 for x in w):
        return None
    if all(x > 0 for x in w):
        w = [-x for x in w]
    if not all(x < 0 for x in w):
        return None
    verts = []
    for i in range(4):
        rest = [ns[j] for j in range(4) if j != i]
        d = det_f(*rest)
        if d == 0:
            return None
        x = []
        for col in range(3):
            m = [list(r) for r in rest]
            for row in range(3):
                m[row][col] = Fraction(1)
            x.append(Fraction(det_f(*[tuple(r) for r in m]), d))
        verts.append(tuple(x))
    try:
        geom = TetGeometry(verts)
    except DegenerateGeometryError:
        return None
    if not geom.is_unit_frame():
        return None
    return geom
