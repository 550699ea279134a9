"""Cyclopolytopes N_k, their polar duals, and the Laurent polynomials F_k, P_k."""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .errors import DomainError, ResourceGuardError
from .numtheory import cyclotomic_poly, euler_phi, factorize, is_prime

MAX_HULL_DIM = 16


@lru_cache(maxsize=256)
def _root_vectors(k):
    phi = cyclotomic_poly(k)
    d = len(phi) - 1
    vecs = []
    cur = [0] * d
    if d:
        cur[0] = 1
    else:  # k = 1: Phi_1 = t - 1, t = 1
        return ((),)
    for _ in range(k):
        vecs.append(tuple(cur))
        # multiply by t and reduce mod the monic Phi_k
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * phi[i] for i, c in enumerate(cur)]
    return tuple(vecs)


def root_vectors(k):
    """Coordinates of zeta_k^r in the power basis 1, zeta, ..., zeta^(d-1), r = 0..k-1."""
    if k < 1:
        raise DomainError("k must be positive")
    if k == 1:
        return [(1,)]
    return list(_root_vectors(k))


# ------------------------------------------------------------ Laurent polys


@dataclass
class LaurentPoly:
    terms: dict
    nvars: int

    def __post_init__(self):
        self.terms = {tuple(e): c for e, c in self.terms.items() if c != 0}

    def __mul__(self, other):
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly(out, self.nvars)

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out, self.nvars)

    def inverted(self):
        """The polynomial with every variable replaced by its inverse."""
        return LaurentPoly({tuple(-a for a in e): c for e, c in self.terms.items()}, self.nvars)

    def is_reciprocal(self):
        return self.terms == self.inverted().terms

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, 0)

    def evaluate(self, point):
        total = 0
        for e, c in self.terms.items():
            v = c
            for x, a in zip(point, e):
                v = v * (x**a if a >= 0 else (1 / x) ** (-a))
            total = total + v
        return total


def laurent_Fk(k):
    vecs = root_vectors(k)
    return LaurentPoly({v: 1 for v in vecs}, len(vecs[0]))


def eval_at_signs(k, x0, signs):
    """Exact value of P_k = x0 + F_k at a point with all coordinates +-1."""
    vecs = root_vectors(k)
    if len(signs) != len(vecs[0]):
        raise DomainError("sign vector has the wrong length")
    if x0 not in (1, -1) or any(s not in (1, -1) for s in signs):
        raise DomainError("entries must be +-1")
    neg = [i for i, s in enumerate(signs) if s == -1]
    total = x0
    for v in vecs:
        total += -1 if sum(v[i] for i in neg) % 2 else 1
    return total


# -------------------------------------------------- arithmetic in Q(sqrt -15)


@dataclass(frozen=True)
class QSqrtM15:
    """a + b*sqrt(-15) with rational a, b."""

    a: Fraction
    b: Fraction

    def __add__(self, o):
        o = _lift(o)
        return QSqrtM15(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrtM15(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-_lift(o))

    def __mul__(self, o):
        o = _lift(o)
        return QSqrtM15(self.a * o.a - 15 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def norm(self):
        return self.a * self.a + 15 * self.b * self.b

    def __truediv__(self, o):
        o = _lift(o)
        n = o.norm()
        conj = QSqrtM15(o.a / n, -o.b / n)
        return self * conj

    def __rtruediv__(self, o):
        return _lift(o) / self

    def __pow__(self, e):
        base = self if e >= 0 else 1 / self
        out = QSqrtM15(Fraction(1), Fraction(0))
        for _ in range(abs(e)):
            out = out * base
        return out

    def is_zero(self):
        return self.a == 0 and self.b == 0


def _lift(x):
    if isinstance(x, QSqrtM15):
        return x
    return QSqrtM15(Fraction(x), Fraction(0))


ETA = QSqrtM15(Fraction(1, 4), Fraction(1, 4))


def eta_point(k):
    """The explicit torus point on C_k for k = 2l, l an odd prime, or None."""
    if k % 2 or not is_prime(k // 2) or k // 2 == 2:
        return None
    ell = k // 2
    d = ell - 1
    one = _lift(1)
    if ell % 4 == 3:
        x0 = -one
        xs = [-ETA] + [one if i % 2 == 0 else -one for i in range(d - 1)]
    else:
        x0 = one
        xs = [ETA, ETA] + [one if i % 2 == 0 else -one for i in range(d - 2)]
    return x0, xs


def torus_point_check(k):
    """'certified-nonempty' when C_k meets the real torus by an exact argument, else 'undecided'."""
    if k < 2:
        raise DomainError("k must be at least 2")
    d = euler_phi(k)
    if eval_at_signs(k, -1, [-1] * d) < 0:
        return "certified-nonempty"
    pt = eta_point(k)
    if pt is not None:
        x0, xs = pt
        if (x0 + laurent_Fk(k).evaluate(xs)).is_zero():
            return "certified-nonempty"
    return "undecided"


# ---------------------------------------------------------------- polytopes


def _primitive(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def _rank(rows):
    rows = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != 0:
                f = rows[i][c] / rows[rank][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _solve_rows(rows):
    """Inverse of a square integer matrix over the rationals."""
    n = len(rows)
    m = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        piv = next(i for i in range(c, n) if m[i][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        p = m[c][c]
        m[c] = [x / p for x in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return [r[n:] for r in m]


def _to_int_vec(v):
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    return _primitive(tuple(int(x * den) for x in v))


def _extreme_rays(constraints, dim):
    """Double description: extreme rays of {x in R^dim : <c, x> >= 0 for c in constraints}.

    The cone is assumed pointed. Rays are primitive integer vectors.
    """
    cons = [tuple(c) for c in constraints]
    # choose dim linearly independent constraints to start
    basis = []
    for c in cons:
        if _rank(basis + [c]) > len(basis):
            basis.append(c)
        if len(basis) == dim:
            break
    if len(basis) < dim:
        raise DomainError("cone is not pointed")
    inv = _solve_rows(basis)
    rays = [_to_int_vec([inv[i][j] for i in range(dim)]) for j in range(dim)]
    done = list(basis)

    def zero_set(r):
        return frozenset(i for i, c in enumerate(done) if sum(a * b for a, b in zip(c, r)) == 0)

    zsets = [zero_set(r) for r in rays]
    for c in cons:
        if c in basis:
            continue
        vals = [sum(a * b for a, b in zip(c, r)) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        zer = [i for i, v in enumerate(vals) if v == 0]
        new_rays = []
        new_z = []
        for i in pos:
            for j in neg:
                common = zsets[i] & zsets[j]
                if len(common) < dim - 2:
                    continue
                adjacent = True
                for t in range(len(rays)):
                    if t != i and t != j and common <= zsets[t]:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                r = tuple(vals[i] * b - vals[j] * a for a, b in zip(rays[i], rays[j]))
                r = _primitive(r)
                new_rays.append(r)
                new_z.append(common)
        keep = pos + zer
        rays = [rays[i] for i in keep] + new_rays
        idx = len(done)
        done.append(c)
        zsets = [zsets[i] | ({idx} if vals[i] == 0 else frozenset()) for i in keep] + [
            z | {idx} for z in new_z
        ]
    return rays


@dataclass
class LatticePolytope:
    """Convex hull of lattice (or rational) points containing the origin in its interior.

    facets are pairs (a, 1) meaning <a, x> <= 1 with rational a.
    """

    dim: int
    vertices: list
    facets: list = field(default_factory=list)

    def facet_normals(self):
        return [a for a, _ in self.facets]


def _check_dim(d):
    if d > MAX_HULL_DIM:
        raise ResourceGuardError(f"convex hull limited to dimension <= {MAX_HULL_DIM}")


def _hull(points):
    """Vertices and facet normals (<a, x> <= 1) of conv(points) with 0 in the interior."""
    pts = [tuple(Fraction(x) for x in p) for p in points]
    d = len(pts[0])
    _check_dim(d)
    if _rank([list(p) for p in pts]) < d:
        raise DomainError("points do not span the space")
    # facets of P <-> vertices of P* = {w : <p, w> <= 1}; homogenize w -> (w, s)
    cons = []
    for p in pts:
        den = 1
        for x in p:
            den = den * x.denominator // gcd(den, x.denominator)
        cons.append(tuple([-int(x * den) for x in p] + [den]))
    rays = _extreme_rays(cons, d + 1)
    normals = []
    for r in rays:
        s = r[-1]
        if s <= 0:
            raise DomainError("origin is not in the interior")
        normals.append(tuple(Fraction(x, s) for x in r[:-1]))
    normals = sorted(set(normals))
    # a point is a vertex iff the facets through it span R^d
    verts = []
    for p in pts:
        tight = [a for a in normals if sum(x * y for x, y in zip(a, p)) == 1]
        if tight and _rank([list(a) for a in tight]) == d:
            verts.append(p)
    for a in normals:
        if any(sum(x * y for x, y in zip(a, p)) > 1 for p in pts):
            raise DomainError("origin is not in the interior")
    verts = sorted(set(verts))
    return verts, normals


def _simplify(v):
    return tuple(int(x) if isinstance(x, Fraction) and x.denominator == 1 else x for x in v)


def polytope_from_points(points):
    verts, normals = _hull(points)
    return LatticePolytope(len(verts[0]), [_simplify(v) for v in verts],
                           [(_simplify(a), 1) for a in normals])


@lru_cache(maxsize=64)
def _cyclopolytope(k):
    return polytope_from_points(root_vectors(k))


def cyclopolytope(k):
    if k < 2:
        raise DomainError("cyclopolytope needs k >= 2")
    P = _cyclopolytope(k)
    return LatticePolytope(P.dim, list(P.vertices), list(P.facets))


def polar_dual(P):
    """The polytope {w : <v, w> <= 1 for all v in P}; its vertices are the facet normals of P."""
    verts = [_simplify(a) for a, _ in P.facets]
    if not verts:
        verts_, normals = _hull(P.vertices)
        verts = [_simplify(a) for a in normals]
    facets = [(_simplify(v), 1) for v in P.vertices]
    return LatticePolytope(P.dim, sorted(verts), facets)


def is_reflexive(P):
    dual = polar_dual(P)
    return all(isinstance(x, int) or Fraction(x).denominator == 1 for v in dual.vertices for x in v)


def is_centrally_symmetric(P):
    vs = {tuple(Fraction(x) for x in v) for v in P.vertices}
    return all(tuple(-x for x in v) in vs for v in vs)


def is_centrally_symmetric_points(points):
    vs = set(map(tuple, points))
    return all(tuple(-x for x in v) in vs for v in vs)


def direct_sum_structure(k):
    """Check that A_k is the union of q^(r-1) coordinate blocks each carrying a copy of A_{2q}.

    With m = q^(r-1), block a uses coordinates a, a + m, ..., a + (q-2)m. Since
    every point of A_{2q} is a vertex of N_{2q}, the block decomposition of the
    point set is also the vertex set of the direct sum.
    """
    if k % 2:
        raise DomainError("k must be 2 q^r")
    fac = factorize(k // 2)
    if len(fac) != 1:
        raise DomainError("k must be 2 q^r with q an odd prime")
    (q, r), = fac.items()
    if q == 2:
        raise DomainError("q must be odd")
    m = q ** (r - 1)
    d = euler_phi(k)
    block = root_vectors(2 * q)
    expected = set()
    for a in range(m):
        for v in block:
            w = [0] * d
            for j, x in enumerate(v):
                w[a + m * j] = x
            expected.add(tuple(w))
    actual = set(root_vectors(k))
    if actual != expected:
        return False
    if d <= MAX_HULL_DIM:
        verts = {tuple(int(x) for x in v) for v in cyclopolytope(k).vertices}
        return verts == expected
    # vertex set of a direct sum is the union of the block vertex sets
    block_verts = {tuple(int(x) for x in v) for v in cyclopolytope(2 * q).vertices}
    return block_verts == set(block)
