from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from cyclomahler.cyclogeom import (
    ETA,
    cyclopolytope,
    direct_sum_structure,
    eval_at_signs,
    is_centrally_symmetric,
    is_reflexive,
    laurent_Fk,
    polar_dual,
    polytope_from_points,
    root_vectors,
    torus_point_check,
)
from cyclomahler.errors import DomainError, ResourceGuardError
from cyclomahler.numtheory import euler_phi


def as_set(vs):
    return {tuple(Fraction(x) for x in v) for v in vs}


def test_root_vector_examples():
    assert set(root_vectors(4)) == {(1, 0), (0, 1), (-1, 0), (0, -1)}
    assert set(root_vectors(6)) == {(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)}
    assert root_vectors(2) == [(1,), (-1,)]


def test_root_vectors_shape():
    for k in range(2, 301):
        vs = root_vectors(k)
        d = euler_phi(k)
        assert len(vs) == k and len(set(vs)) == k
        assert vs[:d] == [tuple(int(i == j) for j in range(d)) for i in range(d)]


def test_cross_polytopes_and_hexagon():
    cross = lambda d: as_set([tuple(s * (i == j) for j in range(d)) for i in range(d) for s in (1, -1)])
    assert as_set(cyclopolytope(4).vertices) == cross(2)
    assert as_set(cyclopolytope(8).vertices) == cross(4)
    assert as_set(cyclopolytope(6).vertices) == as_set(root_vectors(6))


@pytest.mark.parametrize("k", [3, 5, 6, 7, 8, 9, 10, 12, 14, 15, 16, 18, 20])
def test_vertices_against_qhull(k):
    pts = np.array(root_vectors(k), dtype=float)
    hull = ConvexHull(pts)
    want = as_set(pts[hull.vertices].round().astype(int).tolist())
    assert as_set(cyclopolytope(k).vertices) == want


def test_duals():
    assert as_set(polar_dual(cyclopolytope(4)).vertices) == as_set(product((1, -1), repeat=2))
    N6 = cyclopolytope(6)
    assert as_set(polar_dual(polar_dual(N6)).vertices) == as_set(N6.vertices)


def test_n10_dual_is_cube_cut_by_slab():
    # N_10 = conv(+-e_i, +-v), so its dual is the cube |x_i| <= 1 cut by the slab |<v, x>| <= 1
    from scipy.spatial import HalfspaceIntersection

    A = root_vectors(10)
    halfspaces = np.array([list(a) + [-1.0] for a in A])
    hs = HalfspaceIntersection(halfspaces, np.zeros(4))
    want = as_set(np.round(hs.intersections).astype(int).tolist())
    dual = as_set(polar_dual(cyclopolytope(10)).vertices)
    assert dual == want
    assert all(x.denominator == 1 for v in dual for x in v)
    # the cube corners among the vertices are exactly those inside the slab
    v = A[4]
    corners = {w for w in product((1, -1), repeat=4) if abs(sum(a * b for a, b in zip(v, w))) <= 1}
    assert as_set(corners) == {w for w in dual if all(abs(x) == 1 for x in w)}


def test_double_dual_is_identity():
    for k in range(3, 21):
        if euler_phi(k) <= 8:
            P = cyclopolytope(k)
            assert as_set(polar_dual(polar_dual(P)).vertices) == as_set(P.vertices)


def test_reflexivity():
    assert is_reflexive(cyclopolytope(6))
    assert is_reflexive(cyclopolytope(12))
    control = polytope_from_points([(1, 0), (0, 1), (-2, -2)])
    # facet normals: (1, 1) gives <a,x> <= 1; the other two have denominator 2... decided by qhull
    hull = ConvexHull(np.array([(1, 0), (0, 1), (-2, -2)], dtype=float))
    offs = [-eq[2] / np.linalg.norm(eq[:2]) for eq in hull.equations]
    normals = [eq[:2] / (-eq[2]) for eq in hull.equations]
    integral = all(np.allclose(n, np.round(n)) for n in normals) and all(o > 0 for o in offs)
    assert is_reflexive(control) == integral


def test_reflexive_matches_facet_denominators():
    for k in range(2, 31):
        if euler_phi(k) <= 8:
            P = cyclopolytope(k)
            integral = all(Fraction(x).denominator == 1 for a in P.facet_normals() for x in a)
            assert is_reflexive(P) == integral


def test_central_symmetry():
    assert not is_centrally_symmetric(cyclopolytope(3))
    assert is_centrally_symmetric(cyclopolytope(2))
    for k in range(2, 61, 2):
        assert laurent_Fk(k).is_reciprocal()
        if euler_phi(k) <= 8:
            assert is_centrally_symmetric(cyclopolytope(k))
    for k in (3, 5, 7, 9):
        assert not laurent_Fk(k).is_reciprocal()


def test_direct_sum():
    assert direct_sum_structure(18)
    assert direct_sum_structure(6)
    assert direct_sum_structure(50)
    with pytest.raises(DomainError):
        direct_sum_structure(12)


def test_hull_dimension_guard():
    with pytest.raises(ResourceGuardError):
        cyclopolytope(17 * 2 * 3)  # phi = 32


def test_laurent_examples():
    assert laurent_Fk(2).terms == {(1,): 1, (-1,): 1}
    assert laurent_Fk(6).terms == {v: 1 for v in [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)]}
    F5 = laurent_Fk(5)
    assert set(F5.terms) == {(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (-1, -1, -1, -1)}
    for k in range(1, 40):
        F = laurent_Fk(k)
        assert len(F.terms) == k and set(F.terms.values()) == {1}
        assert F.evaluate([Fraction(1)] * F.nvars) == k


def test_eval_at_signs():
    for k in (3, 6, 10, 12):
        assert eval_at_signs(k, 1, [1] * euler_phi(k)) == k + 1
    for r in range(1, 7):
        k = 2**r
        assert eval_at_signs(k, -1, [-1] * euler_phi(k)) == -k - 1
    assert eval_at_signs(210, -1, [-1] * 48) == -71


def test_eval_at_signs_brute_force():
    # compare with direct evaluation of the Laurent polynomial
    for k in (5, 6, 9, 10, 12):
        F = laurent_Fk(k)
        for signs in product((1, -1), repeat=euler_phi(k)):
            assert eval_at_signs(k, 1, list(signs)) == 1 + F.evaluate([Fraction(s) for s in signs])


def test_torus_point_k6_exact():
    x0, x1, x2 = Fraction(-1), -ETA, Fraction(1)
    assert 2 * ETA.a == Fraction(1, 2)  # eta + conj(eta)
    val = x0 + laurent_Fk(6).evaluate([x1, x2])
    assert val.is_zero()
    assert ETA.norm() == 1


def test_torus_point_check():
    for k in (4, 6, 8, 9, 10, 25, 27):
        assert torus_point_check(k) == "certified-nonempty"
    for k in (3, 5, 7, 9, 25, 27, 49):
        assert torus_point_check(k) == "certified-nonempty"
