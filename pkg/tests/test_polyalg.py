import random
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclomahler.polyalg import (
    compose_rational_mod,
    complex_roots,
    count_real_roots,
    cyclic_galois_certificate,
    discriminant,
    galois_generator,
    is_irreducible,
    mahler_measure_poly,
    pmul,
    real_rooted,
    resultant,
    splitting_type_mod_p,
)

X = sympy.Symbol("x")
CUBIC7 = [-1, -2, 1, 1]  # x^3 + x^2 - 2x - 1
QUINTIC11 = [1, 3, -3, -4, 1, 1]
SEPTIC29 = [1, -9, 14, 28, -7, -12, 1, 1]

int_polys = st.lists(st.integers(-20, 20), min_size=2, max_size=8).filter(lambda c: c[-1] != 0)
monic_polys = st.lists(st.integers(-9, 9), min_size=1, max_size=7).map(lambda c: c + [1])


@pytest.fixture(autouse=True)
def _compare_at_high_precision():
    # the library sets its own working precision; this only affects the comparisons below
    with mpmath.workdps(60):
        yield


def sym(f):
    return sympy.Poly(list(reversed(f)), X)


def test_complex_roots_examples():
    rs = complex_roots([-1, 0, 1])
    assert sorted(float(mpmath.re(z)) for z in rs.roots) == [-1.0, 1.0]
    rs = complex_roots(CUBIC7)
    want = sorted(2 * mpmath.cos(2 * mpmath.pi * j / 7) for j in (1, 2, 3))
    got = sorted(mpmath.re(z) for z in rs.roots)
    assert all(abs(a - b) < 1e-30 for a, b in zip(got, want))
    rs = complex_roots([1, 0, 1])
    assert sorted(float(mpmath.im(z)) for z in rs.roots) == [-1.0, 1.0]


@settings(max_examples=60)
@given(int_polys)
def test_roots_reconstruct_polynomial(f):
    rs = complex_roots(f)
    assert sum(rs.multiplicities) == len(f) - 1
    with mpmath.workprec(160):
        for x in (mpmath.mpf("0.3"), mpmath.mpc("-1.1", "0.7")):
            direct = sum(c * x**i for i, c in enumerate(f))
            prod = f[-1]
            for z, m in zip(rs.roots, rs.multiplicities):
                prod *= (x - z) ** m
            assert abs(direct - prod) <= 1e-25 * (1 + max(abs(c) for c in f)) * 10 ** len(f)


def test_mahler_examples():
    assert abs(mahler_measure_poly([-2, 1])[0] - mpmath.log(2)) < 1e-35
    m, _ = mahler_measure_poly(CUBIC7)
    assert abs(mpmath.exp(m) - mpmath.mpf("2.2469796037174670610500097680084796")) < 1e-30
    m, _ = mahler_measure_poly([-1, -1, 0, 1])
    assert abs(m - mpmath.mpf("0.2811995743")) < 1e-9


@settings(max_examples=40)
@given(int_polys, int_polys)
def test_mahler_multiplicative(f, g):
    mf, ef = mahler_measure_poly(f)
    mg, eg = mahler_measure_poly(g)
    mfg, efg = mahler_measure_poly(pmul(f, g))
    assert abs(mfg - mf - mg) <= ef + eg + efg + mpmath.mpf(2) ** -100


def test_mahler_includes_leading_coefficient():
    m, _ = mahler_measure_poly([1, 0, 3])
    assert abs(m - mpmath.log(3)) < 1e-30


@pytest.mark.parametrize("f,d", [([-1, 1, 1], 5), (CUBIC7, 49), ([1, 0, 1], -4)])
def test_discriminant_examples(f, d):
    assert discriminant(f) == d


@given(int_polys)
def test_discriminant_and_resultant_match_sympy(f):
    assert discriminant(f) == sympy.discriminant(sym(f))
    g = [3, -1, 2]
    assert resultant(f, g) == sympy.resultant(sym(f), sym(g))


@settings(max_examples=30)
@given(st.lists(st.integers(-6, 6), min_size=2, max_size=5).filter(lambda c: c[-1] != 0))
def test_discriminant_from_roots(f):
    rs = complex_roots(f)
    if any(m > 1 for m in rs.multiplicities):
        assert discriminant(f) == 0
        return
    n = len(f) - 1
    with mpmath.workprec(200):
        prod = mpmath.mpf(f[-1]) ** (2 * n - 2)
        for i in range(n):
            for j in range(i + 1, n):
                prod *= (rs.roots[i] - rs.roots[j]) ** 2
    assert abs(prod - discriminant(f)) < 1e-15 * (1 + abs(discriminant(f)))


def test_real_rooted_examples():
    assert real_rooted(CUBIC7)
    assert not real_rooted([1, 0, 1])
    assert real_rooted(QUINTIC11)


def test_real_rooted_random_against_roots():
    rng = random.Random(7)
    for _ in range(500):
        deg = rng.randint(1, 7)
        f = [rng.randint(-12, 12) for _ in range(deg)] + [rng.choice([-3, -2, -1, 1, 2, 3])]
        rs = complex_roots(f)
        real = all(abs(mpmath.im(z)) <= r for z, r in zip(rs.roots, rs.radii))
        assert real_rooted(f) == real
        assert count_real_roots(f) == len(set(sympy.real_roots(sym(f))))


def test_irreducible_examples():
    assert is_irreducible([-2, 0, 1])
    assert not is_irreducible([-1, 0, 1])
    assert is_irreducible(SEPTIC29)


@settings(max_examples=80)
@given(monic_polys)
def test_irreducible_matches_sympy(f):
    if len(f) < 2:
        return
    assert is_irreducible(f) == sym(f).is_irreducible


def test_galois_certificate_examples():
    assert cyclic_galois_certificate(CUBIC7, 3)
    assert not cyclic_galois_certificate([-2, 0, 0, 1], 3)
    assert cyclic_galois_certificate(QUINTIC11, 5)
    assert cyclic_galois_certificate(SEPTIC29, 7)


def test_galois_generator_has_order_q():
    for f, q in ((CUBIC7, 3), (QUINTIC11, 5), (SEPTIC29, 7), ([1, -3, 0, 1], 3)):
        g = galois_generator(f, q)
        h = [Fraction(0), Fraction(1)]
        for i in range(q):
            h = compose_rational_mod(h, g, f) if i else list(g)
            assert (h == [0, 1]) == (i == q - 1)


def test_galois_rejects_s3_cubics_with_real_roots():
    # x^3 - 4x + 1 has three real roots but discriminant 229, not a square
    assert not cyclic_galois_certificate([1, -4, 0, 1], 3)


def test_schinzel_bound_on_certified_cyclic():
    golden = mpmath.log((1 + mpmath.sqrt(5)) / 2)
    for f, q in ((CUBIC7, 3), (QUINTIC11, 5), (SEPTIC29, 7), ([1, -3, 0, 1], 3), ([-1, -3, 0, 1], 3)):
        if cyclic_galois_certificate(f, q):
            assert mahler_measure_poly(f)[0] >= q / 2 * golden


def test_splitting_type_examples():
    assert splitting_type_mod_p(CUBIC7, 7) == ("totally-ramified", 5)
    t13 = splitting_type_mod_p(CUBIC7, 13)
    fac = sympy.factor_list(sym(CUBIC7), modulus=13)[1]
    want = ("totally-split",) if len(fac) == 3 else ("irreducible",)
    assert t13 == want
    assert splitting_type_mod_p([-1, 0, 1], 5) == ("totally-split",)
