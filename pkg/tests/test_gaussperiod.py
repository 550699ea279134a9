import random
from fractions import Fraction

import mpmath
import pytest

from cyclomahler.errors import DomainError
from cyclomahler.gaussperiod import (
    gauss_period,
    lot_residual,
    mahler_alpha,
    minimal_polynomial_gauss,
    sample_points,
    wasserstein_bound,
    weyl_sum,
    weyl_sum_direct,
)
from cyclomahler.numtheory import enumerate_Nk, multiplicative_order, smallest_k
from cyclomahler.polyalg import mahler_measure_poly


@pytest.fixture(autouse=True)
def _compare_at_high_precision():
    with mpmath.workdps(50):
        yield


def zeta(a, p):
    return mpmath.expjpi(2 * mpmath.mpf(a) / p)


def test_period_n3_is_twice_cosines():
    got = sorted(mpmath.re(c) for c in gauss_period(3).conjugates)
    want = sorted(2 * mpmath.cos(2 * mpmath.pi * j / 7) for j in (1, 2, 3))
    assert all(abs(a - b) < 1e-35 for a, b in zip(got, want))


def test_alpha7_direct_sum():
    d = gauss_period(7)
    assert (d.p, d.k, d.nu) == (29, 4, 12)
    direct = sum(zeta(a, 29) for a in (1, 12, 17, 28))
    assert abs(mpmath.im(direct)) < 1e-40
    assert min(abs(c - direct) for c in d.conjugates) < 1e-35
    assert abs(mpmath.re(direct) - mpmath.mpf("0.2395267590")) < 1e-10


def test_period_structure():
    for n in range(1, 51):
        d = gauss_period(n)
        assert multiplicative_order(d.nu, d.p) == d.k
        assert abs(mpmath.fsum(d.conjugates) + 1) < 1e-30
        assert all(abs(c) <= d.k + mpmath.mpf(10) ** -30 for c in d.conjugates)


@pytest.mark.parametrize("n,poly", [
    (3, [-1, -2, 1, 1]),
    (5, [1, 3, -3, -4, 1, 1]),
    (7, [1, -9, 14, 28, -7, -12, 1, 1]),
])
def test_minimal_polynomials(n, poly):
    assert minimal_polynomial_gauss(n) == poly


def test_minimal_polynomial_rejects_roots_of_unity():
    with pytest.raises(DomainError):
        minimal_polynomial_gauss(4)


def test_mahler_alpha_examples():
    assert mahler_alpha(4)[0] == 0
    assert abs(mpmath.exp(mahler_alpha(7)[0]) - mpmath.mpf("24.21657")) < 1e-5
    assert abs(mpmath.exp(mahler_alpha(3)[0]) - mpmath.mpf("2.2469796037")) < 1e-10


def test_mahler_alpha_bounds_and_polynomial_route():
    for n in range(2, 41):
        k = smallest_k(n).k
        m, _ = mahler_alpha(n)
        assert m <= n * mpmath.log(k) + mpmath.mpf(10) ** -30
        if k >= 2:
            mp, _ = mahler_measure_poly(minimal_polynomial_gauss(n))
            assert abs(m - mp) < mpmath.mpf(2) ** -32


def test_sample_points():
    pts = sample_points(3)
    assert (pts.p, pts.d) == (7, 1)
    assert [x for (x,) in pts.points] == [Fraction(a, 7) for a in (3, 2, 6, 4, 5, 1)]
    pts = sample_points(7)
    assert len(pts.points) == 28
    assert [x for x, _ in pts.points] == [Fraction(pow(2, j, 29), 29) for j in range(1, 29)]
    for n in (5, 7, 13, 24):
        pts = sample_points(n)
        assert len(pts.points) == pts.p - 1
        assert all(x.denominator == pts.p for pt in pts.points for x in pt if x)


@pytest.mark.parametrize("n,h,want", [(7, (1, 0), -1), (7, (-12, 1), 28), (3, (1,), -1)])
def test_weyl_sum_examples(n, h, want):
    assert weyl_sum(n, h) == want


def test_weyl_sum_against_direct():
    rng = random.Random(11)
    for _ in range(50):
        n = rng.choice([3, 5, 7, 8, 9, 13, 24, 25, 27])
        d = sample_points(n).d
        h = [0] * d
        while not any(h):
            h = [rng.randint(-15, 15) for _ in range(d)]
        assert abs(weyl_sum_direct(n, h) - weyl_sum(n, h)) < 1e-10


def test_wasserstein_examples():
    assert abs(wasserstein_bound(5) - mpmath.mpf("3.905046704")) < 1e-8
    assert abs(wasserstein_bound(7) - mpmath.mpf("25.82630734")) < 1e-7
    assert all(wasserstein_bound(n) > 0 for n in range(1, 200))


def test_lot_residual():
    m2 = mpmath.mpf("0.3230659472")
    limit = (m2 - mpmath.log(2)) / 2
    assert abs(limit - mpmath.mpf("-0.1850406167")) < 1e-9
    r3 = lot_residual(3, m2)
    assert abs(r3 - limit) < 0.1
    tail = enumerate_Nk(2, 2000)[-10:]
    assert all(abs(lot_residual(n, m2) - limit) < 1e-2 for n in tail)
    with pytest.raises(DomainError):
        lot_residual(7, m2)
