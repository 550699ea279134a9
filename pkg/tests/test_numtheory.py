import sympy
from hypothesis import given
from hypothesis import strategies as st
import pytest

from cyclomahler.errors import DomainError
from cyclomahler.numtheory import (
    construct_member_Nk,
    count_Nk_vs_asymptotic,
    cyclotomic_poly,
    divisors,
    enumerate_Nk,
    euler_phi,
    factorize,
    is_prime,
    multiplicative_order,
    primitive_root,
    smallest_k,
)
from cyclomahler.polyalg import pdivmod, pmul


@pytest.mark.parametrize("n,k,p", [(7, 4, 29), (1, 1, 2), (24, 3, 73)])
def test_smallest_k_table_values(n, k, p):
    rec = smallest_k(n)
    assert (rec.k, rec.p) == (k, p)


def test_smallest_k_rejects_zero():
    with pytest.raises(DomainError):
        smallest_k(0)


def test_smallest_k_against_sympy():
    for n in range(1, 10_001):
        rec = smallest_k(n)
        assert sympy.isprime(rec.p) and rec.p == rec.k * n + 1
        assert not any(sympy.isprime(j * n + 1) for j in range(1, rec.k))


@given(st.integers(min_value=0, max_value=10**18))
def test_is_prime_matches_sympy(n):
    assert is_prime(n) == sympy.isprime(n)


def test_is_prime_carmichael_and_large():
    for n in (561, 1105, 1729, 2465, 3215031751, 3825123056546413051):
        assert not is_prime(n)
    assert is_prime(2**61 - 1) and is_prime(10**18 + 9)


@pytest.mark.parametrize("k,X,want", [(1, 10, [1, 2, 4, 6, 10]), (4, 40, [7, 13, 25, 27, 37]), (2, 6, [3, 5])])
def test_enumerate_nk_examples(k, X, want):
    assert enumerate_Nk(k, X) == want


def test_enumerate_nk_partitions():
    X = 3000
    seen = []
    for k in range(1, 200):
        seen += enumerate_Nk(k, X)
    assert sorted(seen) == list(range(1, X + 1))


def test_count_vs_asymptotic():
    count, main = count_Nk_vs_asymptotic(1, 100)
    assert count == sympy.primepi(101) and abs(main - 21.71) < 0.01
    count, main = count_Nk_vs_asymptotic(2, 10**5)
    assert 0.8 <= count / main <= 1.3
    count, main = count_Nk_vs_asymptotic(1, 10**6)
    assert abs(count / main - 1) < 0.15
    with pytest.raises(DomainError):
        count_Nk_vs_asymptotic(1, 99)


def test_construct_member():
    assert construct_member_Nk(2, [3]) == 5
    assert construct_member_Nk(1, []) == 1
    n = construct_member_Nk(3, [5, 7])
    assert smallest_k(n).k == 3 and n % 5 == 4 and n % 7 == 3
    # least in its residue class
    assert all(smallest_k(m).k != 3 for m in range(n % 35 or 35, n, 35))
    with pytest.raises(DomainError):
        construct_member_Nk(3, [7, 5])


@pytest.mark.parametrize("p,g", [(7, 3), (29, 2), (11, 2)])
def test_primitive_root_examples(p, g):
    assert primitive_root(p) == g


def test_primitive_root_is_smallest_generator():
    for p in sympy.primerange(3, 3000):
        g = primitive_root(p)
        assert g == sympy.primitive_root(p)
        assert multiplicative_order(g, p) == p - 1


def test_cyclotomic_examples():
    assert cyclotomic_poly(1) == [-1, 1]
    assert cyclotomic_poly(6) == [1, -1, 1]


def test_cyclotomic_against_sympy_and_product():
    t = sympy.Symbol("t")
    for k in range(1, 201):
        phi = cyclotomic_poly(k)
        assert phi == [int(c) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(k, t), t).all_coeffs())]
        assert len(phi) - 1 == euler_phi(k)
        prod = [1]
        for d in divisors(k):
            prod = pmul(prod, cyclotomic_poly(d))
        assert prod == [-1] + [0] * (k - 1) + [1]
        _, r = pdivmod([-1] + [0] * (k - 1) + [1], phi)
        assert not any(r)


def test_cyclotomic_2q_power_form():
    # Phi_{2 q^r}(t) = Phi_q(-t^(q^(r-1)))
    for q, r in ((3, 1), (3, 2), (5, 2), (7, 1), (3, 3)):
        m = q ** (r - 1)
        want = [0] * ((q - 1) * m + 1)
        for i, c in enumerate(cyclotomic_poly(q)):
            want[i * m] = c * (-1) ** i
        assert cyclotomic_poly(2 * q**r) == want


@given(st.integers(min_value=1, max_value=10**9))
def test_factorize_matches_sympy(n):
    assert factorize(n) == sympy.factorint(n)
