"""Elementary number theory: primality, k(n), the sets N_k, primitive roots,
cyclotomic polynomials and a CRT construction of members of N_k."""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, log

from .errors import DomainError, ResourceGuardError

# Deterministic Miller-Rabin: these witnesses are exact for n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_prime(n):
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_sieve(limit):
    """Boolean table is_p[0..limit]."""
    is_p = bytearray([1]) * (limit + 1)
    is_p[0:2] = b"\x00\x00"[: min(2, limit + 1)]
    for i in range(2, int(limit**0.5) + 1):
        if is_p[i]:
            is_p[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return is_p


def primes_up_to(limit):
    if limit < 2:
        return []
    t = prime_sieve(limit)
    return [i for i in range(2, limit + 1) if t[i]]


def factorize(n):
    """Prime factorization as {p: e} by trial division (inputs are small)."""
    if n < 1:
        raise DomainError("factorize needs n >= 1")
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(n):
    r = n
    for p in factorize(n):
        r = r // p * (p - 1)
    return r


def divisors(n):
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


@dataclass(frozen=True)
class KnRecord:
    n: int
    k: int
    p: int


def smallest_k(n, cap=10**6):
    if n < 1:
        raise DomainError("n must be positive")
    for k in range(1, cap + 1):
        if is_prime(k * n + 1):
            return KnRecord(n, k, k * n + 1)
    raise ResourceGuardError(f"no prime k*n+1 with k <= {cap} for n={n}")


def k_table(X):
    """k(n) for all 1 <= n <= X, via a prime sieve sized on the fly."""
    ks = [0] * (X + 1)
    limit = 64 * X + 2
    sieve = prime_sieve(limit)
    for n in range(1, X + 1):
        k = 1
        while True:
            v = k * n + 1
            if v > limit:
                ks[n] = smallest_k(n).k
                break
            if sieve[v]:
                ks[n] = k
                break
            k += 1
    return ks


def enumerate_Nk(k, X):
    if k < 1 or X < 1:
        raise DomainError("k and X must be positive")
    ks = k_table(X)
    return [n for n in range(1, X + 1) if ks[n] == k]


def count_Nk_vs_asymptotic(k, X):
    if X < 100:
        raise DomainError("X must be at least 100")
    count = len(enumerate_Nk(k, X))
    return count, k * X / (euler_phi(k) * log(X))


def construct_member_Nk(k, primes, cap=10**7):
    """Least n with k(n) = k in the progression forcing jn+1 composite.

    For j = 1..k-1 the prime primes[j-1] is made to divide jn+1, i.e.
    n = -1/j mod p_j, and the search walks that residue class mod prod p_j.
    """
    primes = list(primes)
    if len(primes) != k - 1:
        raise DomainError("need exactly k-1 primes")
    prev = k
    for p in primes:
        if not is_prime(p) or p <= prev:
            raise DomainError("primes must satisfy k < p_1 < ... < p_{k-1}")
        prev = p
    r, mod = 0, 1
    for j, p in enumerate(primes, start=1):
        target = (-pow(j, -1, p)) % p
        # CRT step: r' = r mod `mod`, r' = target mod p
        t = ((target - r) * pow(mod, -1, p)) % p
        r, mod = r + mod * t, mod * p
    n = r if r > 0 else mod
    while n <= cap:
        if smallest_k(n).k == k:
            return n
        n += mod
    raise ResourceGuardError(f"no member of N_{k} found below {cap}")


def primitive_root(p):
    if p < 3 or not is_prime(p):
        raise DomainError(f"{p} is not an odd prime")
    qs = list(factorize(p - 1))
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise AssertionError("unreachable")


def multiplicative_order(a, p):
    if gcd(a, p) != 1:
        raise DomainError("a must be a unit")
    m = p - 1
    for q, e in factorize(m).items():
        for _ in range(e):
            if pow(a, m // q, p) == 1:
                m //= q
            else:
                break
    return m


def _poly_divexact(num, den):
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1] // den[-1]
        out[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact division")
    return out


@lru_cache(maxsize=512)
def _cyclotomic(k):
    num = [-1] + [0] * (k - 1) + [1]
    for d in divisors(k)[:-1]:
        num = _poly_divexact(num, _cyclotomic(d))
    return tuple(num)


def cyclotomic_poly(k):
    """Coefficients (low to high) of Phi_k, by dividing t^k - 1 by Phi_d, d | k, d < k."""
    if k < 1:
        raise DomainError("k must be positive")
    return list(_cyclotomic(k))
