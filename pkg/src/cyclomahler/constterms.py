"""Constant terms CT[F_k^m], walk counts, Bessel generating functions and the a_j(s) polynomials."""

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb, factorial

from .cyclogeom import LaurentPoly, root_vectors
from .errors import DomainError, ResourceGuardError
from .numtheory import factorize, is_prime

DEFAULT_MAX_TERMS = 10_000_000


@dataclass
class CTSeries:
    k: int
    values: list
    method: str = "sparse"

    @property
    def M(self):
        return len(self.values) - 1


# ------------------------------------------------------------- sparse route


def _sparse_ct(k, M, max_terms):
    """Meet in the middle: CT[F^m] = sum_v F^a(v) F^b(-v) with a + b = m, |a - b| <= 1.

    Only powers up to ceil(M/2) are formed. Exponent vectors are packed into
    single integers (offset mixed radix) so that a step is one addition.
    Every monomial of F^i with i <= M/2 can still return to the origin in the
    remaining M - i >= i steps, so box pruning never discards anything here.
    """
    vecs = root_vectors(k)
    d = len(vecs[0])
    half = (M + 1) // 2
    span = max(abs(x) for v in vecs for x in v) * half
    base = 2 * span + 1
    steps = [sum(x * base**j for j, x in enumerate(v)) for v in vecs]
    zero = sum(span * base**j for j in range(d))
    twice = 2 * zero

    values = [1] + [0] * M
    prev = {zero: 1}
    cur = {zero: 1}
    for i in range(1, half + 1):
        nxt = {}
        get = nxt.get
        for v, c in cur.items():
            for a in steps:
                w = v + a
                nxt[w] = get(w, 0) + c
        # supports grow like i^d; extrapolate to the final step and refuse early
        if len(nxt) > max_terms or (i >= 6 and len(nxt) * (half / i) ** d > 1.5 * max_terms):
            raise ResourceGuardError(
                f"sparse power of F_{k} would exceed {max_terms} monomials (step {i} of {half})"
            )
        prev, cur = cur, nxt
        if 2 * i - 1 <= M:
            pg = prev.get
            values[2 * i - 1] = sum(c * pg(twice - v, 0) for v, c in cur.items())
        if 2 * i <= M:
            cg = cur.get
            values[2 * i] = sum(c * cg(twice - v, 0) for v, c in cur.items())
    return values


# ---------------------------------------------------- exponential generating


def _binomial_conv(a, b, M):
    """EGF product: sequences of m! [t^m] coefficients."""
    out = [0] * (M + 1)
    for m in range(M + 1):
        s = 0
        for i in range(m + 1):
            if a[i] and b[m - i]:
                s += comb(m, i) * a[i] * b[m - i]
        out[m] = s
    return out


def _egf_pow(a, e, M):
    result = [1] + [0] * M
    base = list(a)
    while e:
        if e & 1:
            result = _binomial_conv(result, base, M)
        e >>= 1
        if e:
            base = _binomial_conv(base, base, M)
    return result


def bessel_egf(j, M):
    """m! [t^m] I_j(2t) = C(m, (m-j)/2) for m = j mod 2, m >= j."""
    return [comb(m, (m - j) // 2) if m >= j and (m - j) % 2 == 0 else 0 for m in range(M + 1)]


def _egf_structure(k):
    """Describe how E_k(t) is built from Bessel functions, or None."""
    if k <= 1:
        return None
    fac = factorize(k)
    if k % 2 == 0:
        odd = k // 2
        if odd == 1:
            return ("power2", 1)
        f2 = factorize(odd)
        if len(f2) == 1:
            (q, r), = f2.items()
            if q == 2:
                return ("power2", odd)  # k = 2^r, E = I_0(2t)^(k/2)
            return ("2qr", q, r)
        return None
    if len(fac) == 1 and is_prime(k):
        return ("prime", k)
    return None


def egf_constant_terms(k, M):
    """CT[F_k^m], m <= M, via the Bessel product formula (k = 2^r, 2 q^r or an odd prime)."""
    s = _egf_structure(k)
    if s is None:
        raise DomainError(f"no Bessel product formula for k={k}")
    if s[0] == "power2":
        return _egf_pow(bessel_egf(0, M), s[1], M)
    if s[0] == "prime":
        q = s[1]
        return [factorial(m) // factorial(m // q) ** q if m % q == 0 else 0 for m in range(M + 1)]
    _, q, r = s
    inner = _egf_pow(bessel_egf(0, M), q, M)
    for j in range(1, M + 1):
        term = _egf_pow(bessel_egf(j, M), q, M)
        inner = [x + 2 * y for x, y in zip(inner, term)]
    return _egf_pow(inner, q ** (r - 1), M)


def constant_terms(k, M, method="auto", max_terms=DEFAULT_MAX_TERMS):
    """CT[F_k^m] for m = 0..M as exact integers."""
    if k < 1 or M < 0:
        raise DomainError("need k >= 1 and M >= 0")
    if k == 1:
        # F_1 is the single monomial x_1
        return CTSeries(k, [1] + [0] * M, "trivial")
    if method == "egf":
        return CTSeries(k, egf_constant_terms(k, M), "egf")
    if method not in ("auto", "sparse"):
        raise DomainError(f"unknown method {method!r}")
    try:
        return CTSeries(k, _sparse_ct(k, M, max_terms), "sparse")
    except ResourceGuardError:
        if method == "auto" and _egf_structure(k) is not None:
            return CTSeries(k, egf_constant_terms(k, M), "egf")
        raise


def walk_count_oracle(k, m):
    """Number of step sequences in A_k^m summing to zero, by enumeration."""
    if k ** m > 10**8:
        raise ResourceGuardError("walk enumeration limited to k^m <= 10^8")
    if m == 0:
        return 1
    vecs = root_vectors(k)

    def sums(length):
        return Counter(tuple(map(sum, zip(*seq))) for seq in product(vecs, repeat=length))

    if k**m <= 10**5:
        return sums(m)[(0,) * len(vecs[0])]
    left = sums((m + 1) // 2)
    right = sums(m // 2)
    return sum(c * right.get(tuple(-x for x in v), 0) for v, c in left.items())


# ---------------------------------------------------------------- identities


def bessel_egf_check(k, M):
    """(equal, max deviation) comparing CT[F_k^m]/m! with the Bessel product series for k = 2 q^r."""
    s = _egf_structure(k)
    if s is None or s[0] != "2qr":
        raise DomainError("k must be 2 q^r with q an odd prime")
    ct = _sparse_ct(k, M, DEFAULT_MAX_TERMS)
    _, q, r = s
    # the Bessel side as exact Taylor coefficients
    series = _taylor_2qr(q, r, M)
    dev = max(abs(Fraction(c, factorial(m)) - series[m]) for m, c in enumerate(ct))
    return dev == 0, dev


def _taylor_mul(a, b, M):
    out = [Fraction(0)] * (M + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(M + 1 - i):
                if b[j]:
                    out[i + j] += x * b[j]
    return out


def _taylor_pow(a, e, M):
    result = [Fraction(1)] + [Fraction(0)] * M
    for _ in range(e):
        result = _taylor_mul(result, a, M)
    return result


def bessel_taylor(j, M):
    """Taylor coefficients of I_j(2t) = sum_m t^(2m+j) / (m! (m+j)!)."""
    out = [Fraction(0)] * (M + 1)
    m = 0
    while 2 * m + j <= M:
        out[2 * m + j] = Fraction(1, factorial(m) * factorial(m + j))
        m += 1
    return out


def _taylor_2qr(q, r, M):
    inner = _taylor_pow(bessel_taylor(0, M), q, M)
    for j in range(1, M + 1):
        t = _taylor_pow(bessel_taylor(j, M), q, M)
        inner = [x + 2 * y for x, y in zip(inner, t)]
    return _taylor_pow(inner, q ** (r - 1), M)


def _laurent_pow(P, n):
    out = LaurentPoly({(0,) * P.nvars: 1}, P.nvars)
    for _ in range(n):
        out = out * P
    return out


def sym_walk_poly(d):
    """S_d = sum_i (x_i + 1/x_i)."""
    terms = {}
    for i in range(d):
        e = [0] * d
        e[i] = 1
        terms[tuple(e)] = 1
        e[i] = -1
        terms[tuple(e)] = 1
    return LaurentPoly(terms, d)


def linear_poly(d):
    """L_d = x_1 + ... + x_d."""
    return LaurentPoly({tuple(int(i == j) for j in range(d)): 1 for i in range(d)}, d)


def sd_bessel_check(d, M):
    """(equal, max deviation) for CT[S_d^m]/m! against the Taylor series of I_0(2t)^d."""
    S = sym_walk_poly(d)
    series = _taylor_pow(bessel_taylor(0, M), d, M)
    P = LaurentPoly({(0,) * d: 1}, d)
    dev = Fraction(0)
    for m in range(M + 1):
        dev = max(dev, abs(Fraction(P.constant_term(), factorial(m)) - series[m]))
        P = P * S
    return dev == 0, dev


def zeta_even_moment_check(d, n):
    """CT[S_d^(2n)] == C(2n, n) CT[(L_d L~_d)^n], exactly."""
    if not (1 <= d <= 5 and 0 <= n <= 8):
        raise DomainError("need 1 <= d <= 5 and 0 <= n <= 8")
    lhs = _laurent_pow(sym_walk_poly(d), 2 * n).constant_term()
    L = linear_poly(d)
    rhs = comb(2 * n, n) * _laurent_pow(L * L.inverted(), n).constant_term()
    return lhs == rhs


# ------------------------------------------------------- asymptotic series


def log_bessel_taylor(L):
    """Coefficients c_i of log I_0(2iy) = sum_i c_i y^(2i), i = 0..L (series in y^2)."""
    # I_0(2iy) = J_0(2y) = sum_m (-1)^m y^(2m) / (m!)^2
    f = [Fraction((-1) ** m, factorial(m) ** 2) for m in range(L + 1)]
    # log f via f' / f: with z = y^2, z g' = z f' / f
    g = [Fraction(0)] * (L + 1)
    for i in range(1, L + 1):
        # i g_i = i f_i - sum_{j=1}^{i-1} j g_j f_{i-j}
        acc = i * f[i] - sum(j * g[j] * f[i - j] for j in range(1, i))
        g[i] = acc / i
    return g


def _poly_add(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def asymptotic_aj(j_max):
    """Polynomials a_0..a_{j_max} in s (low to high, Fractions) with I_0(2is/sqrt v)^v ~ e^{-s^2} sum a_j(s) v^{-j}."""
    if not 0 <= j_max <= 12:
        raise DomainError("j_max must lie in 0..12")
    c = log_bessel_taylor(j_max + 2)
    # v (log I_0 + y^2) at y = s/sqrt(v): sum_{i>=2} c_i s^(2i) u^(i-1), u = 1/v
    g = [[]] + [[Fraction(0)] * (2 * (i + 1)) + [c[i + 1]] for i in range(1, j_max + 1)]
    # exp of a series in u with polynomial coefficients; E' = g' E
    E = [[Fraction(1)]] + [[] for _ in range(j_max)]
    for n in range(1, j_max + 1):
        acc = []
        for i in range(1, n + 1):
            acc = _poly_add(acc, [i * x for x in _poly_mul(g[i], E[n - i])])
        E[n] = [x / n for x in acc]
    out = []
    for p in E:
        while p and p[-1] == 0:
            p = p[:-1]
        out.append(p)
    return out
