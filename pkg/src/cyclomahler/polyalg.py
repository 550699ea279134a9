"""Univariate polynomial algebra over Z, Q and F_p.

Polynomials are plain lists of coefficients, lowest degree first; the zero
polynomial is the empty list. Roots are computed with mpmath at an explicit
per-call precision and carry inclusion radii.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd, isqrt

import mpmath
import numpy

from .errors import DomainError, PrecisionError, ResourceGuardError
from .numtheory import primes_up_to

# ---------------------------------------------------------------- basics


def normalize(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def degree(f):
    return len(normalize(f)) - 1


def padd(f, g):
    n = max(len(f), len(g))
    return normalize([(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)])


def psub(f, g):
    return padd(f, [-c for c in g])


def pscale(f, c):
    return normalize([c * a for a in f])


def pmul(f, g):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return normalize(out)


def peval(f, x):
    acc = 0
    for c in reversed(f):
        acc = acc * x + c
    return acc


def pderiv(f):
    return normalize([i * f[i] for i in range(1, len(f))])


def pdivmod(f, g):
    """Division with remainder over a field (Fractions or exact ints)."""
    f, g = normalize(f), normalize(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(c) for c in f]
    q = [Fraction(0)] * max(len(f) - len(g) + 1, 0)
    lc = Fraction(g[-1])
    for i in range(len(f) - len(g), -1, -1):
        c = r[i + len(g) - 1] / lc
        q[i] = c
        if c:
            for j, b in enumerate(g):
                r[i + j] -= c * b
    return normalize(q), normalize(r[: len(g) - 1])


def pdiv_exact_int(f, g):
    """Exact quotient f/g over Z, or None when g does not divide f."""
    q, r = pdivmod(f, g)
    if r or any(c.denominator != 1 for c in q):
        return None
    return [int(c) for c in q]


def pmod_monic(f, m):
    """f mod m over Z for monic m (no fractions needed)."""
    f = normalize(f)
    d = len(m) - 1
    f = list(f)
    for i in range(len(f) - 1, d - 1, -1):
        c = f[i]
        if c:
            for j in range(d + 1):
                f[i - d + j] -= c * m[j]
    return normalize(f[:d])


def content(f):
    g = 0
    for c in f:
        g = gcd(g, int(c))
    return g


def primitive_part(f):
    f = normalize(f)
    if not f:
        return []
    c = content(f)
    if f[-1] < 0:
        c = -c
    return [a // c for a in f]


def pgcd_q(f, g):
    """Monic gcd over Q (as Fractions), via the primitive remainder sequence."""
    a, b = to_int_primitive(f), to_int_primitive(g)
    while b:
        r = _prem(a, b)
        a, b = b, to_int_primitive(r) if r else []
    if not a:
        return []
    lc = Fraction(a[-1])
    return [Fraction(c) / lc for c in a]


def to_int_primitive(f):
    """Clear denominators of a rational polynomial and take the primitive part."""
    f = [Fraction(c) for c in normalize(f)]
    if not f:
        return []
    den = 1
    for c in f:
        den = den * c.denominator // gcd(den, c.denominator)
    return primitive_part([int(c * den) for c in f])


def squarefree_decomposition(f):
    """Yun's algorithm over Q: list of (g_i, i) with f = c * prod g_i^i, g_i primitive."""
    f = primitive_part(f)
    if len(f) <= 1:
        return []
    if _squarefree_mod_small_prime(f):
        return [(f, 1)]
    out = []
    df = pderiv(f)
    a = pgcd_q(f, df)
    b, _ = pdivmod(f, a)
    c, _ = pdivmod(df, a)
    d = psub(c, pderiv(b))
    i = 1
    while degree(b) > 0:
        a = pgcd_q(b, d)
        b, _ = pdivmod(b, a)
        c, _ = pdivmod(d, a)
        d = psub(c, pderiv(b))
        if degree(a) > 0:
            out.append((to_int_primitive(a), i))
        i += 1
    return out


def _squarefree_mod_small_prime(f, tries=8):
    """True if gcd(f, f') = 1 modulo some prime not dividing the leading coefficient."""
    n = len(f) - 1
    for p in primes_up_to(400):
        if p <= n or f[-1] % p == 0:
            continue
        if len(pgcd_p(f, pderiv(f), p)) == 1:
            return True
        tries -= 1
        if tries == 0:
            break
    return False


def squarefree_part(f):
    out = [1]
    for g, _ in squarefree_decomposition(f):
        out = pmul(out, g)
    return out


def reverse(f):
    """x^deg f(1/x)."""
    return normalize(list(reversed(normalize(f))))


# ----------------------------------------------------------- resultants


def resultant(f, g):
    """Res(f, g) by the subresultant pseudo-remainder sequence."""
    a, b = normalize(f), normalize(g)
    if not a or not b:
        return 0
    if len(a) == 1 and len(b) == 1:
        return 1
    if len(a) == 1:
        return a[0] ** (len(b) - 1)
    if len(b) == 1:
        return b[0] ** (len(a) - 1)
    sign = 1
    if len(a) < len(b):
        a, b = b, a
        if (len(a) - 1) * (len(b) - 1) % 2:
            sign = -1
    ca, cb = content(a), content(b)
    a = [x // ca for x in a]
    b = [x // cb for x in b]
    t = ca ** (len(b) - 1) * cb ** (len(a) - 1)
    g = h = 1
    while True:
        da, db = len(a) - 1, len(b) - 1
        delta = da - db
        if da % 2 and db % 2:
            sign = -sign
        r = _prem(a, b)
        if not r:
            return 0
        a = b
        b = [x // (g * h**delta) for x in r]
        g = a[-1]
        h = g**delta // h ** (delta - 1) if delta >= 1 else h ** (1 - delta) * g**delta
        if len(b) == 1:
            db = len(a) - 1
            h = b[0] ** db // h ** (db - 1) if db >= 1 else b[0]
            return sign * t * h


def _prem(a, b):
    """Pseudo-remainder lc(b)^(da-db+1) a mod b over Z."""
    r = list(a)
    db = len(b) - 1
    lc = b[-1]
    e = len(a) - len(b) + 1
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i]
        r = [lc * x for x in r]
        if c:
            for j in range(db + 1):
                r[i - db + j] -= c * b[j]
        e -= 1
        r.pop()
    if e > 0:
        r = [x * lc**e for x in r]
    return normalize(r)


def discriminant(f):
    f = normalize(f)
    n = len(f) - 1
    if n < 1:
        raise DomainError("discriminant needs degree >= 1")
    if n == 1:
        return 1
    res = resultant(f, pderiv(f))
    s = -1 if (n * (n - 1) // 2) % 2 else 1
    q, r = divmod(s * res, f[-1])
    assert r == 0
    return q


def is_square(n):
    return n >= 0 and isqrt(n) ** 2 == n


# ----------------------------------------------------------------- Sturm


def _sign(x):
    return (x > 0) - (x < 0)


def sturm_sequence(f):
    f = primitive_part(f)
    seq = [f, primitive_part(pderiv(f))]
    while len(seq[-1]) > 1:
        a, b = seq[-2], seq[-1]
        r = _prem(a, b)
        e = len(a) - len(b) + 1
        # prem scales by lc(b)^e; undo the sign of that factor, then negate
        s = -1 if (b[-1] < 0 and e % 2) else 1
        r = [-s * x for x in r]
        if not r:
            break
        c = content(r)
        seq.append([x // c for x in r])
    return seq


def _variations(signs):
    signs = [s for s in signs if s]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def count_real_roots(f, lo=None, hi=None):
    """Number of distinct real roots in (lo, hi]; None means infinite."""
    seq = sturm_sequence(f)

    def at(x, side):
        if x is None:
            return [_sign(p[-1]) * (side ** (len(p) - 1)) for p in seq]
        return [_sign(peval(p, x)) for p in seq]

    return _variations(at(lo, -1)) - _variations(at(hi, 1))


def real_rooted(f):
    g = squarefree_part(f)
    return count_real_roots(g) == len(g) - 1


# ----------------------------------------------------------------- roots


@dataclass
class RootSet:
    roots: list
    radii: list
    multiplicities: list = field(default_factory=list)
    prec: int = 53

    def __len__(self):
        return sum(self.multiplicities)


def _cauchy_bound(f):
    lc = abs(f[-1])
    return 1 + max(abs(c) for c in f[:-1]) / lc


def _double_start(f):
    """Double-precision companion-matrix roots as a starting guess, when they are distinct."""
    if max(abs(c) for c in f).bit_length() > 900:
        return None
    z = numpy.roots([float(c) for c in reversed(f)])
    if len(z) != len(f) - 1 or not numpy.all(numpy.isfinite(z)):
        return None
    # perturb coincident guesses apart; Aberth needs distinct starting points
    out = []
    for i, w in enumerate(z):
        w = complex(w)
        if any(abs(w - v) < 1e-12 * max(1, abs(w)) for v in out):
            w += 1e-6 * (i + 1) * (1 + 1j)
        out.append(mpmath.mpc(w.real, w.imag))
    return out


def _aberth(f, prec, maxiter=500):
    ctx = mpmath.mp
    n = len(f) - 1
    cf = [ctx.mpf(c) for c in f]
    dcf = [ctx.mpf(i * f[i]) for i in range(1, len(f))]
    z = _double_start(f)
    if z is None:
        R = ctx.mpf(_cauchy_bound(f))
        z = [R * ctx.expjpi(ctx.mpf(2 * j) / n + ctx.mpf(1) / (2 * n)) * ctx.mpf(0.9) for j in range(n)]
    tol = ctx.mpf(2) ** (-prec + 10)
    # cubic convergence: once steps are below 2^(-prec/3), two more sweeps reach full precision
    near = ctx.mpf(2) ** (-prec // 3)
    extra = None

    def ev(c, x):
        acc = ctx.mpc(0)
        for a in reversed(c):
            acc = acc * x + a
        return acc

    for _ in range(maxiter):
        moved = 0
        for i in range(n):
            p = ev(cf, z[i])
            dp = ev(dcf, z[i])
            if p == 0:
                continue
            ratio = p / dp
            s = ctx.fsum(1 / (z[i] - z[j]) for j in range(n) if j != i)
            w = ratio / (1 - ratio * s)
            z[i] -= w
            moved = max(moved, abs(w) / max(abs(z[i]), 1))
        if moved < tol:
            break
        if extra is None and moved < near:
            extra = 2
        elif extra is not None:
            extra -= 1
            if extra == 0:
                break
    return z


def _inclusion_radii(f, z):
    """Radii n|W_i| of the Weierstrass inclusion disks around approximations z_i."""
    ctx = mpmath.mp
    n = len(f) - 1
    radii = []
    for i in range(n):
        p = ctx.mpc(0)
        for a in reversed(f):
            p = p * z[i] + a
        den = ctx.mpf(f[-1])
        for j in range(n):
            if j != i:
                den *= z[i] - z[j]
        radii.append(n * abs(p / den) if den != 0 else ctx.inf)
    return radii


def _disjoint(z, radii):
    for i in range(len(z)):
        for j in range(i):
            if abs(z[i] - z[j]) <= radii[i] + radii[j]:
                return False
    return True


def complex_roots(f, precision=128):
    """All complex roots of f with inclusion radii <= 2^(8 - precision).

    Works on the squarefree factors of f, so repeated roots are reported once
    with their multiplicity.
    """
    f = normalize(f)
    if len(f) < 2:
        if not f:
            raise DomainError("zero polynomial has no root set")
        return RootSet([], [], [], precision)
    target = mpmath.mpf(2) ** (8 - precision)
    roots, radii, mults = [], [], []
    for g, m in squarefree_decomposition(f):
        if len(g) == 2:
            r = Fraction(-g[0], g[1])
            with mpmath.workprec(precision):
                roots.append(mpmath.mpc(mpmath.mpf(r.numerator) / r.denominator))
            radii.append(mpmath.mpf(0))
            mults.append(m)
            continue
        size_bits = max(abs(c) for c in g).bit_length()
        work = precision + 2 * size_bits + 32
        for _ in range(4):
            with mpmath.workprec(work):
                z = _aberth(g, work)
                rad = _inclusion_radii(g, z)
                ok = _disjoint(z, rad) and max(rad) <= target
                if ok:
                    # real roots of real polynomials: drop spurious imaginary noise
                    fixed = []
                    for i, (w, r) in enumerate(zip(z, rad)):
                        if abs(w.imag) <= r:
                            rad[i] = r + abs(w.imag)
                            w = mpmath.mpc(w.real, 0)
                        fixed.append(w)
                    z = fixed
                    roots.extend(z)
                    radii.extend(rad)
                    mults.extend([m] * len(z))
                    break
            work *= 2
        else:
            raise PrecisionError("root inclusion radii did not reach the requested precision")
    return RootSet(roots, radii, mults, precision)


def mahler_measure_poly(f, precision=128):
    """(m(f), error bound): sum of log+|root| plus log|leading coefficient|."""
    f = normalize(f)
    rs = complex_roots(f, precision)
    with mpmath.workprec(precision + 32):
        val = mpmath.log(abs(mpmath.mpf(f[-1])))
        err = mpmath.mpf(0)
        for z, r, m in zip(rs.roots, rs.radii, rs.multiplicities):
            a = abs(z)
            if a + r > 1:
                val += m * mpmath.log(max(a, 1))
                lo = max(a - r, mpmath.mpf(2) ** -precision)
                err += m * max(mpmath.log(max(a + r, 1)) - mpmath.log(max(a, 1)),
                               mpmath.log(max(a, 1)) - mpmath.log(max(lo, 1)))
        err += mpmath.mpf(2) ** (-precision)
        return +val, err


def exp_mahler_measure_poly(f, precision=128):
    m, err = mahler_measure_poly(f, precision)
    with mpmath.workprec(precision + 32):
        return mpmath.exp(m), mpmath.exp(m) * (mpmath.exp(err) - 1)


# ----------------------------------------------------------- arithmetic mod p


def pmod_p(f, p):
    return normalize([c % p for c in f])


def pmul_p(f, g, p):
    return pmod_p(pmul(f, g), p)


def prem_p(f, g, p):
    """Remainder of f mod g over F_p."""
    f = pmod_p(f, p)
    g = pmod_p(g, p)
    if not g:
        raise ZeroDivisionError
    inv = pow(g[-1], -1, p)
    dg = len(g) - 1
    f = list(f)
    for i in range(len(f) - 1, dg - 1, -1):
        c = f[i] * inv % p
        if c:
            for j in range(dg + 1):
                f[i - dg + j] = (f[i - dg + j] - c * g[j]) % p
    return normalize(f[:dg])


def pdivmod_p(f, g, p):
    f = pmod_p(f, p)
    g = pmod_p(g, p)
    inv = pow(g[-1], -1, p)
    dg = len(g) - 1
    q = [0] * max(len(f) - dg, 0)
    f = list(f)
    for i in range(len(f) - 1, dg - 1, -1):
        c = f[i] * inv % p
        q[i - dg] = c
        if c:
            for j in range(dg + 1):
                f[i - dg + j] = (f[i - dg + j] - c * g[j]) % p
    return normalize(q), normalize(f[:dg])


def pgcd_p(f, g, p):
    a, b = pmod_p(f, p), pmod_p(g, p)
    while b:
        a, b = b, prem_p(a, b, p)
    if not a:
        return []
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def ppow_mod_p(base, e, m, p):
    result = [1]
    base = prem_p(base, m, p)
    while e:
        if e & 1:
            result = prem_p(pmul(result, base), m, p)
        base = prem_p(pmul(base, base), m, p)
        e >>= 1
    return result


def distinct_degree_degrees(f, p):
    """Degrees of the irreducible factors of squarefree monic f over F_p, with repetition."""
    f = pmod_p(f, p)
    out = []
    h = [0, 1]
    i = 0
    rest = f
    while len(rest) - 1 >= 2 * (i + 1):
        i += 1
        h = ppow_mod_p(h, p, rest, p)
        g = pgcd_p(rest, psub(h, [0, 1]), p)
        if len(g) > 1:
            out.extend([i] * ((len(g) - 1) // i))
            rest, _ = pdivmod_p(rest, g, p)
            h = prem_p(h, rest, p) if len(rest) > 1 else [0]
    if len(rest) > 1:
        out.append(len(rest) - 1)
    return sorted(out)


def is_irreducible_mod_p(f, p):
    f = pmod_p(f, p)
    if len(f) < 2:
        return False
    if len(pgcd_p(f, pderiv(f), p)) > 1:
        return False
    return distinct_degree_degrees(f, p) == [len(f) - 1]


def roots_mod_p(f, p):
    """Distinct roots of f in F_p, by brute force for small p and splitting otherwise."""
    f = pmod_p(f, p)
    if p <= 2000:
        return [a for a in range(p) if peval(f, a) % p == 0]
    g = pgcd_p(f, psub(ppow_mod_p([0, 1], p, f, p), [0, 1]), p)
    return sorted(_split_linear(g, p))


def _split_linear(g, p, seed=1):
    """Cantor-Zassenhaus equal-degree splitting of a product of distinct linear factors."""
    if len(g) <= 1:
        return []
    if len(g) == 2:
        return [(-g[0] * pow(g[1], -1, p)) % p]
    a = seed
    while True:
        h = ppow_mod_p([a, 1], (p - 1) // 2, g, p)
        d = pgcd_p(g, psub(h, [1]), p)
        if 1 < len(d) < len(g):
            q, _ = pdivmod_p(g, d, p)
            return _split_linear(d, p, a + 1) + _split_linear(q, p, a + 1)
        a += 1


def splitting_type_mod_p(f, p):
    """Classify f mod p for monic f.

    Returns one of ("irreducible",), ("totally-split",), ("totally-ramified", a)
    meaning f = (x + a)^n mod p, ("repeated-split",) for a product of linear
    factors with repeats, or ("other", degrees) for any remaining pattern.
    """
    f = normalize(f)
    n = len(f) - 1
    if f[-1] != 1:
        raise DomainError("splitting type needs a monic polynomial")
    fp = pmod_p(f, p)
    a = fp[n - 1] * pow(n, -1, p) % p if n % p else None
    if a is not None and fp == pmod_p(_binomial_power(a, n), p):
        return ("totally-ramified", a)
    if a is None:
        for c in range(p):
            if fp == pmod_p(_binomial_power(c, n), p):
                return ("totally-ramified", c)
    sqfree = len(pgcd_p(fp, pderiv(fp), p)) <= 1
    if sqfree:
        degs = distinct_degree_degrees(fp, p)
        if degs == [n]:
            return ("irreducible",)
        if degs == [1] * n:
            return ("totally-split",)
        return ("other", tuple(degs))
    total = 0
    rest = fp
    for r in roots_mod_p(fp, p):
        while True:
            q, rem = pdivmod_p(rest, [(-r) % p, 1], p)
            if rem:
                break
            rest = q
            total += 1
    if total == n:
        return ("repeated-split",)
    return ("other", None)


def _binomial_power(a, n):
    """Coefficients of (x + a)^n."""
    return [comb(n, j) * a ** (n - j) for j in range(n + 1)]


# -------------------------------------------------------------- irreducibility


def is_irreducible(f, precision=128):
    f = normalize(f)
    n = len(f) - 1
    if n < 1:
        return False
    if f[-1] != 1:
        raise DomainError("is_irreducible expects a monic polynomial")
    if n == 1:
        return True
    disc = discriminant(f)
    if disc == 0:
        return False
    possible = set(range(1, n))
    for p in primes_up_to(200):
        if disc % p == 0:
            continue
        degs = distinct_degree_degrees(f, p)
        if degs == [n]:
            return True
        sums = {0}
        for d in degs:
            sums |= {s + d for s in sums}
        possible &= sums
        if not possible:
            return True
    if n > 12:
        raise ResourceGuardError("root-subset irreducibility test limited to degree <= 12")
    prec = precision
    for _ in range(4):
        try:
            return not _has_factor_from_roots(f, prec, possible)
        except PrecisionError:
            prec *= 2
    raise PrecisionError("rounding of candidate factors stayed ambiguous")


def _has_factor_from_roots(f, prec, sizes):
    rs = complex_roots(f, prec)
    roots = []
    for z, m in zip(rs.roots, rs.multiplicities):
        roots.extend([z] * m)
    n = len(roots)
    with mpmath.workprec(prec + 32):
        tol = mpmath.mpf(2) ** (-prec // 2)
        for s in sorted(sizes):
            if s > n // 2:
                continue
            for sub in itertools.combinations(range(n), s):
                poly = [mpmath.mpc(1)]
                for i in sub:
                    poly = [mpmath.mpc(0)] + poly
                    for j in range(len(poly) - 1):
                        poly[j] -= roots[i] * poly[j + 1]
                # roots carry errors ~2^(8 - prec), far below tol; a true integer factor
                # rounds cleanly and every candidate is confirmed by exact division
                cand = []
                plausible = True
                for c in poly:
                    nearest = int(mpmath.nint(c.real))
                    if abs(c - nearest) > tol:
                        plausible = False
                        break
                    cand.append(nearest)
                if plausible and pdiv_exact_int(f, cand) is not None:
                    return True
    return False


# ------------------------------------------------------- cyclic Galois group


def _hensel_roots(f, roots, p, e):
    """Lift simple roots of f mod p to roots mod p^e by Newton iteration."""
    df = pderiv(f)
    out = []
    for r in roots:
        mod = p
        while mod < p**e:
            mod = min(mod * mod, p**e)
            r = (r - peval(f, r) * pow(peval(df, r), -1, mod)) % mod
        out.append(r % p**e)
    return out


def _lagrange_basis_poly(xs, i, m):
    num = [1]
    den = 1
    for j, x in enumerate(xs):
        if j == i:
            continue
        num = pmod_p(pmul(num, [-x, 1]), m)
        den = den * (xs[i] - x) % m
    inv = pow(den, -1, m)
    num = num + [0] * (len(xs) - len(num))
    return [c * inv % m for c in num]


def _compose_mod(f, g, m):
    """f(g(x)) mod the monic polynomial m, over Z (Horner)."""
    acc = []
    for c in reversed(f):
        acc = pmod_monic(padd(pmul(acc, g), [c]), m)
    return acc


def _symmetric(c, m):
    c %= m
    return c - m if c > m // 2 else c


def cyclic_galois_certificate(f, q, split_prime_bound=10**5):
    """Exact decision whether the splitting field of f has group Z/q.

    Callers pass monic irreducible f of prime degree q with square
    discriminant. A witness g in Q[x] with f | f(g) and g(x) != x mod f is a
    nontrivial automorphism of the degree-q field Q[x]/f, which is then normal
    with cyclic group of order q.
    """
    return galois_generator(f, q, split_prime_bound) is not None


def galois_generator(f, q, split_prime_bound=10**5):
    """A polynomial g of degree < q with f | f(g), g != x, or None if Gal(f) is not Z/q."""
    f = normalize(f)
    if len(f) - 1 != q or f[-1] != 1:
        raise DomainError("expected a monic polynomial of degree q")
    disc = discriminant(f)
    if disc == 0:
        return None
    split = None
    for p in primes_up_to(split_prime_bound):
        if disc % p == 0:
            continue
        degs = distinct_degree_degrees(f, p)
        if degs != [q] and degs != [1] * q:
            # Frobenius is neither trivial nor a q-cycle
            return None
        if degs == [1] * q:
            split = p
            break
    if split is None:
        raise ResourceGuardError(f"no split prime below {split_prime_bound}")
    p = split
    base = roots_mod_p(f, p)
    # denominators of g divide the index of Z[alpha], whose square divides disc
    D = _square_part_root(abs(disc))
    hcoef = max(abs(c) for c in f)
    bound = 2 * (q * (hcoef + 1)) ** q * D**q
    e = 1
    while p**e <= bound:
        e += 1
    for _ in range(11):
        g = _witness_at_precision(f, q, p, e, base, D)
        if g is not None:
            return g
        e *= 2
    return None


def _witness_at_precision(f, q, p, e, base, D):
    mod = p**e
    roots = _hensel_roots(f, base, p, e)
    basis = [_lagrange_basis_poly(roots, i, mod) for i in range(q)]
    r1, r2, others = roots[0], roots[1], roots[2:]
    # if the group is cyclic, some q-cycle starting r1 -> r2 is induced by g
    for perm in itertools.permutations(others):
        cyc = [r1, r2, *perm]
        image = {cyc[i]: cyc[(i + 1) % q] for i in range(q)}
        G = [0] * q
        for i, r in enumerate(roots):
            y = image[r] * D % mod
            for t in range(q):
                G[t] = (G[t] + y * basis[i][t]) % mod
        g = normalize([Fraction(_symmetric(c, mod), D) for c in G])
        if _is_automorphism(f, g):
            return g
    return None


def _square_part_root(n):
    """Largest D with D^2 | n."""
    from .numtheory import factorize

    D = 1
    for p, k in factorize(n).items() if n > 1 else []:
        D *= p ** (k // 2)
    return D


def _is_automorphism(f, g):
    """Exact check that f(g(x)) = 0 mod f and g(x) != x mod f, g rational."""
    den = 1
    for c in g:
        den = den * c.denominator // gcd(den, c.denominator)
    G = [int(c * den) for c in g]
    # den^q f(G/den) = sum a_j G^j den^(q-j), reduced mod monic f
    q = len(f) - 1
    acc = []
    Gp = [1]
    for j in range(q + 1):
        term = pscale(Gp, f[j] * den ** (q - j))
        acc = pmod_monic(padd(acc, term), f)
        Gp = pmod_monic(pmul(Gp, G), f)
    if acc:
        return False
    return normalize(g) != [0, 1]


def compose_rational_mod(f, g, h):
    """f(g(x)) mod monic h with rational g, returned as Fractions."""
    acc = []
    for c in reversed(f):
        prod = pmul(acc, g)
        prod = padd(prod, [Fraction(c)])
        _, acc = pdivmod(prod, h) if len(prod) >= len(h) else (None, normalize(prod))
    return normalize(acc)
