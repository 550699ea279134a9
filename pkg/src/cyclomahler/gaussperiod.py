"""Gaussian periods alpha_n, their minimal polynomials and equidistribution data."""

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import DomainError, PrecisionError, VerificationError
from .numtheory import euler_phi, primitive_root, smallest_k
from .polyalg import is_irreducible


@dataclass
class GaussPeriodData:
    n: int
    k: int
    p: int
    lam: int
    nu: int
    conjugates: list
    precision: int


def gauss_period(n, precision=128):
    """Conjugates sum_r exp(2 pi i lam^j nu^r / p), j = 1..n, at `precision` bits."""
    if n < 1:
        raise DomainError("n must be positive")
    rec = smallest_k(n)
    k, p = rec.k, rec.p
    lam = primitive_root(p) if p > 2 else 1
    nu = pow(lam, n, p)
    powers = [pow(nu, r, p) for r in range(k)]
    conj = []
    with mpmath.workprec(precision + 16):
        for j in range(1, n + 1):
            lj = pow(lam, j, p)
            s = mpmath.fsum(mpmath.expjpi(mpmath.mpf(2 * ((lj * w) % p)) / p) for w in powers)
            if k % 2 == 0 or p == 2:
                # -1 lies in <nu>, so the period is real
                s = mpmath.mpc(s.real, 0)
            conj.append(s)
    return GaussPeriodData(n, k, p, lam, nu, conj, precision)


def _expand(roots):
    coeffs = [mpmath.mpc(1)]
    for r in roots:
        new = [mpmath.mpc(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            new[i + 1] += c
            new[i] -= c * r
        coeffs = new
    return coeffs


def minimal_polynomial_gauss(n, precision=128, max_doublings=6):
    """Exact minimal polynomial of alpha_n, low to high, verified before it is returned."""
    if n < 2:
        raise DomainError("n must be at least 2")
    if smallest_k(n).k < 2:
        raise DomainError("alpha_n is rational for k(n) = 1")
    prec = max(precision, 4 * n + 64)
    for _ in range(max_doublings):
        data = gauss_period(n, prec)
        with mpmath.workprec(prec + 16):
            coeffs = _expand(data.conjugates)
            ints = []
            worst = mpmath.mpf(0)
            for c in coeffs:
                r = int(mpmath.nint(c.real))
                worst = max(worst, abs(c.real - r), abs(c.imag))
                ints.append(r)
        if worst < mpmath.mpf(2) ** (-prec // 2):
            break
        prec *= 2
    else:
        raise PrecisionError("minimal polynomial coefficients did not settle")
    if worst >= 0.25:
        raise VerificationError("rounding distance too large")
    if not is_irreducible(ints):
        raise VerificationError("rounded polynomial is reducible")
    with mpmath.workprec(prec):
        for a in data.conjugates:
            val = mpmath.polyval(ints[::-1], a)
            der = mpmath.polyval([i * c for i, c in enumerate(ints)][1:][::-1], a)
            # Newton step size bounds the distance to a root when it is tiny
            if der == 0 or abs(val / der) > mpmath.mpf(2) ** (-prec // 4):
                raise VerificationError("conjugate is not a root of the rounded polynomial")
    return ints


def mahler_alpha(n, precision=128):
    """(m(alpha_n), error bound) from the conjugates directly."""
    data = gauss_period(n, precision)
    with mpmath.workprec(precision + 16):
        val = mpmath.fsum(mpmath.log(abs(a)) for a in data.conjugates if abs(a) > 1)
        err = mpmath.mpf(2) ** (-precision + 8) * n
    return val, err


@dataclass
class SamplePointSet:
    p: int
    d: int
    points: list


def sample_points(n):
    """Points ({lam^j/p}, {nu lam^j/p}, ..., {nu^(d-1) lam^j/p}), j = 1..p-1."""
    rec = smallest_k(n)
    if rec.k < 2:
        raise DomainError("sample points need k(n) >= 2")
    p = rec.p
    lam = primitive_root(p)
    nu = pow(lam, n, p)
    d = euler_phi(rec.k)
    nus = [pow(nu, i, p) for i in range(d)]
    pts = []
    for j in range(1, p):
        lj = pow(lam, j, p)
        pts.append(tuple(Fraction((lj * w) % p, p) for w in nus))
    return SamplePointSet(p, d, pts)


def weyl_sum(n, h):
    """sum over the sample points of exp(2 pi i <h, theta>), by the congruence P(nu) = 0 mod p."""
    rec = smallest_k(n)
    p = rec.p
    d = euler_phi(rec.k)
    if len(h) != d:
        raise DomainError(f"h must have length {d}")
    if all(x == 0 for x in h):
        raise DomainError("h must be nonzero")
    nu = pow(primitive_root(p), n, p)
    val = sum(c * pow(nu, i, p) for i, c in enumerate(h)) % p
    return p - 1 if val == 0 else -1


def weyl_sum_direct(n, h, precision=64):
    pts = sample_points(n)
    with mpmath.workprec(precision):
        total = mpmath.mpc(0)
        for pt in pts.points:
            frac = sum(a * x for a, x in zip(h, pt)) % 1
            total += mpmath.expjpi(2 * mpmath.mpf(frac.numerator) / frac.denominator)
        return total


def wasserstein_bound(n):
    """4 sqrt(3) k(k+1) / p^(1/d) + 2 log(k) / p."""
    rec = smallest_k(n)
    k, p = rec.k, rec.p
    d = euler_phi(k)
    return 4 * mpmath.sqrt(3) * k * (k + 1) / mpmath.mpf(p) ** (mpmath.mpf(1) / d) + 2 * mpmath.log(k) / p


def lot_residual(n, m_c2):
    """m(alpha_n) - n m(C_2) for n with k(n) = 2; m(C_2) is passed in."""
    if smallest_k(n).k != 2:
        raise DomainError("n must satisfy k(n) = 2")
    val, _ = mahler_alpha(n)
    with mpmath.workprec(144):
        return val - n * mpmath.mpf(m_c2)
