"""Density of |F_k| on the torus and the Mahler measures m(C_k)."""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .constterms import _egf_structure
from .errors import DomainError
from .holonomic import (
    b_local_expansion,
    base_point,
    compose_theta2,
    continue_to_many,
    h_local_expansion,
    h_series,
    operator_registry,
    series_terms_needed,
    singularities,
    to_mpmath,
    working_bits,
)
from .numtheory import is_prime

DENSITY_METHODS = ("closed-form-k2", "ode", "half-normal", "half-normal-refined", "kluyver-Sd")
MAHLER_METHODS = ("ode-B", "closed-form", "kluyver-reduction", "convolution", "quadrature")


@dataclass
class MahlerResult:
    value: object
    error: float
    method: str
    digits: int
    runtime_ms: float = 0.0

    def to_json(self, k):
        return {
            "op": "mck",
            "k": k,
            "method": self.method,
            "digits": self.digits,
            "value": mpmath.nstr(self.value, self.digits, strip_zeros=False),
            "error_estimate": f"{self.error:.3e}",
            "runtime_ms": round(self.runtime_ms, 1),
        }


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, mpmath.mpf):
        man, exp = x.man_exp
        return Fraction(man) * Fraction(2) ** exp
    return Fraction(str(x))


def _mp(x):
    x = _frac(x)
    return mpmath.mpf(x.numerator) / x.denominator


def _check_ode_k(k, op):
    if op is None:
        if k % 2:
            raise DomainError("the ode method needs even k (F_k reciprocal)")
        return operator_registry(k)
    return op


def singular_abscissae(k, op=None):
    """Sorted |1/t_s| over the nonzero singular points of the operator."""
    op = _check_ode_k(k, op)
    xs = []
    for s in singularities(op):
        if s.exact is not None:
            if s.exact != 0:
                xs.append(abs(1 / s.exact))
        elif abs(s.value) > 1e-30:
            xs.append(Fraction(1 / abs(s.value)).limit_denominator(10**15))
    return sorted(set(xs))


# ------------------------------------------------------------ ode legs


def _h_values(k, xs, digits, op, symmetric):
    """{(orientation, sign, x): H^orientation(sign / x)} by analytic continuation."""
    bits = working_bits(digits, 3)
    init = h_local_expansion(k, series_terms_needed(bits), op)
    ends = [1 / _frac(x) for x in xs] + [-1 / _frac(x) for x in xs]
    out, err = {}, {}
    for o in ((1,) if symmetric else (1, -1)):
        trunk = [base_point(k, o), (Fraction(0), Fraction(o))]
        res = continue_to_many(op, init, trunk, ends, bits=bits)
        n = len(xs)
        for i, x in enumerate(xs):
            for sgn, r in ((1, res[i]), (-1, res[n + i])):
                out[(o, sgn, x)] = to_mpmath(r.values[0])
                err[(o, sgn, x)] = r.error_estimate
    if symmetric:
        # real operator and real initial data: H^-(t) = conj H^+(t) on the real axis
        for key in list(out):
            out[(-1,) + key[1:]] = mpmath.conj(out[key])
            err[(-1,) + key[1:]] = err[key]
    return out, err


def _rho_ode_many(k, xs, digits, op, symmetric=False):
    op = _check_ode_k(k, op)
    bad = set(singular_abscissae(k, op))
    for x in xs:
        if not 0 < _frac(x) < k:
            raise DomainError(f"x={x} outside (0, {k})")
        if _frac(x) in bad:
            raise DomainError(f"x={x} is a singular abscissa")
    vals, errs = _h_values(k, xs, digits, op, symmetric)
    out = []
    with mpmath.workdps(digits + 10):
        for x in xs:
            xm = _mp(x)
            total = vals[(1, 1, x)] + vals[(-1, -1, x)] - vals[(-1, 1, x)] - vals[(1, -1, x)]
            r = total / (2j * mpmath.pi * xm)
            e = sum(errs[(o, s, x)] for o in (1, -1) for s in (1, -1)) / float(2 * mpmath.pi * xm)
            out.append((r.real, e + float(abs(r.imag))))
    return out


# ------------------------------------------------------------ other routes


def _rho_closed_k2(x):
    x = _mp(x)
    if not 0 < x < 2:
        raise DomainError("closed form needs 0 < x < 2")
    return 2 / (mpmath.pi * mpmath.sqrt(4 - x * x))


def _rho_half_normal(k, x):
    x = _mp(x)
    return mpmath.sqrt(2 / (mpmath.pi * k)) * mpmath.exp(-x * x / (2 * k))


def _rho_half_normal_refined(k, x):
    x = _mp(x)
    k = mpmath.mpf(k)
    poly = 8 * k**3 - 3 * k**2 + 6 * k * x**2 - x**4
    return mpmath.exp(-x * x / (2 * k)) * poly / (4 * mpmath.sqrt(2 * mpmath.pi) * k**3.5)


def _bessel_blocks(n):
    # block ends for the oscillatory integrals: zeros of J_0(2s)
    return mpmath.besseljzero(0, n) / 2


def _rho_kluyver(d, x):
    if d is None or d <= 2:
        raise DomainError("kluyver-Sd needs d >= 3 (the integral is only conditionally convergent otherwise)")
    x = _mp(x)
    if not 0 <= x <= 2 * d:
        raise DomainError(f"x outside [0, {2 * d}]")
    f = lambda s: mpmath.besselj(0, 2 * s) ** d * mpmath.cos(s * x)
    period = 2 * mpmath.pi / (2 + x) if x else mpmath.pi
    val = mpmath.quadosc(f, [0, mpmath.inf], period=period)
    return 2 * val / mpmath.pi


def rho(k, x, method="ode", digits=20, d=None, op=None):
    """rho_k(x); for kluyver-Sd the density of |S_d| is returned instead and k is ignored."""
    if method not in DENSITY_METHODS:
        raise DomainError(f"unknown density method {method!r}")
    with mpmath.workdps(digits + 5):
        if method == "closed-form-k2":
            if k != 2:
                raise DomainError("closed-form-k2 is only for k = 2")
            return +_rho_closed_k2(x)
        if method == "half-normal":
            return +_rho_half_normal(k, x)
        if method == "half-normal-refined":
            return +_rho_half_normal_refined(k, x)
        if method == "kluyver-Sd":
            return +_rho_kluyver(d, x)
    return _rho_ode_many(k, [x], digits, op)[0][0]


@dataclass
class DensityGrid:
    k: int
    method: str
    digits: int
    xs: list
    values: list
    flagged: list = field(default_factory=list)
    mass: object = None
    weights: list = None

    def to_tsv(self):
        head = [
            f"# k={self.k}",
            f"# method={self.method}",
            f"# digits={self.digits}",
            "# singular abscissae: " + ",".join(str(x) for x in self.flagged),
            f"# mass={mpmath.nstr(self.mass, 12) if self.mass is not None else 'n/a'}",
        ]
        lines = [f"{mpmath.nstr(_mp(x), self.digits)}\t{mpmath.nstr(v, self.digits)}"
                 for x, v in zip(self.xs, self.values)]
        return "\n".join(head + lines) + "\n"

    def integrate(self, f=None):
        """Integral of f(x) rho(x) over the grid (tanh-sinh weights, else trapezoid)."""
        xs = [_mp(x) for x in self.xs]
        ys = [v if f is None else f(x) * v for x, v in zip(xs, self.values)]
        if self.weights is not None:
            return mpmath.fsum(w * y for w, y in zip(self.weights, ys))
        return _trapezoid(self.xs, ys, self._lo, self._hi)


def _chunk_worker(args):
    k, xs, digits, op = args
    return [v for v, _ in _rho_ode_many(k, xs, digits, op, symmetric=True)]


def _trapezoid(xs, vals, a, b):
    """Trapezoid rule over the sorted nodes, closed by constant pieces out to a and b."""
    pts = sorted(zip((_frac(x) for x in xs), vals))
    total = mpmath.mpf(0)
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        total += (y0 + y1) * _mp(x1 - x0) / 2
    if pts:
        total += pts[0][1] * _mp(pts[0][0] - a) + pts[-1][1] * _mp(b - pts[-1][0])
    return total


def _tanh_sinh_panel(a, b, count):
    """count tanh-sinh nodes and weights on (a, b); outermost nodes sit ~1e-8 (relative) from the ends."""
    n = max(1, (count - 1) // 2)
    T = mpmath.mpf("2.5")
    h = T / n
    half = (b - a) / 2
    mid = (a + b) / 2
    out = []
    for j in range(-n, n + 1):
        t = j * h
        u = mpmath.pi / 2 * mpmath.sinh(t)
        x = mid + half * mpmath.tanh(u)
        w = h * half * (mpmath.pi / 2) * mpmath.cosh(t) / mpmath.cosh(u) ** 2
        out.append((x, w))
    return out


def rho_grid(k, a, b, n, method="ode", digits=15, d=None, op=None, workers=1, kind="uniform"):
    """Density table on [a, b].

    kind="uniform": n + 1 equally spaced nodes; nodes outside the support and
    singular abscissae are skipped; the mass uses the trapezoid rule.
    kind="midpoint": the n cell midpoints of [a, b].
    kind="tanh-sinh": about n nodes placed panel-wise between singular abscissae,
    with quadrature weights, so mass and moments are accurate.
    """
    a, b = _frac(a), _frac(b)
    if n < 1 or b <= a:
        raise DomainError("need n >= 1 and a < b")
    if kind not in ("uniform", "midpoint", "tanh-sinh"):
        raise DomainError("kind is 'uniform', 'midpoint' or 'tanh-sinh'")
    if method == "ode":
        op = _check_ode_k(k, op)
        sing = singular_abscissae(k, op)
        top = Fraction(k)
    else:
        sing = []
        top = {"closed-form-k2": Fraction(2), "kluyver-Sd": Fraction(2 * (d or 0))}.get(method, b)
    lo, hi = max(a, Fraction(0)), min(b, top)
    weights = None
    if kind in ("uniform", "midpoint"):
        if kind == "uniform":
            nodes = [a + (b - a) * i / n for i in range(n + 1)]
        else:
            nodes = [a + (b - a) * (2 * i + 1) / (2 * n) for i in range(n)]
        flagged = [x for x in sing if a <= x <= b]
        keep = [x for x in nodes if 0 < x < top and x not in set(sing)]
    else:
        cuts = [lo] + [x for x in sing if lo < x < hi] + [hi]
        flagged = cuts[1:-1]
        per = max(3, n // (len(cuts) - 1))
        keep, weights = [], []
        for p0, p1 in zip(cuts, cuts[1:]):
            for x, w in _tanh_sinh_panel(_mp(p0), _mp(p1), per):
                keep.append(_frac(x))
                weights.append(w)
    if method == "ode":
        if workers > 1:
            size = max(1, len(keep) // (4 * workers))
            chunks = [(k, keep[i:i + size], digits, op) for i in range(0, len(keep), size)]
            with ProcessPoolExecutor(workers) as pool:
                vals = [v for part in pool.map(_chunk_worker, chunks) for v in part]
        else:
            vals = _chunk_worker((k, keep, digits, op))
    else:
        vals = [rho(k, x, method, digits, d=d) for x in keep]
    grid = DensityGrid(k, method, digits, keep, vals, flagged, None, weights)
    grid._lo, grid._hi = lo, hi
    grid.mass = grid.integrate()
    return grid


# ------------------------------------------------------------ Mahler measures


def _b_at_pm_one(k, digits, op):
    """B^o(+1) and B^o(-1) for o = +, - by continuing the log^2 expansion of B_k."""
    op2 = compose_theta2(op)
    bits = working_bits(digits, 3)
    init = b_local_expansion(k, series_terms_needed(bits), op)
    vals, err = {}, 0.0
    for o in (1, -1):
        trunk = [base_point(k, o), (Fraction(0), Fraction(o))]
        res = continue_to_many(op2, init, trunk, [Fraction(1), Fraction(-1)], bits=bits)
        vals[(o, 1)] = to_mpmath(res[0].values[0])
        vals[(o, -1)] = to_mpmath(res[1].values[0])
        err += res[0].error_estimate + res[1].error_estimate
    return vals, err


def b_function_value(k, t, orientation, digits=30, op=None):
    """B_k^orientation(t) for real t, continued from the base point through orientation * i."""
    op = _check_ode_k(k, op)
    op2 = compose_theta2(op)
    bits = working_bits(digits, 3)
    init = b_local_expansion(k, series_terms_needed(bits), op)
    trunk = [base_point(k, orientation), (Fraction(0), Fraction(orientation))]
    (res,) = continue_to_many(op2, init, trunk, [_frac(t)], bits=bits)
    return to_mpmath(res.values[0]), res.error_estimate


def _mahler_ode_b(k, digits, op):
    # On (0, 1/k) the combination B^+(t) + B^-(-t) - B^-(t) - B^+(-t) reduces to
    # -2 pi i log t (power series cancel, the log^2 branches differ by 2 pi i log t),
    # so its value at 1/k is 2 pi i log k and m(C_k) = B(1) / (2 pi i).
    op = _check_ode_k(k, op)
    vals, err = _b_at_pm_one(k, digits, op)
    with mpmath.workdps(digits + 10):
        total = vals[(1, 1)] + vals[(-1, -1)] - vals[(-1, 1)] - vals[(1, -1)]
        m = total / (2j * mpmath.pi)
        return m.real, err / float(2 * mpmath.pi) + float(abs(m.imag))


def _mahler_closed_k2(digits):
    with mpmath.workdps(digits + 10):
        f = lambda x: mpmath.log(x) * 2 / (mpmath.pi * mpmath.sqrt(4 - x * x))
        v = mpmath.quad(f, [1, 2])
        return v, 10.0 ** (-digits - 2)


def _kluyver_log_integral(d, digits):
    """m(S_d) = int_0^inf (e^{-s} - J_0(2s)^d) ds / s."""
    with mpmath.workdps(digits + 5):
        f = lambda s: (mpmath.exp(-s) - mpmath.besselj(0, 2 * s) ** d) / s
        return mpmath.quadosc(f, [0, mpmath.inf], zeros=_bessel_blocks)


def _mahler_x0_plus_sd(d, digits):
    """m(x_0 + S_d) = m(S_d) + (2/pi) int_0^inf J_0(2s)^d Si(s) ds / s.

    E log+|S| = E log|S| - E[log|S|; |S| < 1], and int_{-1}^{1} log|x| cos(sx) dx = -2 Si(s)/s.
    """
    with mpmath.workdps(digits + 5):
        corr = mpmath.quadosc(lambda s: mpmath.besselj(0, 2 * s) ** d * mpmath.si(s) / s,
                              [0, mpmath.inf], zeros=_bessel_blocks)
        return _kluyver_log_integral(d, digits) + 2 * corr / mpmath.pi


def _sym2_density(y):
    """Density of S_2 = 2 cos a + 2 cos b at 0 < y < 4, by convolving two arcsine laws."""
    # f(y) = pi^-2 int_0^phi* dphi / sqrt(4 - (y - 2 cos phi)^2), cos phi* = (y - 2)/2;
    # phi = phi* - u^2 removes the inverse square root at phi*
    phi_star = mpmath.acos((y - 2) / 2)

    def g(u):
        phi = phi_star - u * u
        near = 4 * mpmath.sin((phi_star + phi) / 2) * mpmath.sin(u * u / 2)
        return 2 * u / mpmath.sqrt(near * (2 + y - 2 * mpmath.cos(phi)))

    return mpmath.quad(g, [0, mpmath.sqrt(phi_star)]) / mpmath.pi**2


def _mahler_convolution_k4(digits):
    # m(C_4) = m(x_0 + S_2) = int_1^4 log y rho_{|S_2|}(y) dy, rho_{|S_2|} = 2 f_{S_2}
    with mpmath.workdps(digits + 5):
        v = mpmath.quad(lambda y: mpmath.log(y) * 2 * _sym2_density(y), [1, 2, 4])
    return v


def _mahler_quadrature(k, digits, op, nodes=120):
    """int_1^k log(x) rho_k(x) dx on tanh-sinh panels split at the singular abscissae."""
    op = _check_ode_k(k, op)
    coarse = rho_grid(k, 1, k, nodes, digits=digits + 3, op=op, kind="tanh-sinh").integrate(mpmath.log)
    fine = rho_grid(k, 1, k, 2 * nodes, digits=digits + 3, op=op, kind="tanh-sinh").integrate(mpmath.log)
    return fine, float(abs(fine - coarse)) + 1e-8


def mahler_ck(k, method="ode-B", digits=30, op=None):
    """m(C_k) by the requested route, as a MahlerResult."""
    if method not in MAHLER_METHODS:
        raise DomainError(f"unknown method {method!r}")
    if k < 1:
        raise DomainError("k must be positive")
    t0 = time.perf_counter()
    if k == 1:
        value, err = mpmath.mpf(0), 0.0
    elif method == "ode-B":
        value, err = _mahler_ode_b(k, digits, op)
    elif method == "closed-form":
        if k != 2:
            raise DomainError("closed-form is only available for k = 2")
        value, err = _mahler_closed_k2(digits)
    elif method == "kluyver-reduction":
        if k % 2 and is_prime(k):
            value = _kluyver_log_integral(k + 1, digits)
        elif k & (k - 1) == 0 and k >= 4:
            # d = 2 converges too slowly for the oscillatory route; convolve instead
            value = _mahler_convolution_k4(digits) if k == 4 else _mahler_x0_plus_sd(k // 2, digits)
        else:
            raise DomainError("kluyver-reduction needs k an odd prime or a power of 2")
        err = 10.0 ** (-digits)
    elif method == "convolution":
        if k != 4:
            raise DomainError("convolution is only available for k = 4")
        value, err = _mahler_convolution_k4(digits), 10.0 ** (-digits)
    else:
        value, err = _mahler_quadrature(k, digits, op)
    ms = (time.perf_counter() - t0) * 1000
    return MahlerResult(value, err, method, digits, ms)


# ------------------------------------------------------------ asymptotics

# m(C_k) - log k / 2 + gamma / 2 + log 2 / 2 = sum_n HALF[n] u_n + INTEGER[n] k^{-(n+1)}, with
# u_n = (2 pi)^{-1/2} k^{-(2n+1)/2} ("corrected") or (2 pi k)^{-(2n+1)/2} ("printed"); the two agree at n = 0
HALF_POWER_COEFFS = (
    Fraction(2),
    Fraction(-31, 2**2 * 3**2),
    Fraction(13 * 71, 2**6 * 3 * 5**2),
    Fraction(423469, 2**9 * 3**3 * 5 * 7**2),
    Fraction(13 * 5510303, 2**14 * 3**5 * 5 * 7),
    Fraction(-23 * 29 * 4202993, 2**17 * 3**2 * 5 * 7 * 11**2),
    Fraction(-1013699 * 3491520091, 2**21 * 3**5 * 5**3 * 7 * 11 * 13**2),
    Fraction(-2269 * 929444980559, 2**24 * 3**5 * 5**3 * 7 * 11 * 13),
    Fraction(6163 * 9656111 * 798140689, 2**30 * 3**6 * 5**2 * 11 * 13 * 17**2),
)
INTEGER_POWER_COEFFS = (
    Fraction(1, 2**2),
    Fraction(5, 2**3 * 3**2),
    Fraction(-1, 2**3 * 3),
    Fraction(-29 * 59, 2**4 * 3**3 * 5**2),
    Fraction(-101, 2**3 * 3**3 * 5),
    Fraction(153841, 2**4 * 3**5 * 7**2),
    Fraction(118387, 2**4 * 3**4 * 5 * 7),
    Fraction(-95944159, 2**5 * 3**6 * 5**3 * 7),
    Fraction(-2971 * 11681, 2**3 * 3**4 * 5**3 * 7),
)
MAX_ORDER = 2 * len(HALF_POWER_COEFFS)


def mahler_ck_asymptotic(k, order=MAX_ORDER, digits=30, basis="corrected"):
    """Truncated large-k expansion of m(C_k); order counts correction terms after the constant part."""
    if k < 2:
        raise DomainError("k must be at least 2")
    if basis not in ("corrected", "printed"):
        raise DomainError("basis is 'corrected' or 'printed'")
    s = _egf_structure(k)
    with mpmath.workdps(digits + 5):
        K = mpmath.mpf(k)
        if s is not None and s[0] == "prime":
            if order > 1:
                raise DomainError("only the two-term form is available for prime k")
            v = mpmath.log(K) / 2 - mpmath.euler / 2
            return v + mpmath.mpf(5) / (8 * K) if order == 1 else v
        if s is None:
            raise DomainError("k must be 2 q^r, 2^r or an odd prime")
        if not 0 <= order <= MAX_ORDER:
            raise DomainError(f"order must lie in 0..{MAX_ORDER}")
        v = mpmath.log(K) / 2 - mpmath.euler / 2 - mpmath.log(2) / 2
        root = mpmath.sqrt(2 * mpmath.pi)
        for i in range(order):
            n = i // 2
            if i % 2 == 0:
                c = HALF_POWER_COEFFS[n]
                if basis == "corrected":
                    u = 1 / (root * mpmath.sqrt(K) ** (2 * n + 1))
                else:
                    u = 1 / mpmath.sqrt(2 * mpmath.pi * K) ** (2 * n + 1)
                v += mpmath.mpf(c.numerator) / c.denominator * u
            else:
                c = INTEGER_POWER_COEFFS[n]
                v += mpmath.mpf(c.numerator) / c.denominator / K ** (n + 1)
        return +v


# ------------------------------------------------------------ lower bound


LOWER_BOUND_ROUTES = {
    2: "closed-form",
    3: "kluyver-reduction",
    4: "convolution",
    5: "kluyver-reduction",
    6: "ode-B",
    8: "ode-B",
    10: "ode-B",
}


def lower_bound_check(digits=12):
    """(ok, details): m(x^3 - x - 1) <= m(C_k) for the computable k, and m(C_2) <= 0.33."""
    from .polyalg import mahler_measure_poly

    smyth, _ = mahler_measure_poly([-1, -1, 0, 1])
    values = {k: mahler_ck(k, route, digits).value for k, route in LOWER_BOUND_ROUTES.items()}
    ok = all(smyth <= v for v in values.values()) and values[2] <= mpmath.mpf("0.33")
    return ok, {"smyth": smyth, "values": values}


def even_moment(grid, m):
    """int x^(2m) rho(x) dx estimated from a density grid."""
    return grid.integrate(lambda x: x ** (2 * m))


def ct_even_moment(k, m):
    return h_series(k, 2 * m)[2 * m]
