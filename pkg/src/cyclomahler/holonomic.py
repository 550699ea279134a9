"""Linear ODEs with polynomial coefficients: registry, exact series checks, and Taylor continuation.

An operator is stored as p_0(t), ..., p_r(t) (coefficient lists, low to high)
and acts as sum_i p_i(t) (d/dt)^i. theta denotes t d/dt.
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from math import ceil, comb, factorial

import gmpy2
import mpmath
from gmpy2 import mpc, mpfr

from .errors import DomainError, VerificationError
from .numtheory import divisors
from .polyalg import complex_roots, normalize, pdivmod, to_int_primitive

REGISTRY_FILE = "operators.json"
ORDER_CAP = 512
STEP_FRACTION = 0.4


@dataclass
class OdeOperator:
    coeffs: list
    k: int = None

    def __post_init__(self):
        self.coeffs = [[Fraction(c) for c in p] for p in self.coeffs]
        while len(self.coeffs) > 1 and not any(self.coeffs[-1]):
            self.coeffs.pop()
        if not any(self.coeffs[-1]):
            raise DomainError("operator has zero leading coefficient")

    @property
    def order(self):
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return normalize(self.coeffs[-1])

    def max_degree(self):
        return max(len(normalize(p)) - 1 for p in self.coeffs if any(p))

    def shift(self):
        """s = max(i - j) over nonzero coefficients t^j of p_i."""
        return max(i - j for i, p in enumerate(self.coeffs) for j, c in enumerate(p) if c)

    def to_json(self):
        return {
            "k": self.k,
            "order": self.order,
            "coeffs": [[_frac_str(c) for c in p] for p in self.coeffs],
        }


def _frac_str(c):
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# ------------------------------------------------------------------ registry


def load_operator_file(path_or_data):
    """Parse the JSON operator format; a list of operators or a single one."""
    if isinstance(path_or_data, (str, bytes)) or hasattr(path_or_data, "read_text"):
        with open(path_or_data) as fh:
            data = json.load(fh)
    else:
        data = path_or_data
    items = data["operators"] if isinstance(data, dict) and "operators" in data else data
    if isinstance(items, dict):
        items = [items]
    ops = []
    for item in items:
        coeffs = [[Fraction(c) for c in p] for p in item["coeffs"]]
        op = OdeOperator(coeffs, item.get("k"))
        if op.order != int(item["order"]):
            raise DomainError(f"operator for k={item.get('k')} declares order {item['order']}, has {op.order}")
        ops.append(op)
    return ops


_REGISTRY = None


def _registry():
    global _REGISTRY
    if _REGISTRY is None:
        text = resources.files("cyclomahler").joinpath("data").joinpath(REGISTRY_FILE).read_text()
        _REGISTRY = {op.k: op for op in load_operator_file(json.loads(text))}
    return _REGISTRY


def operator_registry(k):
    reg = _registry()
    if k not in reg:
        raise DomainError(f"no registered operator for k={k}; supply an operator file")
    op = reg[k]
    return OdeOperator([list(p) for p in op.coeffs], op.k)


def registered_ks():
    return sorted(_registry())


# ------------------------------------------------------------ exact series


def _ff(m, i):
    """Falling factorial m (m-1) ... (m-i+1)."""
    out = 1
    for t in range(i):
        out *= m - t
    return out


def apply_to_series(op, series):
    """Coefficients of op applied to sum_m series[m] t^m, valid up to len(series) - 1 - max(s, maxdeg)."""
    M = len(series) - 1
    out = [Fraction(0)] * (M + 1)
    for i, p in enumerate(op.coeffs):
        for j, c in enumerate(p):
            if not c:
                continue
            # p_ij t^j D^i t^m = p_ij ff(m, i) t^(m - i + j)
            for m in range(i, M + 1):
                n = m - i + j
                if 0 <= n <= M and series[m]:
                    out[n] += c * _ff(m, i) * series[m]
    return out


def annihilation_check(op, series, M=None):
    """True iff op kills the truncated series through order M - max(maxdeg, shift)."""
    values = series.values if hasattr(series, "values") else list(series)
    if M is None:
        M = len(values) - 1
    if M > len(values) - 1:
        raise DomainError("series shorter than M")
    if M < op.order + op.max_degree() + 10:
        raise DomainError("M too small for a meaningful check")
    res = apply_to_series(op, values[: M + 1])
    upto = M - max(op.max_degree(), op.shift())
    return all(c == 0 for c in res[: upto + 1])


def compose_theta2(op):
    """op * theta^2, using D^i theta^2 = t^2 D^(i+2) + (2i+1) t D^(i+1) + i^2 D^i."""
    r = op.order
    out = [[Fraction(0)] for _ in range(r + 3)]

    def add(idx, poly):
        cur = out[idx]
        if len(cur) < len(poly):
            cur.extend([Fraction(0)] * (len(poly) - len(cur)))
        for a, c in enumerate(poly):
            cur[a] += c

    for i, p in enumerate(op.coeffs):
        add(i + 2, [Fraction(0), Fraction(0)] + list(p))
        add(i + 1, [Fraction(0)] + [(2 * i + 1) * c for c in p])
        add(i, [i * i * c for c in p])
    return OdeOperator(out, op.k)


def series_from_operator(op, seeds, M):
    """Power series solution at t = 0 through order M, from the recurrence of op and initial seeds.

    Equations whose unknown already lies among the seeds are used as checks.
    """
    c = [Fraction(x) for x in seeds] + [Fraction(0)] * max(0, M + 1 - len(seeds))
    s = op.shift()
    terms = [(i, j, v) for i, p in enumerate(op.coeffs) for j, v in enumerate(p) if v]
    nseed = len(seeds)
    for N in range(-s, M - s + 1):
        top = N + s
        lead = sum(v * _ff(top, i) for i, j, v in terms if i - j == s)
        rest = Fraction(0)
        for i, j, v in terms:
            if i - j == s:
                continue
            m = N - j + i
            if 0 <= m <= M:
                rest += v * _ff(m, i) * c[m]
        if top < 0:
            continue
        if top < nseed:
            if lead * c[top] + rest != 0:
                raise VerificationError(f"seed coefficient {top} violates the recurrence")
            continue
        if lead == 0:
            raise DomainError(f"recurrence is singular at index {top}; supply more seeds")
        c[top] = -rest / lead
    return c[: M + 1]


# ------------------------------------------------------------- singularities


@dataclass
class Singularity:
    value: complex
    radius: float
    exact: Fraction = None


def _rational_roots(f):
    """All rational roots of an integer polynomial (low to high)."""
    f = normalize(f)
    roots = []
    while f and f[0] == 0:
        if Fraction(0) not in roots:
            roots.append(Fraction(0))
        f = f[1:]
    if len(f) < 2:
        return roots
    for den in divisors(abs(f[-1])):
        for num in divisors(abs(f[0])):
            for sgn in (1, -1):
                r = Fraction(sgn * num, den)
                if r in roots:
                    continue
                val = Fraction(0)
                for coef in reversed(f):
                    val = val * r + coef
                if val == 0:
                    roots.append(r)
    return roots


def singularities(op, precision=128):
    """Roots of the leading coefficient; rational ones reported exactly."""
    lead = to_int_primitive(op.leading)
    out = [Singularity(complex(r), 0.0, r) for r in _rational_roots(lead)]
    rest = list(lead)
    for r in (s.exact for s in out):
        lin = [-r.numerator, r.denominator]
        while True:
            q, rem = pdivmod(rest, lin)
            if normalize(rem):
                break
            rest = to_int_primitive(q)
    if len(normalize(rest)) > 1:
        rs = complex_roots(rest, precision)
        for z, rad in zip(rs.roots, rs.radii):
            out.append(Singularity(complex(z), float(rad)))
    out.sort(key=lambda s: (s.value.real, s.value.imag))
    return out


def all_singularities_real(op):
    return all(s.exact is not None or abs(s.value.imag) <= s.radius for s in singularities(op))


# ---------------------------------------------------------- local expansions


@dataclass
class LocalExpansion:
    """c_0 + c_1 log t + c_2 log^2 t + sum_m series[m] t^m near t = 0."""

    series: list
    log_coeffs: tuple = (Fraction(0), Fraction(0), Fraction(0))
    radius: Fraction = None

    def evaluate_derivatives(self, t0, count, bits):
        """[f(t0), f'(t0), ..., f^(count-1)(t0)] with gmpy2 complex numbers, principal log."""
        with gmpy2.context(gmpy2.get_context(), precision=bits):
            t = _to_mpc(t0)
            logt = gmpy2.log(t)
            vals = []
            # log part: dict (a, l) -> coeff for t^a log^l t
            part = {(0, l): Fraction(c) for l, c in enumerate(self.log_coeffs) if c}
            for n in range(count):
                v = mpc(0)
                for (a, l), c in part.items():
                    v += _to_mpc(c) * t**a * logt**l
                # power series part
                acc = mpc(0)
                for m in range(len(self.series) - 1, n - 1, -1):
                    acc = acc * t + _to_mpc(self.series[m]) * _ff(m, n)
                v += acc
                vals.append(v)
                nxt = {}
                for (a, l), c in part.items():
                    if a:
                        nxt[(a - 1, l)] = nxt.get((a - 1, l), 0) + a * c
                    if l:
                        nxt[(a - 1, l - 1)] = nxt.get((a - 1, l - 1), 0) + l * c
                part = {key: c for key, c in nxt.items() if c}
            return vals


def _ct_seeds(k, count):
    from .constterms import constant_terms

    return constant_terms(k, count).values


def h_series(k, M, op=None, seeds=24):
    """CT[F_k^m], m <= M, from the operator recurrence seeded by exact constant terms."""
    op = op or operator_registry(k)
    base = _ct_seeds(k, min(M, max(seeds, op.shift() + op.max_degree() + 4)))
    if M < len(base):
        return [Fraction(x) for x in base[: M + 1]]
    return series_from_operator(op, base, M)


def h_local_expansion(k, M, op=None):
    return LocalExpansion(h_series(k, M, op), radius=Fraction(1, k))


def b_local_expansion(k, M, op=None, series=None):
    """(1/2) log^2 t + sum_{m >= 1} CT[F_k^m] / m^2 t^m, i.e. c_0 = c_1 = 0."""
    ct = series if series is not None else h_series(k, M, op)
    coeffs = [Fraction(0)] + [Fraction(ct[m]) / (m * m) for m in range(1, M + 1)]
    return LocalExpansion(coeffs, (Fraction(0), Fraction(0), Fraction(1, 2)), Fraction(1, k))


# ----------------------------------------------------------------- paths


@dataclass
class PathPlan:
    waypoints: list
    orientation: int = 1

    def segments(self):
        return len(self.waypoints) - 1


def _cplx(z):
    """Exact complex as a (Fraction, Fraction) pair."""
    if isinstance(z, tuple):
        return (Fraction(z[0]), Fraction(z[1]))
    if isinstance(z, complex):
        return (Fraction(z.real), Fraction(z.imag))
    return (Fraction(z), Fraction(0))


def _to_mpc(z):
    if isinstance(z, tuple):
        re, im = Fraction(z[0]), Fraction(z[1])
        return mpc(mpfr(re.numerator) / re.denominator, mpfr(im.numerator) / im.denominator)
    if isinstance(z, Fraction):
        return mpc(mpfr(z.numerator) / z.denominator, 0)
    if isinstance(z, int):
        return mpc(z)
    if isinstance(z, (mpc, mpfr)):
        return mpc(z)
    return mpc(z)


def base_point(k, orientation):
    return (Fraction(0), Fraction(orientation, 8 * k))


def standard_path(k, x, orientation):
    """[t0, orientation * i, x] with t0 = orientation * i / (8k)."""
    return PathPlan([base_point(k, orientation), (Fraction(0), Fraction(orientation)), _cplx(x)], orientation)


def _segment_distance(a, b, s):
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    u = 0.0 if L2 == 0 else max(0.0, min(1.0, ((s.real - ax) * dx + (s.imag - ay) * dy) / L2))
    px, py = ax + u * dx, ay + u * dy
    return ((s.real - px) ** 2 + (s.imag - py) ** 2) ** 0.5


def validate_path(op, path, margin=1e-12):
    sings = singularities(op)
    wps = path.waypoints
    for a, b in zip(wps, wps[1:]):
        for s in sings:
            d = _segment_distance(a, b, s.value)
            if d <= margin + s.radius:
                raise DomainError(f"path segment passes within {margin} of singularity {s.value}")
    return True


# ------------------------------------------------------- Taylor continuation


@dataclass
class ContinuationResult:
    values: list
    error_estimate: float
    bits: int
    steps: int = 0
    point: tuple = None


def working_bits(digits, segments):
    return int(ceil(digits * 3.33)) + 64 + 16 * segments


def _shift_poly(p, c):
    """Coefficients of p(c + z) in z."""
    a = list(p)
    n = len(a)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            a[j] += c * a[j + 1]
    return a


class _Stepper:
    def __init__(self, op, bits):
        self.op = op
        self.bits = bits
        self.r = op.order
        with gmpy2.context(gmpy2.get_context(), precision=bits):
            self.poly = [[_to_mpc(c) for c in p] for p in op.coeffs]
        self.sings = [complex(s.value) for s in singularities(op)]
        self.steps = 0

    def dist(self, z):
        zc = complex(z)
        return min(abs(zc - s) for s in self.sings) if self.sings else float("inf")

    def step(self, z, vals, h):
        """Taylor step from z by h; returns (values at z + h, tail gap) or None if the order cap is hit."""
        r = self.r
        eps = mpfr(2) ** (-self.bits)
        q = [_shift_poly(p, z) for p in self.poly]
        terms = []
        lead = None
        for i, p in enumerate(q):
            for j, c in enumerate(p):
                if c == 0:
                    continue
                Q = c * h ** (r + j - i)
                if i == r and j == 0:
                    lead = Q
                else:
                    terms.append((i, j, Q))
        if lead is None or lead == 0:
            raise DomainError("Taylor step centred on a singular point")
        b = [vals[n] * h**n / factorial(n) for n in range(r)]
        scale = max(abs(x) for x in b) or mpfr(1)
        small_run = 0
        N = 0
        while True:
            m_top = N + r
            if m_top > ORDER_CAP:
                return None
            acc = mpc(0)
            for i, j, Q in terms:
                m = N - j + i
                if m >= i:
                    acc += Q * (_ff(m, i) * b[m])
            val = -acc / (lead * _ff(m_top, r))
            b.append(val)
            a = abs(val)
            if a > scale:
                scale = a
            small_run = small_run + 1 if a <= eps * scale else 0
            N += 1
            if small_run >= r + 6 and m_top >= 2 * r + 8:
                break
        out = []
        for i in range(r):
            s = mpc(0)
            for n in range(i, len(b)):
                s += comb(n, i) * b[n]
            out.append(s * factorial(i) / h**i)
        gap = sum(abs(x) for x in b[-(r + 6):])
        self.steps += 1
        return out, gap

    def march(self, z, vals, target):
        """Continue values from z to target along the straight segment."""
        err = mpfr(0)
        tgt = target
        while True:
            rem = tgt - z
            remaining = abs(rem)
            if remaining == 0:
                return z, vals, err
            d = self.dist(z)
            if d < 2.0 ** (-self.bits / 2):
                raise DomainError("continuation ran into a singular point")
            hmax = STEP_FRACTION * d
            last = remaining <= hmax
            h = rem if last else rem * (mpfr(hmax) / remaining)
            while True:
                res = self.step(z, vals, h)
                if res is not None:
                    break
                h = h / 2
                last = False
            vals, gap = res
            err += gap
            z = tgt if last else z + h


def _with_precision(bits, fn):
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        return fn()


def continue_solution(op, init, path, digits=30, bits=None):
    """Values [y, y', ..., y^(r-1)] at the last waypoint, starting from a local expansion at waypoint 0."""
    bits = bits or working_bits(digits, path.segments())
    validate_path(op, path)

    def run():
        stepper = _Stepper(op, bits)
        z = _to_mpc(path.waypoints[0])
        if isinstance(init, LocalExpansion):
            vals = init.evaluate_derivatives(path.waypoints[0], op.order, bits)
        else:
            vals = [mpc(v) for v in init]
        err = mpfr(0)
        for wp in path.waypoints[1:]:
            z, vals, e = stepper.march(z, vals, _to_mpc(wp))
            err += e
        rounding = mpfr(2) ** (-bits + 16) * (stepper.steps + 1) * max(1, abs(vals[0]))
        return ContinuationResult(vals, float(err + rounding), bits, stepper.steps, path.waypoints[-1])

    return _with_precision(bits, run)


def continue_to_many(op, init, trunk, endpoints, digits=30, bits=None):
    """Continue along the shared trunk waypoints, then branch to each endpoint."""
    segs = len(trunk)
    bits = bits or working_bits(digits, segs)
    for x in endpoints:
        validate_path(op, PathPlan(list(trunk) + [_cplx(x)]))

    def run():
        stepper = _Stepper(op, bits)
        z = _to_mpc(trunk[0])
        vals = init.evaluate_derivatives(trunk[0], op.order, bits)
        err = mpfr(0)
        for wp in trunk[1:]:
            z, vals, e = stepper.march(z, vals, _to_mpc(wp))
            err += e
        out = []
        for x in endpoints:
            zz, vv, e = stepper.march(z, list(vals), _to_mpc(_cplx(x)))
            rounding = mpfr(2) ** (-bits + 16) * (stepper.steps + 1) * max(1, abs(vv[0]))
            out.append(ContinuationResult(vv, float(err + e + rounding), bits, stepper.steps, _cplx(x)))
        return out

    return _with_precision(bits, run)


def series_terms_needed(bits, ratio=Fraction(1, 8)):
    """Terms of a local series at |t0| = ratio / R so that the geometric tail is below 2^-bits."""
    import math

    return int(bits / -math.log2(float(ratio))) + 16


def _raw(x):
    man, exp = x.as_mantissa_exp()
    return mpmath.libmp.from_man_exp(int(man), int(exp))


def to_mpmath(z):
    """Exact conversion (no rounding to the ambient mpmath precision)."""
    if isinstance(z, mpc):
        return mpmath.mp.make_mpc((_raw(z.real), _raw(z.imag)))
    if isinstance(z, mpfr):
        return mpmath.mp.make_mpf(_raw(z))
    return mpmath.mpmathify(z)
