"""Pruned search for the smallest Mahler measure of cyclic degree-q algebraic integers."""

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import product
from math import comb

import mpmath

from .errors import DomainError, PrecisionError, ResourceGuardError
from .numtheory import factorize, is_prime, primes_up_to
from .polyalg import (
    cyclic_galois_certificate,
    discriminant,
    is_irreducible,
    is_square,
    mahler_measure_poly,
    peval,
    real_rooted,
)
from .scan import BACKEND, scan_block

STAGES = ("congruence", "lift", "discriminant", "divisibility", "irreducible",
          "real-rooted", "mahler", "galois", "accepted")
BLOCK = 2**20
DEFAULT_MAX_CANDIDATES = 5 * 10**8
TIE_TOLERANCE = mpmath.mpf("1e-10")
PREFILTER_PRIMES = 8


def _mpf(x):
    with mpmath.workdps(50):
        return mpmath.mpf(str(x)) if not isinstance(x, mpmath.mpf) else x


def auto_bound(q):
    """M(alpha_q), the exponential Mahler measure of the Gaussian period of degree q."""
    from .gaussperiod import mahler_alpha

    with mpmath.workdps(50):
        m, _ = mahler_alpha(q, precision=160)
        return mpmath.exp(m)


# ------------------------------------------------------------ step (i)


def conductor_set(q, B):
    """Conductors q^j f_0 (j in {0, 2}, f_0 squarefree with primes = 1 mod q), 1 < f < B^(2q/(q-1))."""
    if q < 3 or not is_prime(q):
        raise DomainError("q must be an odd prime")
    B = _mpf(B)
    if B <= 1:
        raise DomainError("B must exceed 1")
    with mpmath.workdps(50):
        top = B ** (mpmath.mpf(2 * q) / (q - 1))
        limit = int(mpmath.floor(top)) + 1
    ps = [p for p in primes_up_to(limit) if p % q == 1]

    def below(n):
        with mpmath.workdps(50):
            return mpmath.mpf(n) ** (q - 1) < B ** (2 * q)

    out = []

    def extend(start, value):
        for i in range(start, len(ps)):
            v = value * ps[i]
            if not below(v):
                break
            out.append(v)
            extend(i + 1, v)

    for base in (1, q * q):
        if base > 1 and below(base):
            out.append(base)
        if below(base):
            extend(0, base)
    return sorted(set(x for x in out if x > 1))


def radical(n):
    r = 1
    for p in factorize(n):
        r *= p
    return r


# ------------------------------------------------------------ steps (ii)-(iii)


@dataclass(frozen=True)
class CongruenceClass:
    class_id: int
    modulus: int
    residues: tuple  # a_0..a_q modulo the radical of the conductor, a_q = 1
    shifts: tuple  # (p, a) with h = (x + a)^q mod p


def _crt(pairs):
    x, m = 0, 1
    for r, p in pairs:
        t = ((r - x) * pow(m, -1, p)) % p
        x, m = x + m * t, m * p
    return x % m


def _reverse_residues(res, m):
    return tuple(c % m for c in reversed(res))


def congruence_classes(q, conductor, B):
    """Residue polynomials h mod f_1 with h = (x + a)^q mod p for each p | f and a^q lifting below B."""
    B = _mpf(B)
    primes = sorted(factorize(conductor))
    f1 = radical(conductor)
    per_prime = []
    for p in primes:
        options = []
        for a in range(p):
            lift = pow(a, q, p) or p  # least positive lift of the constant term
            if lift < B:
                options.append(a)
        per_prime.append((p, options))
    classes = []
    for choice in product(*[[(p, a) for a in opts] for p, opts in per_prime]):
        coeffs = []
        for j in range(q + 1):
            coeffs.append(_crt([(comb(q, j) * pow(a, q - j, p) % p, p) for p, a in choice]))
        classes.append((tuple(coeffs), tuple(choice)))
    classes.sort()
    # step (iii): drop one of h, x^q h(1/x) when both are present. A lift of the reversal
    # class has constant term = 1 mod f_1; only when f_1 > B does this force it to be 1,
    # so that its own reversal is monic and lies in the kept class.
    if f1 > B:
        seen = set()
        kept = []
        present = {c for c, _ in classes}
        for coeffs, choice in classes:
            rev = _reverse_residues(coeffs, f1)
            if rev in seen and rev in present:
                continue
            seen.add(coeffs)
            kept.append((coeffs, choice))
        classes = kept
    return [CongruenceClass(i, f1, c, s) for i, (c, s) in enumerate(classes)]


# ------------------------------------------------------------ step (iv)


def coefficient_windows(q, modulus, residues, B):
    """(starts, steps, counts) of each a_j, j < q: |a_j| <= C(q, j) B, 0 < a_0 <= B, a_j = residue mod f_1."""
    B = _mpf(B)
    starts, steps, counts = [], [], []
    for j in range(q):
        hi = int(mpmath.floor(comb(q, j) * B))
        lo = 1 if j == 0 else -hi
        if j == 0:
            hi = int(mpmath.floor(B))
        r = residues[j] % modulus
        first = lo + ((r - lo) % modulus)
        n = 0 if first > hi else (hi - first) // modulus + 1
        starts.append(first)
        steps.append(modulus)
        counts.append(n)
    return starts, steps, counts


def lift_count(q, cls, B):
    _, _, counts = coefficient_windows(q, cls.modulus, cls.residues, B)
    total = 1
    for c in counts:
        total *= c
    return total


def lift_candidates(cls, q, B):
    """Monic integer lifts of a congruence class inside the coefficient box, lexicographic in (a_0, ..., a_{q-1})."""
    starts, steps, counts = coefficient_windows(q, cls.modulus, cls.residues, B)
    ranges = [range(s, s + st * c, st) if c else range(0) for s, st, c in zip(starts, steps, counts)]
    for coeffs in product(*ranges):
        yield list(coeffs) + [1]


# ------------------------------------------------------------ steps (v)-(viii)


@dataclass
class CandidateVerdict:
    poly: list
    conductor: int
    stage: str
    mahler: object = None

    @property
    def accepted(self):
        return self.stage == "accepted"


def _exp_mahler(f):
    for prec in (128, 512):
        try:
            m, err = mahler_measure_poly(f, prec)
        except PrecisionError:
            continue
        with mpmath.workdps(50):
            return mpmath.exp(m)
    raise PrecisionError("Mahler measure did not certify at 4x precision")


def filter_candidate(f, q, conductor, B):
    """Run the staged tests; the verdict's stage is the first one failed, or 'accepted'."""
    B = _mpf(B)
    f = list(f)
    disc = discriminant(f)
    with mpmath.workdps(50):
        side = abs(peval(f, 1) * peval(f, -1)) * disc
        if not (is_square(disc) and 0 < side and side < B ** (2 * q)):
            return CandidateVerdict(f, conductor, "discriminant")
    if disc % conductor ** (q - 1):
        return CandidateVerdict(f, conductor, "divisibility")
    if not is_irreducible(f):
        return CandidateVerdict(f, conductor, "irreducible")
    if not real_rooted(f):
        return CandidateVerdict(f, conductor, "real-rooted")
    M = _exp_mahler(f)
    if not (1 < M < B):
        return CandidateVerdict(f, conductor, "mahler", M)
    if not cyclic_galois_certificate(f, q):
        return CandidateVerdict(f, conductor, "galois", M)
    return CandidateVerdict(f, conductor, "accepted", M)


def prefilter_primes(q, conductor, count=PREFILTER_PRIMES):
    """Odd primes not dividing the conductor, used for the splitting-type screen."""
    out = []
    for p in primes_up_to(200):
        if p > 2 and conductor % p:
            out.append(p)
        if len(out) == count:
            break
    return out


# ------------------------------------------------------------ normalisation


def _neg_x(f):
    # -f(-x) keeps a monic odd-degree polynomial monic
    return [(-c if (i % 2 == 0) else c) for i, c in enumerate(f)] if (len(f) - 1) % 2 else list(f)


def equivalents(f):
    """All monic polynomials reachable from f by f -> -f(-x) and by reversal when it stays monic."""
    seen = set()
    stack = [tuple(f)]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        stack.append(tuple(_neg_x(list(g))))
        if abs(g[0]) == 1:
            r = list(reversed(g))
            if r[-1] == -1:
                r = [-c for c in r]
            stack.append(tuple(r))
    return seen


def normalize_witness(f):
    """Representative with positive constant term, lexicographically least from the top coefficient down."""
    pos = [g for g in equivalents(f) if g[0] > 0] or list(equivalents(f))
    return list(min(pos, key=lambda g: tuple(reversed(g))))


# ------------------------------------------------------------ driver


@dataclass
class SearchConfig:
    q: int
    B: object = "auto"
    conductors: object = "all"  # "all", "tame-only" or an explicit list
    workers: int = 1
    checkpoint: str = None
    max_candidates: int = DEFAULT_MAX_CANDIDATES
    override_guard: bool = False
    inclusive: bool = True  # count polynomials with M(f) = B (within 1e-10) as witnesses

    def bound(self):
        return auto_bound(self.q) if self.B == "auto" else _mpf(self.B)

    def digest(self, B):
        key = json.dumps({"q": self.q, "B": mpmath.nstr(B, 30), "conductors": self.conductors,
                          "inclusive": self.inclusive}, sort_keys=True)
        return hashlib.sha256(key.encode()).hexdigest()[:16]


@dataclass
class SearchReport:
    q: int
    B: str
    conductors: list
    minimum: str
    witnesses: list
    stats: dict
    per_conductor: dict
    runtime_ms: float
    backend: str = BACKEND
    accepted: list = field(default_factory=list)

    def to_json(self):
        return asdict(self)


def _effective_bound(B, inclusive):
    with mpmath.workdps(50):
        return B * (1 + TIE_TOLERANCE) if inclusive else B


def _run_unit(args):
    q, conductor, cls, block, B_eff, primes = args
    starts, steps, counts = coefficient_windows(q, cls.modulus, cls.residues, B_eff)
    total = 1
    for c in counts:
        total *= c
    first = block * BLOCK
    stop = min(total, first + BLOCK)
    tested, survivors = scan_block(starts, steps, counts, first, stop, q, primes)
    stages = {s: 0 for s in STAGES}
    stages["lift"] = tested - len(survivors)
    accepted = []
    for f in survivors:
        v = filter_candidate(list(f), q, conductor, B_eff)
        stages[v.stage] += 1
        if v.accepted:
            accepted.append((list(f), mpmath.nstr(v.mahler, 30)))
    return {"conductor": conductor, "class_id": cls.class_id, "block_id": block,
            "candidates_tested": tested, "survivors": accepted, "stages": stages}


def _load_checkpoint(path, digest):
    done = {}
    if path and os.path.exists(path):
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                if rec.get("config") == digest:
                    done[(rec["conductor"], rec["class_id"], rec["block_id"])] = rec
    return done


def plan_units(config, B_eff=None):
    """[(conductor, class, block)] in deterministic order, plus the total lift count."""
    q = config.q
    B_eff = B_eff if B_eff is not None else _effective_bound(config.bound(), config.inclusive)
    conds = conductor_set(q, B_eff)
    if config.conductors == "tame-only":
        conds = [c for c in conds if c % (q * q)]
    elif config.conductors != "all":
        wanted = set(int(c) for c in config.conductors)
        conds = [c for c in conds if c in wanted]
    units, total = [], 0
    for c in conds:
        for cls in congruence_classes(q, c, B_eff):
            n = lift_count(q, cls, B_eff)
            total += n
            for block in range((n + BLOCK - 1) // BLOCK):
                units.append((c, cls, block))
    return conds, units, total


def search_min(config, progress=None):
    """Run the pruned search; ties at the minimum are all reported."""
    q = config.q
    if not is_prime(q) or q < 3:
        raise DomainError("q must be an odd prime")
    if q not in (3, 5, 7):
        raise ResourceGuardError("full searches are limited to q in {3, 5, 7}")
    if q == 7 and config.conductors in ("all", "tame-only"):
        raise ResourceGuardError("q = 7 needs an explicit conductor list")
    t0 = time.perf_counter()
    B = config.bound()
    B_eff = _effective_bound(B, config.inclusive)
    conds, units, total = plan_units(config, B_eff)
    if total > config.max_candidates and not config.override_guard:
        raise ResourceGuardError(f"about {total} lifts exceed the limit {config.max_candidates}")
    digest = config.digest(B)
    done = _load_checkpoint(config.checkpoint, digest)
    todo = [u for u in units if (u[0], u[1].class_id, u[2]) not in done]
    primes_for = {c: prefilter_primes(q, c) for c in conds}
    jobs = [(q, c, cls, block, B_eff, primes_for[c]) for c, cls, block in todo]

    def record(rec):
        rec["config"] = digest
        done[(rec["conductor"], rec["class_id"], rec["block_id"])] = rec
        if config.checkpoint:
            with open(config.checkpoint, "a") as fh:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
        if progress:
            progress(rec)

    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            for rec in pool.map(_run_unit, jobs):
                record(rec)
    else:
        for job in jobs:
            record(_run_unit(job))

    stats = {s: 0 for s in STAGES}
    per_cond = {}
    accepted = []
    for c, cls, block in units:
        rec = done[(c, cls.class_id, block)]
        for s, n in rec["stages"].items():
            stats[s] += n
        pc = per_cond.setdefault(str(c), {"classes": 0, "candidates": 0, "accepted": 0})
        pc["candidates"] += rec["candidates_tested"]
        pc["accepted"] += len(rec["survivors"])
        if block == 0:
            pc["classes"] += 1
        for f, m in rec["survivors"]:
            with mpmath.workdps(40):
                accepted.append((mpmath.mpf(m), f, c))
    for c in conds:
        per_cond.setdefault(str(c), {"classes": 0, "candidates": 0, "accepted": 0})
    accepted.sort(key=lambda t: (t[0], t[1]))
    if accepted:
        best = accepted[0][0]
        tied = [(f, c) for m, f, c in accepted if m <= best * (1 + TIE_TOLERANCE)]
        witnesses = []
        for f, c in tied:
            w = normalize_witness(f)
            if w not in [x["poly"] for x in witnesses]:
                witnesses.append({"poly": w, "conductor": c})
        minimum = mpmath.nstr(best, 20)
    else:
        witnesses, minimum = [], None
    return SearchReport(
        q=q,
        B=mpmath.nstr(B, 20),
        conductors=conds,
        minimum=minimum,
        witnesses=witnesses,
        stats=stats,
        per_conductor=per_cond,
        runtime_ms=round((time.perf_counter() - t0) * 1000, 1),
        accepted=[{"poly": f, "conductor": c, "M": mpmath.nstr(m, 20)} for m, f, c in accepted],
    )
