"""Command-line entry point: `cyclomahler <subcommand> ...` or `python -m cyclomahler`.

Results go to stdout (or --output) only after the computation has finished;
progress and errors go to stderr. Exit codes: 0 ok, 1 domain error,
2 resource guard, 3 verification or precision failure.
"""

import argparse
import json
import os
import sys
import time
from fractions import Fraction

import mpmath

from .errors import DomainError

THREADS_ENV = "CYCLOMAHLER_THREADS"


def _default_threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _digits(text):
    d = int(text)
    if d < 6:
        raise argparse.ArgumentTypeError("digits must be at least 6")
    return d


def _positive(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _rational(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid is a:b:n")
    a, b = _rational(parts[0]), _rational(parts[1])
    n = int(parts[2])
    if not a < b or n < 2:
        raise argparse.ArgumentTypeError("grid needs a < b and n >= 2")
    return a, b, n


def _dec(x, digits=20):
    """Decimal string for an mpmath number (never a binary float in JSON)."""
    if isinstance(x, mpmath.mpc):
        return {"re": _dec(x.real, digits), "im": _dec(x.imag, digits)}
    return mpmath.nstr(mpmath.mpf(x), digits, strip_zeros=False, min_fixed=-30, max_fixed=30)


def _frac_str(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ------------------------------------------------------------ handlers


def cmd_kn(args):
    from .numtheory import smallest_k

    rec = smallest_k(args.n)
    return {"n": args.n, "k": rec.k, "p": rec.p}


def cmd_nk_list(args):
    from .numtheory import count_Nk_vs_asymptotic, enumerate_Nk

    members = enumerate_Nk(args.k, args.max)
    out = {"k": args.k, "X": args.max, "count": len(members), "members": members}
    if args.asymptotic:
        count, main = count_Nk_vs_asymptotic(args.k, args.max)
        out["mainterm"] = _dec(main, 12)
    return out


def cmd_period(args):
    from .gaussperiod import gauss_period

    data = gauss_period(args.n, args.precision)
    digits = max(6, int(args.precision * 0.30103) - 2)
    return {"n": args.n, "k": data.k, "p": data.p, "precision": args.precision,
            "conjugates": [_dec(z.real, digits) for z in data.conjugates]}


def cmd_minpoly(args):
    from .gaussperiod import minimal_polynomial_gauss

    return {"n": args.n, "coeffs": [str(c) for c in minimal_polynomial_gauss(args.n, args.precision)],
            "order": "low-to-high"}


def cmd_mahler_alpha(args):
    from .gaussperiod import mahler_alpha

    val, err = mahler_alpha(args.n, args.precision)
    digits = max(6, int(args.precision * 0.30103) - 4)
    with mpmath.workprec(args.precision + 16):
        return {"n": args.n, "m": _dec(val, digits), "M": _dec(mpmath.exp(val), digits),
                "error_bound": mpmath.nstr(err, 3)}


def cmd_polytope(args):
    from .cyclogeom import cyclopolytope, is_centrally_symmetric, is_reflexive, polar_dual

    P = cyclopolytope(args.k)
    dual = polar_dual(P)
    return {
        "k": args.k,
        "dim": len(P.vertices[0]),
        "vertices": sorted([[_frac_str(x) for x in v] for v in P.vertices]),
        "dual_vertices": sorted([[_frac_str(x) for x in v] for v in dual.vertices]),
        "reflexive": is_reflexive(P),
        "centrally_symmetric": is_centrally_symmetric(P),
    }


def cmd_fk(args):
    from .cyclogeom import eval_at_signs, root_vectors, torus_point_check

    vecs = root_vectors(args.k)
    out = {"k": args.k, "exponents": [list(v) for v in vecs]}
    if args.at_minus_one:
        out["P_at_minus_one"] = eval_at_signs(args.k, -1, [-1] * len(vecs[0]))
    if args.torus:
        out["torus_point"] = torus_point_check(args.k)
    return out


def cmd_ct(args):
    from .constterms import constant_terms

    s = constant_terms(args.k, args.M, args.method)
    return {"k": args.k, "M": args.M, "method": s.method, "values": [str(v) for v in s.values]}


def cmd_bessel_check(args):
    from .constterms import bessel_egf_check, sd_bessel_check

    if args.sd is not None:
        ok, dev = sd_bessel_check(args.sd, args.M)
        out = {"S_d": args.sd, "M": args.M, "equal": ok, "max_deviation": str(dev)}
    else:
        ok, dev = bessel_egf_check(args.k, args.M)
        out = {"k": args.k, "M": args.M, "equal": ok, "max_deviation": str(dev)}
    if not ok:
        raise _Verification(out, "Bessel identity failed")
    return out


def cmd_density(args):
    from .density import rho, rho_grid

    if args.grid is None and args.x is None:
        raise DomainError("give --x or --grid")
    if args.grid is not None:
        a, b, n = args.grid
        g = rho_grid(args.k, a, b, n, args.method, args.digits, d=args.d, workers=args.threads,
                     kind=args.kind)
        if args.format == "tsv":
            return _Text(g.to_tsv())
        return {"k": args.k, "method": args.method, "digits": args.digits, "kind": args.kind,
                "singular_abscissae": [_frac_str(x) for x in g.flagged],
                "mass": _dec(g.mass, 12),
                "points": [[_dec(x, args.digits), _dec(v, args.digits)] for x, v in zip(g.xs, g.values)]}
    v = rho(args.k, args.x, args.method, args.digits, d=args.d)
    if args.format == "tsv":
        return _Text(f"{_dec(args.x, args.digits)}\t{_dec(v, args.digits)}\n")
    return {"k": args.k, "x": _frac_str(args.x), "method": args.method, "digits": args.digits,
            "value": _dec(v, args.digits)}


def cmd_mck(args):
    from .density import mahler_ck

    method = "ode-B" if args.method == "ode" else args.method
    res = mahler_ck(args.k, method, args.digits)
    out = res.to_json(args.k)
    if not args.timing:
        out.pop("runtime_ms")
    return out


def cmd_mck_asym(args):
    from .density import MAX_ORDER, mahler_ck_asymptotic

    order = MAX_ORDER if args.order is None else args.order
    v = mahler_ck_asymptotic(args.k, order, args.digits, args.basis)
    return {"k": args.k, "order": order, "basis": args.basis, "value": _dec(v, args.digits)}


def cmd_search(args):
    from .search import DEFAULT_MAX_CANDIDATES, SearchConfig, search_min

    if args.conductors in ("all", "tame-only"):
        conds = args.conductors
    else:
        try:
            conds = [int(c) for c in args.conductors.split(",")]
        except ValueError:
            raise DomainError("--conductors is all, tame-only or a comma-separated list")
    cfg = SearchConfig(
        q=args.q,
        B=args.B,
        conductors=conds,
        workers=args.threads,
        checkpoint=args.checkpoint,
        max_candidates=args.max_candidates or DEFAULT_MAX_CANDIDATES,
        override_guard=args.override_guard,
        inclusive=not args.strict,
    )

    def progress(rec):
        print(json.dumps({"conductor": rec["conductor"], "class_id": rec["class_id"],
                          "block_id": rec["block_id"], "tested": rec["candidates_tested"],
                          "accepted": len(rec["survivors"])}), file=sys.stderr, flush=True)

    rep = search_min(cfg, progress if args.progress else None).to_json()
    if not args.timing:
        rep.pop("runtime_ms")
    return rep


def cmd_selftest(args):
    from .goldens import CRITERIA, criterion_5, criterion_6, criterion_7

    runners = dict(CRITERIA)
    # the q = 5 search and the heaviest exact checks are left out of --quick
    runners[5] = lambda: criterion_5(include_q5=not args.quick)
    if args.quick:
        runners[6] = lambda: criterion_6(wasserstein_limit=120, lot_limit=500)
        runners[7] = lambda: criterion_7(egf_ks=(6, 10))
    only = set(args.only) if args.only else set(runners)
    lines, failed = [], 0
    for i in sorted(runners):
        if i not in only:
            continue
        for c in runners[i]():
            failed += not c.ok
            line = f"[{i}] {'PASS' if c.ok else 'FAIL'} {c.name}"
            if c.detail and (args.verbose or not c.ok):
                line += f" ({c.detail})"
            lines.append(line)
            print(line, file=sys.stderr, flush=True)
    text = "\n".join(lines) + f"\n{failed} failed\n"
    if failed:
        raise _Verification(_Text(text), f"{failed} golden checks failed")
    return _Text(text)


# ------------------------------------------------------------ plumbing


class _Text(str):
    """Output emitted verbatim rather than as JSON."""


class _Verification(Exception):
    exit_code = 3

    def __init__(self, payload, message):
        super().__init__(message)
        self.payload = payload


class _Parser(argparse.ArgumentParser):
    # usage errors are domain errors (exit 1); 2 is reserved for the resource guard
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="cyclomahler", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        sp.add_argument("--output", "-o", help="write the result here instead of stdout")
        sp.add_argument("--format", choices=("json", "tsv", "plain"), default="json")
        sp.add_argument("--threads", type=_positive, default=_default_threads(),
                        help=f"worker processes (default ${THREADS_ENV} or 1)")
        sp.add_argument("--timing", action="store_true", help="include runtime_ms in the result")
        return sp

    sp = add("kn", cmd_kn, "smallest k with k n + 1 prime")
    sp.add_argument("--n", type=_positive, required=True)

    sp = add("nk-list", cmd_nk_list, "members of N_k up to X")
    sp.add_argument("--k", type=_positive, required=True)
    sp.add_argument("--max", type=_positive, required=True)
    sp.add_argument("--asymptotic", action="store_true")

    for name, func, text in (("period", cmd_period, "conjugates of the Gaussian period alpha_n"),
                             ("minpoly", cmd_minpoly, "exact minimal polynomial of alpha_n"),
                             ("mahler-alpha", cmd_mahler_alpha, "m(alpha_n) from the conjugates")):
        sp = add(name, func, text)
        sp.add_argument("--n", type=_positive, required=True)
        sp.add_argument("--precision", type=int, default=128, help="bits")

    sp = add("polytope", cmd_polytope, "cyclopolytope N_k and its dual")
    sp.add_argument("--k", type=int, required=True)

    sp = add("fk", cmd_fk, "exponent vectors of F_k")
    sp.add_argument("--k", type=_positive, required=True)
    sp.add_argument("--at-minus-one", action="store_true", help="also report P_k at x = -1")
    sp.add_argument("--torus", action="store_true", help="also run the real torus point check")

    sp = add("ct", cmd_ct, "constant terms CT[F_k^m], m <= M")
    sp.add_argument("--k", type=_positive, required=True)
    sp.add_argument("--M", type=int, required=True)
    sp.add_argument("--method", choices=("auto", "sparse", "egf"), default="auto")

    sp = add("bessel-check", cmd_bessel_check, "exact Bessel generating-function identity")
    sp.add_argument("--k", type=_positive)
    sp.add_argument("--sd", type=_positive, help="check E_{S_d} = I_0(2t)^d instead")
    sp.add_argument("--M", type=int, default=30)

    sp = add("density", cmd_density, "density rho_k at a point or on a grid")
    sp.add_argument("--k", type=_positive, required=True)
    sp.add_argument("--x", type=_rational)
    sp.add_argument("--grid", type=_grid, help="a:b:n, n cell midpoints of [a, b]")
    sp.add_argument("--kind", choices=("midpoint", "uniform", "tanh-sinh"), default="midpoint")
    sp.add_argument("--method", default="ode",
                    choices=("ode", "closed-form-k2", "half-normal", "half-normal-refined", "kluyver-Sd"))
    sp.add_argument("--d", type=_positive, help="d for kluyver-Sd")
    sp.add_argument("--digits", type=_digits, default=15)

    sp = add("mck", cmd_mck, "Mahler measure m(C_k)")
    sp.add_argument("--k", type=_positive, required=True)
    sp.add_argument("--method", default="ode-B",
                    choices=("ode", "ode-B", "closed-form", "kluyver-reduction", "convolution", "quadrature"))
    sp.add_argument("--digits", type=_digits, default=30)

    sp = add("mck-asym", cmd_mck_asym, "large-k expansion of m(C_k)")
    sp.add_argument("--k", type=_positive, required=True)
    sp.add_argument("--order", type=int)
    sp.add_argument("--basis", choices=("corrected", "printed"), default="corrected")
    sp.add_argument("--digits", type=_digits, default=20)

    sp = add("search", cmd_search, "minimal Mahler measure of cyclic degree-q integers")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--B", default="auto", help="bound, or 'auto' for M(alpha_q)")
    sp.add_argument("--conductors", default="all", help="all, tame-only or a comma-separated list")
    sp.add_argument("--checkpoint")
    sp.add_argument("--max-candidates", type=int)
    sp.add_argument("--override-guard", action="store_true")
    sp.add_argument("--strict", action="store_true", help="exclude polynomials with M(f) = B")
    sp.add_argument("--progress", action="store_true", help="per-unit progress on stderr")

    sp = add("selftest", cmd_selftest, "compare against the published reference values")
    sp.add_argument("--quick", action="store_true", help="skip the q=5 search and the heaviest checks")
    sp.add_argument("--only", type=int, nargs="+", choices=range(1, 10), help="criterion numbers")
    sp.add_argument("--verbose", action="store_true")
    return p


def _render(result, fmt):
    if isinstance(result, _Text):
        return str(result)
    if fmt == "plain":
        return "\n".join(f"{k}\t{json.dumps(v) if isinstance(v, (list, dict)) else v}"
                         for k, v in result.items()) + "\n"
    return json.dumps(result, separators=(",", ":")) + "\n"


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "density" and args.format == "tsv":
        parser.error("--format tsv is only available for density")
    t0 = time.perf_counter()
    try:
        result = args.func(args)
    except _Verification as exc:
        _emit(_render(exc.payload, args.format), args.output)
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        code = getattr(exc, "exit_code", None)
        if code is None:
            raise
        print(f"error: {exc}", file=sys.stderr)
        return code
    if args.timing:
        print(f"runtime_ms\t{(time.perf_counter() - t0) * 1000:.1f}", file=sys.stderr)
    _emit(_render(result, args.format), args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
