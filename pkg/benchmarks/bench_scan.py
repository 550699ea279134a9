"""Time the compiled and pure-Python lift scanners on the same block.

    python benchmarks/bench_scan.py [--q 7] [--conductor 43] [--lifts 20000]
"""

import argparse
import time

from cyclomahler import _scan_py
from cyclomahler.search import (
    _effective_bound,
    auto_bound,
    coefficient_windows,
    congruence_classes,
    prefilter_primes,
)

try:
    from cyclomahler import _scan
except ImportError:
    _scan = None


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return time.perf_counter() - t0, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--q", type=int, default=7)
    ap.add_argument("--conductor", type=int, default=43)
    ap.add_argument("--lifts", type=int, default=20000)
    args = ap.parse_args()

    B = _effective_bound(auto_bound(args.q), True)
    cls = congruence_classes(args.q, args.conductor, B)[0]
    starts, steps, counts = coefficient_windows(args.q, cls.modulus, cls.residues, B)
    total = 1
    for c in counts:
        total *= c
    n = min(args.lifts, total)
    primes = prefilter_primes(args.q, args.conductor)
    call = (starts, steps, counts, 0, n, args.q, primes)

    t_py, (_, surv_py) = timed(_scan_py.scan_block, *call)
    print(f"q={args.q} conductor={args.conductor} class={cls.class_id} lifts={n} primes={primes}")
    print(f"python  {t_py:8.3f} s  {n / t_py:12.0f} lifts/s  survivors {len(surv_py)}")
    if _scan is None:
        print("compiled scanner not built")
        return
    t_c, (_, surv_c) = timed(_scan.scan_block, *call)
    print(f"cython  {t_c:8.3f} s  {n / t_c:12.0f} lifts/s  survivors {len(surv_c)}")
    print(f"speedup {t_py / t_c:.1f}x, identical output: {list(surv_py) == list(surv_c)}")


if __name__ == "__main__":
    main()
