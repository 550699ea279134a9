"""One PASS/FAIL line per acceptance criterion, each at its stated tolerance.

Failures here are reported as they are; see the decisions ledger for the analysis
of each known mismatch against the printed reference values.
"""

import time

import pytest

from cyclomahler.goldens import CRITERIA


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    t0 = time.perf_counter()
    checks = CRITERIA[number]()
    dt = time.perf_counter() - t0
    bad = [c for c in checks if not c.ok]
    verdict = "PASS" if not bad else "FAIL"
    summary = f"criterion {number}: {verdict} ({len(checks) - len(bad)}/{len(checks)} checks, {dt:.1f} s)"
    with capsys.disabled():
        print(f"\n{summary}")
        for c in bad:
            print(f"    failed: {c.name} ({c.detail})")
    assert not bad, "; ".join(f"{c.name}: {c.detail}" for c in bad)
