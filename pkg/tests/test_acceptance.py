"""One test per acceptance criterion. Each prints a PASS/FAIL line (collected
in the terminal summary) and fails honestly when the criterion is not met."""

import pytest

from carleson.suites import run_suite

CRITERIA = [
    (1, "roberts-conservation", 120.0),
    (2, "lemma31-ratios", 60.0),
    (3, "thm12-slope", 180.0),
    (4, "pruned-sharpness", 60.0),
    (5, "cantor-invisibility", 60.0),
    (6, "pipelines", 180.0),
    (7, "restoring", 1.0),
    (8, "maximal", 5.0),
    (9, "inner-identities", 30.0),
    (10, "besov-area", 120.0),
]


@pytest.mark.parametrize("number,suite,limit", CRITERIA, ids=[f"criterion{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, suite, limit, acceptance_log):
    res = run_suite(suite)
    fast = res.seconds < limit
    ok = res.passed and fast
    failed = [c for c in res.checks if not c.passed]
    detail = "; ".join(f"{c.name}: {c.detail}" for c in (failed or res.checks))
    line = (f"criterion {number}: {'PASS' if ok else 'FAIL'} [{suite}] "
            f"{res.seconds:.1f}s (limit {limit:g}s) {detail}")
    acceptance_log.append(line)
    print(line)
    assert fast, f"runtime {res.seconds:.1f}s over {limit:g}s"
    assert res.passed, detail
