"""The twelve acceptance criteria at their stated tolerances.

Each test prints one PASS/FAIL line (visible with ``pytest -s`` or ``-v``)
followed by the measured details, then asserts the criterion and, where
one is stated, its runtime budget.
"""

import pytest

from goursat.acceptance import DEFAULT_SEED, RUNNERS

# wall-time budgets in seconds
RUNTIME = {"AC1": 1.0, "AC2": 10.0, "AC4": 120.0, "AC6": 30.0}


@pytest.mark.slow
@pytest.mark.parametrize("ident", list(RUNNERS))
def test_acceptance(ident, capsys):
    res = RUNNERS[ident](seed=DEFAULT_SEED)
    with capsys.disabled():
        print()
        print(res.line())
        for d in res.details:
            print(f"    {d}")
    assert res.passed, res.line()
    if ident in RUNTIME:
        assert res.runtime < RUNTIME[ident], f"{ident} took {res.runtime:.1f}s"
