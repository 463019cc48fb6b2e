"""Every acceptance criterion at its stated tolerance, one printed line each.

Run alone with ``python tests/test_acceptance.py`` for just the summary, or
through pytest, where each criterion is its own test.
"""
import sys

import pytest

from hardylab.acceptance import CRITERIA, run_all


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    result = CRITERIA[number]()
    with capsys.disabled():
        print("\n" + result.line)
    assert result.passed, result.detail


if __name__ == "__main__":
    results = run_all()
    for r in results:
        print(r.line)
    sys.exit(0 if all(r.passed for r in results) else 1)
