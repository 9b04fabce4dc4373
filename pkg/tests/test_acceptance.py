"""Acceptance suite: one test per criterion, each printing its pass/fail line."""
import pytest

from midspec.acceptance import CRITERIA


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{k}" for k in range(1, len(CRITERIA) + 1)])
def test_acceptance(criterion, capsys):
    result = criterion()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()
