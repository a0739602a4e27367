"""Acceptance criteria, one test per criterion.

Each test prints one ``[PASS]``/``[FAIL]`` line per check so the outcome is
readable in the plain ``pytest -v`` log. Tolerances live with the checks in
``funnelkit.validation``; none are loosened here.
"""
import pytest

from funnelkit.validation import CRITERIA


@pytest.mark.parametrize("criterion", sorted(CRITERIA), ids=lambda k: f"C{k}")
def test_criterion(criterion, capsys):
    checks = CRITERIA[criterion]()
    with capsys.disabled():
        print()
        for c in checks:
            print(c.line())
    failed = [c.line() for c in checks if not c.passed]
    assert not failed, "\n".join(failed)
