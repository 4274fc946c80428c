"""End-to-end verification of every desk-scale criterion.

One test per criterion; each prints its pass/fail line with the observed
values and the stated tolerance.  The same registry backs the CLI
``verify`` subcommand.
"""

import pytest

from jacobispec.verify import CHECKS, run_check


@pytest.mark.parametrize("name", [name for name, _ in CHECKS])
def test_criterion(name):
    result = run_check(name)
    print(result.line())
    assert result.passed, result.line()
