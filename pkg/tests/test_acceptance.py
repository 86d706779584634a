"""Runs every acceptance criterion at its stated tolerance, one test per criterion.

Each result line ("[PASS] C1 ...") is printed and also echoed in the
terminal summary.
"""

import pytest

from ceswit.acceptance import CRITERIA, SuiteConfig, run_criterion

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("key", list(CRITERIA))
def test_criterion(key):
    result = run_criterion(key, SuiteConfig())
    line = result.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    failing = {k: v for k, v in result.details.items() if isinstance(v, dict) and not v.get("ok", True)}
    assert result.passed, failing or result.details
