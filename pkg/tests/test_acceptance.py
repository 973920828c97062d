"""The ten acceptance criteria on the full corpus (|E| <= 10 plus the named graphs).

Each test prints one PASS/FAIL line; the lines are repeated, in order, in the
terminal summary.
"""
from __future__ import annotations

import pytest

from conftest import ACCEPTANCE_LINES
from graphrigidity.verify import ACCEPTANCE

MAX_EDGES = 10
SEED = 0


@pytest.mark.slow
@pytest.mark.parametrize("criterion", sorted(ACCEPTANCE))
def test_acceptance(criterion, capsys):
    result = ACCEPTANCE[criterion](MAX_EDGES, SEED)
    line = result.line()
    ACCEPTANCE_LINES.append(line)
    with capsys.disabled():
        print(f"\n{line}")
    assert result.passed, line
