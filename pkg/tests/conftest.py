from __future__ import annotations

import pytest

from mucheck.formula import parse_formula
from mucheck.model import parse_lpe


def running_example_source(m: int) -> str:
    return f"""
% one a-step from 1, b-steps back down, c-loop at the top
proc L(s : Nat) =
    sum n : Nat . (s == 1 && 0 < n && n < {m}) -> a . L(s + n)
  + sum n : Nat . (0 < n && n < s && s < {m}) -> b . L(s - n)
  + (s == {m}) -> c . L(s);
init L(1);
"""


RUNNING_FORMULA = "mu X . (<a> X || <b> X || nu Y . <c> Y)"


@pytest.fixture(scope="session")
def running_lpe():
    return parse_lpe(running_example_source(3))


@pytest.fixture(scope="session")
def running_formula():
    return parse_formula(RUNNING_FORMULA)


@pytest.fixture(scope="session")
def witness1000_lpe():
    return parse_lpe(running_example_source(1000))
