from __future__ import annotations

import random

import pytest

from mucheck.kernel import (
    BinOp,
    BoundExceeded,
    Const,
    DataEnvironment,
    Not,
    Sort,
    SortMismatch,
    Term,
    UnboundVariable,
    Var,
    enumerate_sort,
    eval_term,
    format_term,
    free_vars,
    partial_eval,
    sort_of_term,
    upper_bound_false,
    upper_bound_true,
    Bounds,
)
from mucheck.parsing import TokenStream, parse_term


def term(text: str, **sorts: Sort) -> Term:
    ts = TokenStream(text)
    t = parse_term(ts, lambda name: sorts.get(name))
    assert ts.at_eof()
    return t


S = dict(s=Sort.NAT, n=Sort.NAT, b=Sort.BOOL)


def test_equality_reflexive():
    assert eval_term(term("s == 1", **S), DataEnvironment.of(s=1)) is True


def test_guard_of_first_summand_admits_two():
    t = term("0 < n && n < 3", **S)
    assert eval_term(t, DataEnvironment.of(n=2)) is True
    assert eval_term(t, DataEnvironment.of(n=0)) is False
    assert eval_term(t, DataEnvironment.of(n=3)) is False


def test_truncating_minus_small_case():
    assert eval_term(term("s - n", **S), DataEnvironment.of(s=1, n=2)) == 0


def test_truncating_minus_against_enumeration():
    t = term("s - n", **S)
    for s in range(6):
        for n in range(6):
            assert eval_term(t, DataEnvironment.of(s=s, n=n)) == max(0, s - n)


def test_truncating_minus_exhaustive_to_twenty():
    t = term("s - n", **S)
    for a in range(21):
        for b in range(21):
            assert eval_term(t, DataEnvironment.of(s=a, n=b)) == max(0, a - b)


def test_update_lookup():
    env = DataEnvironment.empty().update("s", 1)
    assert env.lookup("s") == 1


def test_update_overwrites():
    env = DataEnvironment.of(s=1).update("s", 3)
    assert env.lookup("s") == 3


def test_update_does_not_interfere():
    env = DataEnvironment.of(s=1)
    updated = env.update("n", 2)
    assert updated.lookup("s") == 1
    assert updated.lookup("n") == 2
    # the original environment is unchanged
    assert "n" not in env


def test_eval_ignores_unrelated_updates():
    rng = random.Random(7)
    t = term("s == 1 && 0 < n && n < 3 || s - n < 2", **S)
    for _ in range(50):
        env = DataEnvironment.of(s=rng.randint(0, 5), n=rng.randint(0, 5))
        base = eval_term(t, env)
        assert eval_term(t, env.update("zzz", rng.randint(0, 9))) == base


def test_eval_deterministic():
    t = term("(s + n) - 2 == s || !(n < s)", **S)
    env = DataEnvironment.of(s=3, n=2)
    assert all(eval_term(t, env) == eval_term(t, env) for _ in range(5))


def test_unbound_variable():
    with pytest.raises(UnboundVariable):
        eval_term(term("s + 1", **S), DataEnvironment.empty())


def test_sort_mismatch_rejected():
    with pytest.raises(SortMismatch):
        sort_of_term(BinOp("+", Const(1), Const(True)))
    with pytest.raises(SortMismatch):
        sort_of_term(BinOp("==", Var("s", Sort.NAT), Var("b", Sort.BOOL)))
    with pytest.raises(SortMismatch):
        sort_of_term(Not(Const(2)))


def test_free_vars():
    assert free_vars(term("s + n", **S)) == {"s", "n"}
    assert free_vars(term("true")) == frozenset()
    assert free_vars(term("s == 1 && 0 < n", **S)) == {"s", "n"}


def test_partial_eval_folds_constants():
    t = term("s == 1 && 0 < n && n < 3", **S)
    assert partial_eval(t, {"s": 2}) == Const(False)
    folded = partial_eval(t, {"s": 1})
    assert free_vars(folded) == {"n"}
    assert eval_term(folded, DataEnvironment.of(n=2)) is True


def test_upper_bounds():
    assert upper_bound_false(term("n < 3", **S), "n") == 2
    assert upper_bound_false(term("0 < n && n < 3", **S), "n") == 2
    assert upper_bound_false(term("n == 5", **S), "n") == 5
    assert upper_bound_false(term("n == 2 || n < 4", **S), "n") == 3
    assert upper_bound_false(term("0 < n", **S), "n") is None
    assert upper_bound_true(term("2 < n", **S), "n") == 2
    assert upper_bound_true(term("n < 3 => n == 1", **S), "n") == 2


def test_le_is_sugar_for_strict_bound():
    t = term("n <= 4", **S)
    assert eval_term(t, DataEnvironment.of(n=4)) is True
    assert eval_term(t, DataEnvironment.of(n=5)) is False
    assert upper_bound_false(partial_eval(t, {}), "n") == 4


def test_enumerate_sort():
    assert list(enumerate_sort(Sort.BOOL, None, Bounds(), "t")) == [False, True]
    assert list(enumerate_sort(Sort.NAT, 3, Bounds(), "t")) == [0, 1, 2, 3]
    with pytest.raises(BoundExceeded):
        list(enumerate_sort(Sort.NAT, None, Bounds(), "t"))
    with pytest.raises(BoundExceeded):
        list(enumerate_sort(Sort.NAT, 50, Bounds(quantifier_cap=10), "t"))


def test_format_term_round_trips():
    rng = random.Random(3)
    for _ in range(200):
        t = _random_term(rng, 3, Sort.BOOL)
        again = term(format_term(t), **S)
        env = DataEnvironment.of(s=rng.randint(0, 4), n=rng.randint(0, 4),
                                 b=bool(rng.getrandbits(1)))
        assert eval_term(t, env) == eval_term(again, env)


def _random_term(rng: random.Random, depth: int, sort: Sort) -> Term:
    if depth == 0 or rng.random() < 0.3:
        if sort is Sort.NAT:
            return rng.choice([Const(rng.randint(0, 4)), Var("s", Sort.NAT),
                               Var("n", Sort.NAT)])
        return rng.choice([Const(bool(rng.getrandbits(1))), Var("b", Sort.BOOL)])
    if sort is Sort.NAT:
        op = rng.choice(["+", "-"])
        return BinOp(op, _random_term(rng, depth - 1, Sort.NAT),
                     _random_term(rng, depth - 1, Sort.NAT))
    roll = rng.random()
    if roll < 0.25:
        op = rng.choice(["==", "<"])
        return BinOp(op, _random_term(rng, depth - 1, Sort.NAT),
                     _random_term(rng, depth - 1, Sort.NAT))
    if roll < 0.4:
        return Not(_random_term(rng, depth - 1, Sort.BOOL))
    op = rng.choice(["&&", "||", "=>"])
    return BinOp(op, _random_term(rng, depth - 1, Sort.BOOL),
                 _random_term(rng, depth - 1, Sort.BOOL))
