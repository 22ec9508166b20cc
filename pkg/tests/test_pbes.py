from __future__ import annotations

import random

import pytest

from mucheck.kernel import BoundExceeded, Const, DataEnvironment, Sort, Var
from mucheck.pbes import (
    Call,
    Equation,
    Exists,
    Instance,
    PAnd,
    PbesError,
    Pbes,
    PredicateEnvironment,
    Val,
    brute_force_solve,
    dump_pbes,
    eval_predicate_formula,
    fold_rhs,
    parse_pbes,
    pand,
    por,
    rank,
    ranks,
    simplify,
    substitute_data,
)
from oracles import alternation_ranks
from randgen import random_fixpoint_sequence

EXAMPLE_CORE = """
mu X(s: Nat) = (exists n: Nat . val(s == 1 && 0 < n && n < 3) && X(s + n))
            || (exists n: Nat . val(0 < n && n < s && s < 3) && X(s - n))
            || Y(s);
nu Y(s: Nat) = val(s == 3) && Y(s);
init X(1);
"""


@pytest.fixture(scope="module")
def core_pbes():
    return parse_pbes(EXAMPLE_CORE)


def test_rank_running_example(core_pbes):
    assert rank(core_pbes, "X") == 1
    assert rank(core_pbes, "Y") == 2


def test_rank_single_nu():
    p = parse_pbes("nu Z(d: Nat) = true;\ninit Z(0);")
    assert rank(p, "Z") == 0


def test_rank_alternation():
    p = parse_pbes(
        "mu A(d: Nat) = B(d);\nnu B(d: Nat) = C(d);\nmu C(d: Nat) = C(d);\ninit A(0);")
    assert [rank(p, v) for v in "ABC"] == [1, 2, 3]


def test_rank_random_against_alternation_count():
    rng = random.Random(23)
    for _ in range(100):
        fixes = random_fixpoint_sequence(rng)
        names = [f"V{i}" for i in range(len(fixes))]
        eqs = "\n".join(
            f"{fix} {name}(d: Nat) = {name}(d);" for fix, name in zip(fixes, names))
        p = parse_pbes(eqs + f"\ninit {names[0]}(0);")
        got = [rank(p, name) for name in names]
        assert got == alternation_ranks(fixes)
        # parity and monotonicity invariants
        for fix, r in zip(fixes, got):
            assert (r % 2 == 0) == (fix == "nu")
        assert got == sorted(got)


def test_rank_unknown_variable(core_pbes):
    with pytest.raises(Exception):
        rank(core_pbes, "nope")


def test_eval_formula_y_self_loop(core_pbes):
    rhs = core_pbes.equation_for("Y").rhs
    eta = PredicateEnvironment({Instance("Y", (3,)): True})
    assert eval_predicate_formula(rhs, eta, DataEnvironment.of(s=3)) is True
    assert eval_predicate_formula(rhs, eta, DataEnvironment.of(s=1)) is False


def test_eval_formula_witnessing_exists(core_pbes):
    rhs = core_pbes.equation_for("X").rhs
    eta = PredicateEnvironment({Instance("X", (3,)): True})
    assert eval_predicate_formula(rhs, eta, DataEnvironment.of(s=1)) is True


def test_eval_formula_unbounded_quantifier():
    p = parse_pbes("mu X(s: Nat) = exists n: Nat . X(n);\ninit X(0);")
    eta = PredicateEnvironment({}, default=False)
    with pytest.raises(BoundExceeded):
        eval_predicate_formula(p.equations[0].rhs, eta, DataEnvironment.of(s=0))


def test_brute_force_running_example(core_pbes):
    sol = brute_force_solve(core_pbes)
    expected = {
        Instance("X", (1,)): True,
        Instance("X", (2,)): True,
        Instance("X", (3,)): True,
        Instance("Y", (1,)): False,
        Instance("Y", (2,)): False,
        Instance("Y", (3,)): True,
    }
    assert dict(sol.assignment) == expected


def test_brute_force_trivial_nu():
    for init in range(4):
        p = parse_pbes(f"nu Z(d: Nat) = true;\ninit Z({init});")
        sol = brute_force_solve(p)
        assert sol.lookup(Instance("Z", (init,))) is True


def test_brute_force_identity_mu_is_false():
    for init in range(4):
        p = parse_pbes(f"mu Z(d: Nat) = Z(d);\ninit Z({init});")
        sol = brute_force_solve(p)
        assert sol.lookup(Instance("Z", (init,))) is False


def test_brute_force_alternating():
    # nu Y needs mu X to hold somewhere; classic alternation sanity check
    p = parse_pbes(
        "nu Y(s: Nat) = X(s);\n"
        "mu X(s: Nat) = val(s == 2) || (val(s < 2) && X(s + 1));\n"
        "init Y(0);")
    sol = brute_force_solve(p)
    assert sol.lookup(Instance("Y", (0,))) is True


def test_well_formedness_duplicate_equation():
    with pytest.raises(PbesError):
        parse_pbes("mu X(s: Nat) = X(s);\nmu X(s: Nat) = true;\ninit X(0);")


def test_closedness_unbound_call():
    with pytest.raises(PbesError):
        parse_pbes("mu X(s: Nat) = Y(s);\ninit X(0);")


def test_closedness_free_data_variable():
    eq = Equation("mu", "X", (("s", Sort.NAT),), Call("X", (Var("t", Sort.NAT),)))
    with pytest.raises(PbesError):
        Pbes((eq,), Instance("X", (0,)))


def test_init_must_match_sorts():
    with pytest.raises(Exception):
        parse_pbes("mu X(s: Nat) = true;\ninit X(true);")
    with pytest.raises(Exception):
        parse_pbes("mu X(s: Nat) = true;\ninit X(0, 1);")


def test_call_arity_checked():
    with pytest.raises(PbesError):
        parse_pbes("mu X(s: Nat) = X(s, s);\ninit X(0);")


def test_dump_parse_round_trip(core_pbes):
    assert parse_pbes(dump_pbes(core_pbes)) == core_pbes


def test_dump_parse_round_trip_multi_param():
    p = parse_pbes(
        "nu Z(d: Nat, b: Bool) = val(b) && Z(d + 1, b) || exists k: Nat . "
        "(val(k < 2) && Z(k, false));\ninit Z(0, true);")
    assert parse_pbes(dump_pbes(p)) == p


def test_smart_constructors_flatten_and_simplify():
    x = Call("X", (Var("s", Sort.NAT),))
    y = Call("Y", (Var("s", Sort.NAT),))
    nested = pand([x, pand([y, x])])
    assert isinstance(nested, PAnd) and len(nested.args) == 3
    assert pand([x, Val(Const(True))]) == x
    assert pand([x, Val(Const(False))]) == Val(Const(False))
    assert por([x, Val(Const(True))]) == Val(Const(True))
    assert por([Val(Const(False)), y]) == y


def test_simplify_folds_ground_atoms():
    p = parse_pbes("mu X(s: Nat) = val(1 < 2) && X(s) || val(2 < 1);\ninit X(0);")
    assert simplify(p.equations[0].rhs) == Call("X", (Var("s", Sort.NAT),))


def test_substitute_data_capture_avoidance():
    # substituting a term mentioning n under a binder of n must rename
    from mucheck.kernel import BinOp

    n = Var("n", Sort.NAT)
    s = Var("s", Sort.NAT)
    inner = Exists("n", Sort.NAT,
                   pand([Val(BinOp("==", s, n)), Call("X", (n,))]))
    out = substitute_data(inner, {"s": BinOp("+", n, Const(1))})
    assert isinstance(out, Exists)
    assert out.var != "n"
    # the free n of the replacement stays free
    from mucheck.pbes import free_data_vars

    assert "n" in free_data_vars(out)


def test_fold_rhs_collects_instances(core_pbes):
    rhs = core_pbes.equation_for("X").rhs
    expr = fold_rhs(rhs, {"s": 1}, Instance)
    from mucheck.pbes import lit_instances

    assert lit_instances(expr) == [Instance("X", (2,)), Instance("X", (3,)),
                                   Instance("Y", (1,))]
