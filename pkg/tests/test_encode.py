from __future__ import annotations

import random

import pytest

from conftest import running_example_source
from mucheck.encode import (
    ActionNotInAlphabet,
    ShapeError,
    core_of,
    encode_with_evidence,
    evidence_variables_of,
    split_evidence_blocks,
    strip_for_polarity,
)
from mucheck.formula import parse_formula
from mucheck.model import parse_lpe
from mucheck.pbes import Instance, brute_force_solve, parse_pbes, ranks
from randgen import random_problem

EXAMPLE_EVIDENCE_PBES = """
mu X(s: Nat) = (exists n: Nat . val(s == 1 && 0 < n && n < 3)
                && (X(s + n) || Zm_a(s, s + n)) && Zp_a(s, s + n))
            || (exists n: Nat . val(0 < n && n < s && s < 3)
                && (X(s - n) || Zm_b(s, s - n)) && Zp_b(s, s - n))
            || Y(s);
nu Y(s: Nat) = val(s == 3) && (Y(s) || Zm_c(s, s)) && Zp_c(s, s);
nu Zp_a(s: Nat, s1: Nat) = true;
nu Zp_b(s: Nat, s1: Nat) = true;
nu Zp_c(s: Nat, s1: Nat) = true;
mu Zm_a(s: Nat, s1: Nat) = false;
mu Zm_b(s: Nat, s1: Nat) = false;
mu Zm_c(s: Nat, s1: Nat) = false;
init X(1);
"""

EXAMPLE_CORE_PBES = """
mu X(s: Nat) = (exists n: Nat . val(s == 1 && 0 < n && n < 3) && X(s + n))
            || (exists n: Nat . val(0 < n && n < s && s < 3) && X(s - n))
            || Y(s);
nu Y(s: Nat) = val(s == 3) && Y(s);
nu Zp_a(s: Nat, s1: Nat) = true;
nu Zp_b(s: Nat, s1: Nat) = true;
nu Zp_c(s: Nat, s1: Nat) = true;
mu Zm_a(s: Nat, s1: Nat) = false;
mu Zm_b(s: Nat, s1: Nat) = false;
mu Zm_c(s: Nat, s1: Nat) = false;
init X(1);
"""

EXAMPLE_TRUE_PBES = """
mu X(s: Nat) = (exists n: Nat . val(s == 1 && 0 < n && n < 3) && X(s + n) && Zp_a(s, s + n))
            || (exists n: Nat . val(0 < n && n < s && s < 3) && X(s - n) && Zp_b(s, s - n))
            || Y(s);
nu Y(s: Nat) = val(s == 3) && Y(s) && Zp_c(s, s);
nu Zp_a(s: Nat, s1: Nat) = true;
nu Zp_b(s: Nat, s1: Nat) = true;
nu Zp_c(s: Nat, s1: Nat) = true;
mu Zm_a(s: Nat, s1: Nat) = false;
mu Zm_b(s: Nat, s1: Nat) = false;
mu Zm_c(s: Nat, s1: Nat) = false;
init X(1);
"""


@pytest.fixture(scope="module")
def encoded(running_lpe, running_formula):
    return encode_with_evidence(running_lpe, running_formula, 1)


def test_encode_running_example_exactly(encoded):
    assert encoded == parse_pbes(EXAMPLE_EVIDENCE_PBES)


def test_encode_shape_and_ranks(encoded):
    core, zplus, zminus = split_evidence_blocks(encoded)
    assert [eq.var for eq in core] == ["X", "Y"]
    assert [eq.var for eq in zplus] == ["Zp_a", "Zp_b", "Zp_c"]
    assert [eq.var for eq in zminus] == ["Zm_a", "Zm_b", "Zm_c"]
    r = ranks(encoded)
    assert all(r[eq.var] % 2 == 0 for eq in zplus)
    assert all(r[eq.var] % 2 == 1 for eq in zminus)
    assert max(r[eq.var] for eq in core) <= min(r[eq.var] for eq in zplus + zminus)


def test_encode_initial_instance(encoded):
    assert encoded.init == Instance("X", (1,))


def test_core_of_equals_plain_encoding(encoded):
    assert core_of(encoded) == parse_pbes(EXAMPLE_CORE_PBES)


def test_strip_true_equals_witness_only_encoding(encoded):
    assert strip_for_polarity(encoded, True) == parse_pbes(EXAMPLE_TRUE_PBES)


def test_strip_both_sides_is_core(encoded):
    assert strip_for_polarity(strip_for_polarity(encoded, True), False) == core_of(encoded)
    assert strip_for_polarity(strip_for_polarity(encoded, False), True) == core_of(encoded)


def test_core_of_untouched_without_z_occurrences():
    p = parse_pbes(
        "mu X(s: Nat) = X(s);\n"
        "nu Zp_a(s: Nat, s1: Nat) = true;\n"
        "mu Zm_a(s: Nat, s1: Nat) = false;\n"
        "init X(0);")
    assert core_of(p) == p


def test_shape_error_without_blocks():
    with pytest.raises(ShapeError):
        core_of(parse_pbes("mu X(s: Nat) = Zp_a(s, s);\n"
                           "nu Zp_a(s: Nat, s1: Nat) = true;\n"
                           "nu X2(s: Nat) = true;\ninit X(0);"))


def test_box_modality_dual(running_lpe):
    phi = parse_formula("nu X . [a] X")
    p = encode_with_evidence(running_lpe, phi, 1)
    expected = parse_pbes(
        "nu X(s: Nat) = forall n: Nat . val(!(s == 1 && 0 < n && n < 3))\n"
        "            || X(s + n) && Zp_a(s, s + n) || Zm_a(s, s + n);\n"
        "nu Zp_a(s: Nat, s1: Nat) = true;\n"
        "nu Zp_b(s: Nat, s1: Nat) = true;\n"
        "nu Zp_c(s: Nat, s1: Nat) = true;\n"
        "mu Zm_a(s: Nat, s1: Nat) = false;\n"
        "mu Zm_b(s: Nat, s1: Nat) = false;\n"
        "mu Zm_c(s: Nat, s1: Nat) = false;\n"
        "init X(1);")
    assert p == expected


def test_constant_formula_is_wrapped(running_lpe):
    p = encode_with_evidence(running_lpe, parse_formula("true"), 1)
    core, zplus, zminus = split_evidence_blocks(p)
    assert len(core) == 1
    eq = core[0]
    assert eq.fix == "nu" and eq.params == (("s", pytest.importorskip("mucheck.kernel").Sort.NAT),)
    from mucheck.pbes import is_true

    assert is_true(eq.rhs)
    assert p.init == Instance(eq.var, (1,))
    assert len(zplus) == len(zminus) == 3


def test_action_not_in_alphabet(running_lpe):
    with pytest.raises(ActionNotInAlphabet):
        encode_with_evidence(running_lpe, parse_formula("mu X . <d> X"), 1)


def test_reserved_binder_names_are_renamed(running_lpe):
    phi = parse_formula("mu Zp_a . <a> Zp_a")
    p = encode_with_evidence(running_lpe, phi, 1)
    core, zplus, _ = split_evidence_blocks(p)
    assert len(core) == 1
    assert core[0].var != "Zp_a"
    assert any(eq.var == "Zp_a" for eq in zplus)


def test_nested_modalities_avoid_capture(running_lpe):
    # the inner summand variable must not capture the outer one through the
    # next-state substitution
    phi = parse_formula("mu X . <a> <a> X")
    p = encode_with_evidence(running_lpe, phi, 1)
    sol = brute_force_solve(core_of(p))
    # from 1: a to 2 or 3, but no a-transition from 2 or 3: formula is false
    assert sol.lookup(p.init) is False
    # sanity: one a-step alone is possible
    p1 = encode_with_evidence(running_lpe, parse_formula("mu X . <a> true"), 1)
    assert brute_force_solve(core_of(p1)).lookup(p1.init) is True


def test_evidence_variables_of(encoded):
    zv = evidence_variables_of(encoded)
    assert zv.plus == {"a": "Zp_a", "b": "Zp_b", "c": "Zp_c"}
    assert zv.minus == {"a": "Zm_a", "b": "Zm_b", "c": "Zm_c"}


def test_solution_preserved_by_core_and_strip_random():
    rng = random.Random(5)
    for _ in range(40):
        lpe, phi, init, encoded_p = random_problem(rng)
        full = brute_force_solve(encoded_p)
        core = brute_force_solve(core_of(encoded_p))
        verdict = full.lookup(encoded_p.init)
        assert core.lookup(encoded_p.init) == verdict
        stripped = brute_force_solve(strip_for_polarity(encoded_p, verdict))
        assert stripped.lookup(encoded_p.init) == verdict
        # agreement on every core-system instance both solvers computed
        el_vars = {eq.var for eq in split_evidence_blocks(encoded_p)[0]}
        for inst, value in core.assignment.items():
            if inst.var in el_vars and inst in full.assignment:
                assert full.assignment[inst] == value
