"""Translation of a model-checking problem into an equation system that
carries enough bookkeeping to reconstruct evidence.

For every action label two extra predicate variables are introduced,
``Zp_<action>`` (nu, constantly true) and ``Zm_<action>`` (mu, constantly
false), each with two copies of the process parameter. A dependency on
``Zp_a(d, d')`` in a proof graph marks the a-transition d -> d' as part of a
witness; ``Zm_a`` plays the dual role in refutations. The Z equations are
grouped at the end of the system: first the nu-block, then the mu-block.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .formula import (
    Box,
    BoolConst,
    Diamond,
    FAnd,
    FixVar,
    Fixpoint,
    FOr,
    MuFormula,
    bound_vars_in_order,
    rename_binders,
)
from .kernel import Const, Not, Sort, Value, Var, value_sort
from .model import Lpe, Summand
from .pbes import (
    Call,
    Equation,
    Instance,
    PF_FALSE,
    PF_TRUE,
    Pbes,
    PredicateFormula,
    Val,
    exists,
    forall,
    is_false,
    is_true,
    pand,
    por,
    substitute_calls,
    substitute_data,
)


class EncodeError(ValueError):
    pass


class ActionNotInAlphabet(EncodeError):
    def __init__(self, action: str):
        super().__init__(f"modality action {action!r} is not in the process alphabet")
        self.action = action


class ShapeError(EncodeError):
    """The PBES does not have the E_L Z+ Z- block shape of the encoder."""


ZPLUS_PREFIX = "Zp_"
ZMINUS_PREFIX = "Zm_"


@dataclass(frozen=True)
class EvidenceVariables:
    """Per-action bookkeeping variables Z+ and Z-."""

    plus: Mapping[str, str]   # action -> variable name
    minus: Mapping[str, str]

    @staticmethod
    def for_alphabet(alphabet: tuple[str, ...]) -> "EvidenceVariables":
        return EvidenceVariables(
            {a: ZPLUS_PREFIX + a for a in alphabet},
            {a: ZMINUS_PREFIX + a for a in alphabet},
        )

    @property
    def all_names(self) -> frozenset[str]:
        return frozenset(self.plus.values()) | frozenset(self.minus.values())


def is_evidence_variable(name: str) -> bool:
    return name.startswith(ZPLUS_PREFIX) or name.startswith(ZMINUS_PREFIX)


def evidence_polarity(name: str) -> Optional[str]:
    """'plus' / 'minus' for Z variables, None otherwise."""
    if name.startswith(ZPLUS_PREFIX):
        return "plus"
    if name.startswith(ZMINUS_PREFIX):
        return "minus"
    return None


def evidence_action(name: str) -> str:
    if name.startswith(ZPLUS_PREFIX):
        return name[len(ZPLUS_PREFIX):]
    if name.startswith(ZMINUS_PREFIX):
        return name[len(ZMINUS_PREFIX):]
    raise ShapeError(f"{name!r} is not an evidence variable")


def encode_with_evidence(lpe: Lpe, phi: MuFormula, init: Value) -> Pbes:
    """Encode "the process from ``init`` satisfies ``phi``" with evidence
    bookkeeping.

    The equations for the formula binders come first, in binder order, then
    the Z+ equations, then the Z- equations; the initial instance applies the
    outermost binder to the initial state. Formulas whose root is not a
    fixpoint are wrapped in a fresh greatest fixpoint first.
    """
    pname, psort = lpe.parameter
    if value_sort(init) is not psort:
        raise EncodeError(f"initial state {init!r} must have sort {psort}")

    phi = _wrap_in_fixpoint(phi)
    phi = _avoid_reserved_names(phi)
    binders = bound_vars_in_order(phi)
    zvars = EvidenceVariables.for_alphabet(lpe.alphabet)
    d_l = Var(pname, psort)

    bodies: dict[str, MuFormula] = {}
    _collect_bodies(phi, bodies)

    equations = [
        Equation(op, var, ((pname, psort),),
                 _rhs(bodies[var], lpe, d_l, zvars))
        for op, var in binders
    ]
    second = pname + "1"
    while second == pname:
        second += "1"
    zparams = ((pname, psort), (second, psort))
    for action in lpe.alphabet:
        equations.append(Equation("nu", zvars.plus[action], zparams, PF_TRUE))
    for action in lpe.alphabet:
        equations.append(Equation("mu", zvars.minus[action], zparams, PF_FALSE))

    top = binders[0][1]
    return Pbes(tuple(equations), Instance(top, (init,)))


def _wrap_in_fixpoint(phi: MuFormula) -> MuFormula:
    if isinstance(phi, Fixpoint):
        return phi
    taken = {var for _, var in bound_vars_in_order(phi)}
    fresh = "T"
    suffix = 0
    while fresh in taken:
        suffix += 1
        fresh = f"T_{suffix}"
    return Fixpoint("nu", fresh, phi)


def _avoid_reserved_names(phi: MuFormula) -> MuFormula:
    binders = bound_vars_in_order(phi)
    taken = {var for _, var in binders}
    mapping: dict[str, str] = {}
    for _, var in binders:
        if is_evidence_variable(var):
            # move the binder out of the reserved namespace entirely
            fresh = "Q_" + var
            suffix = 0
            while fresh in taken or is_evidence_variable(fresh):
                suffix += 1
                fresh = f"Q{suffix}_{var}"
            taken.add(fresh)
            mapping[var] = fresh
    return rename_binders(phi, mapping) if mapping else phi


def _collect_bodies(phi: MuFormula, out: dict[str, MuFormula]) -> None:
    if isinstance(phi, Fixpoint):
        out[phi.var] = phi.body
        _collect_bodies(phi.body, out)
    elif isinstance(phi, (FAnd, FOr)):
        _collect_bodies(phi.left, out)
        _collect_bodies(phi.right, out)
    elif isinstance(phi, (Box, Diamond)):
        _collect_bodies(phi.body, out)


def _rhs(phi: MuFormula, lpe: Lpe, d_l: Var,
         zvars: EvidenceVariables) -> PredicateFormula:
    if isinstance(phi, BoolConst):
        return PF_TRUE if phi.value else PF_FALSE
    if isinstance(phi, FixVar):
        return Call(phi.name, (d_l,))
    if isinstance(phi, Fixpoint):
        return Call(phi.var, (d_l,))
    if isinstance(phi, FAnd):
        return pand([_rhs(phi.left, lpe, d_l, zvars),
                     _rhs(phi.right, lpe, d_l, zvars)])
    if isinstance(phi, FOr):
        return por([_rhs(phi.left, lpe, d_l, zvars),
                    _rhs(phi.right, lpe, d_l, zvars)])
    if isinstance(phi, (Diamond, Box)):
        try:
            sm = lpe.summand_for(phi.action)
        except KeyError:
            raise ActionNotInAlphabet(phi.action) from None
        inner = _rhs(phi.body, lpe, d_l, zvars)
        inner_next = substitute_data(inner, {d_l.name: sm.next_state})
        zp = Call(zvars.plus[phi.action], (d_l, sm.next_state))
        zm = Call(zvars.minus[phi.action], (d_l, sm.next_state))
        if isinstance(phi, Diamond):
            body = pand([Val(sm.condition), por([inner_next, zm]), zp])
            if sm.local_var is None:
                return body
            return exists(sm.local_var[0], sm.local_var[1], body)
        body = por([Val(Not(sm.condition)), pand([inner_next, zp]), zm])
        if sm.local_var is None:
            return body
        return forall(sm.local_var[0], sm.local_var[1], body)
    raise TypeError(f"unknown formula node {phi!r}")


# ---------------------------------------------------------------------------
# core(E) and the polarity strip


def split_evidence_blocks(p: Pbes) -> tuple[tuple[Equation, ...], tuple[Equation, ...], tuple[Equation, ...]]:
    """Split into (E_L, Z+ block, Z- block); ShapeError if the trailing
    blocks are missing or malformed."""
    eqs = list(p.equations)
    i = len(eqs)
    while i > 0 and _is_z_equation(eqs[i - 1], "mu"):
        i -= 1
    zminus = tuple(eqs[i:])
    j = i
    while j > 0 and _is_z_equation(eqs[j - 1], "nu"):
        j -= 1
    zplus = tuple(eqs[j:i])
    core = tuple(eqs[:j])
    for eq in core:
        if is_evidence_variable(eq.var):
            raise ShapeError(
                f"evidence equation {eq.var!r} is not in a trailing Z block")
    plus_actions = [evidence_action(eq.var) for eq in zplus]
    minus_actions = [evidence_action(eq.var) for eq in zminus]
    if sorted(plus_actions) != sorted(minus_actions):
        raise ShapeError("Z+ and Z- blocks cover different action sets")
    return core, zplus, zminus


def _is_z_equation(eq: Equation, fix: str) -> bool:
    if eq.fix != fix or len(eq.params) != 2:
        return False
    if fix == "nu":
        return eq.var.startswith(ZPLUS_PREFIX) and is_true(eq.rhs)
    return eq.var.startswith(ZMINUS_PREFIX) and is_false(eq.rhs)


def evidence_variables_of(p: Pbes) -> EvidenceVariables:
    _, zplus, zminus = split_evidence_blocks(p)
    return EvidenceVariables(
        {evidence_action(eq.var): eq.var for eq in zplus},
        {evidence_action(eq.var): eq.var for eq in zminus},
    )


def core_of(p: Pbes) -> Pbes:
    """Replace Z+ by true and Z- by false throughout E_L and simplify.

    This is the plain model-checking encoding; the Z equations themselves
    are retained verbatim.
    """
    core, zplus, zminus = split_evidence_blocks(p)
    subs = {eq.var: (tuple(n for n, _ in eq.params), PF_TRUE) for eq in zplus}
    subs.update(
        {eq.var: (tuple(n for n, _ in eq.params), PF_FALSE) for eq in zminus})
    rewritten = tuple(
        Equation(eq.fix, eq.var, eq.params, substitute_calls(eq.rhs, subs))
        for eq in core)
    return Pbes(rewritten + zplus + zminus, p.init)


def strip_for_polarity(p: Pbes, solution_is_true: bool) -> Pbes:
    """Drop the evidence variables of the side that is no longer needed.

    If the solution is true only witness bookkeeping (Z+) is relevant, so
    Z- is substituted by false; dually for a false solution Z+ := true.
    """
    core, zplus, zminus = split_evidence_blocks(p)
    if solution_is_true:
        subs = {eq.var: (tuple(n for n, _ in eq.params), PF_FALSE) for eq in zminus}
    else:
        subs = {eq.var: (tuple(n for n, _ in eq.params), PF_TRUE) for eq in zplus}
    rewritten = tuple(
        Equation(eq.fix, eq.var, eq.params, substitute_calls(eq.rhs, subs))
        for eq in core)
    return Pbes(rewritten + zplus + zminus, p.init)
