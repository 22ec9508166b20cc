"""Modal fixpoint formulas: AST, concrete syntax, well-formedness.

Grammar (fixpoints weakest, then ||, then &&; modalities bind tightest):

    phi := 'mu' X '.' phi | 'nu' X '.' phi
         | phi '||' phi | phi '&&' phi
         | '<' act '>' phi | '[' act ']' phi
         | 'true' | 'false' | X | '(' phi ')'

There is no negation, so every parsed formula is monotone by construction.
Parsing renames binders apart (globally unique names) and rejects formulas
with free fixpoint variables.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class MuFormula:
    pass


@dataclass(frozen=True)
class BoolConst(MuFormula):
    value: bool


@dataclass(frozen=True)
class FixVar(MuFormula):
    name: str


@dataclass(frozen=True)
class FAnd(MuFormula):
    left: MuFormula
    right: MuFormula


@dataclass(frozen=True)
class FOr(MuFormula):
    left: MuFormula
    right: MuFormula


@dataclass(frozen=True)
class Box(MuFormula):
    action: str
    body: MuFormula


@dataclass(frozen=True)
class Diamond(MuFormula):
    action: str
    body: MuFormula


@dataclass(frozen=True)
class Fixpoint(MuFormula):
    op: str  # "mu" | "nu"
    var: str
    body: MuFormula

    def __post_init__(self) -> None:
        assert self.op in ("mu", "nu")


class FormulaError(ValueError):
    pass


class OpenFormula(FormulaError):
    def __init__(self, name: str):
        super().__init__(f"free fixpoint variable {name!r}")
        self.name = name


def parse_formula(text: str) -> MuFormula:
    from .parsing import TokenStream

    ts = TokenStream(text)
    phi = _parse(ts, {})
    if not ts.at_eof():
        raise ts.error(f"unexpected trailing input {ts.current.text!r}")
    return phi


_KEYWORDS = {"mu", "nu", "true", "false"}


def _parse(ts, scope: dict[str, str], taken: set[str] | None = None) -> MuFormula:
    # scope maps source binder names to their renamed-apart versions; taken
    # accumulates every name used so far (for global uniqueness).
    if taken is None:
        taken = set(scope.values())
    return _parse_fix(ts, scope, taken)


def _parse_fix(ts, scope, taken) -> MuFormula:
    tok = ts.current
    if tok.text in ("mu", "nu"):
        ts.index += 1
        name_tok = ts.expect_ident("fixpoint variable")
        if name_tok.text in _KEYWORDS:
            raise ts.error(f"{name_tok.text!r} cannot name a fixpoint variable")
        ts.expect(".")
        fresh = name_tok.text
        suffix = 0
        while fresh in taken:
            suffix += 1
            fresh = f"{name_tok.text}_{suffix}"
        taken.add(fresh)
        inner_scope = dict(scope)
        inner_scope[name_tok.text] = fresh
        body = _parse_fix(ts, inner_scope, taken)
        return Fixpoint(tok.text, fresh, body)
    return _parse_or(ts, scope, taken)


def _parse_or(ts, scope, taken) -> MuFormula:
    phi = _parse_and(ts, scope, taken)
    while ts.accept("||"):
        if ts.current.text in ("mu", "nu"):
            # a trailing binder extends to the end of the disjunction
            return FOr(phi, _parse_fix(ts, scope, taken))
        phi = FOr(phi, _parse_and(ts, scope, taken))
    return phi


def _parse_and(ts, scope, taken) -> MuFormula:
    phi = _parse_modal(ts, scope, taken)
    while ts.accept("&&"):
        if ts.current.text in ("mu", "nu"):
            return FAnd(phi, _parse_fix(ts, scope, taken))
        phi = FAnd(phi, _parse_modal(ts, scope, taken))
    return phi


def _parse_modal(ts, scope, taken) -> MuFormula:
    if ts.accept("<"):
        action = ts.expect_ident("action label").text
        ts.expect(">")
        return Diamond(action, _parse_modal(ts, scope, taken))
    if ts.accept("["):
        action = ts.expect_ident("action label").text
        ts.expect("]")
        return Box(action, _parse_modal(ts, scope, taken))
    if ts.accept("("):
        phi = _parse_fix(ts, scope, taken)
        ts.expect(")")
        return phi
    tok = ts.current
    if tok.kind == "ident":
        ts.index += 1
        if tok.text == "true":
            return BoolConst(True)
        if tok.text == "false":
            return BoolConst(False)
        if tok.text in ("mu", "nu"):
            ts.index -= 1
            return _parse_fix(ts, scope, taken)
        if tok.text not in scope:
            raise OpenFormula(tok.text)
        return FixVar(scope[tok.text])
    raise ts.error(f"expected a formula, found {tok.text!r}")


def bound_vars_in_order(phi: MuFormula) -> list[tuple[str, str]]:
    """Binders as (op, name) pairs in left-to-right, outside-in order.

    This is the equation order of the translation to an equation system.
    """
    out: list[tuple[str, str]] = []
    _collect_binders(phi, out)
    return out


def _collect_binders(phi: MuFormula, out: list[tuple[str, str]]) -> None:
    if isinstance(phi, Fixpoint):
        out.append((phi.op, phi.var))
        _collect_binders(phi.body, out)
    elif isinstance(phi, (FAnd, FOr)):
        _collect_binders(phi.left, out)
        _collect_binders(phi.right, out)
    elif isinstance(phi, (Box, Diamond)):
        _collect_binders(phi.body, out)


def formula_actions(phi: MuFormula) -> set[str]:
    if isinstance(phi, (Box, Diamond)):
        return {phi.action} | formula_actions(phi.body)
    if isinstance(phi, (FAnd, FOr)):
        return formula_actions(phi.left) | formula_actions(phi.right)
    if isinstance(phi, Fixpoint):
        return formula_actions(phi.body)
    return set()


def rename_binders(phi: MuFormula, mapping: dict[str, str]) -> MuFormula:
    """Consistently rename (already rename-apart) binders and their uses."""
    if isinstance(phi, FixVar):
        return FixVar(mapping.get(phi.name, phi.name))
    if isinstance(phi, FAnd):
        return FAnd(rename_binders(phi.left, mapping), rename_binders(phi.right, mapping))
    if isinstance(phi, FOr):
        return FOr(rename_binders(phi.left, mapping), rename_binders(phi.right, mapping))
    if isinstance(phi, Box):
        return Box(phi.action, rename_binders(phi.body, mapping))
    if isinstance(phi, Diamond):
        return Diamond(phi.action, rename_binders(phi.body, mapping))
    if isinstance(phi, Fixpoint):
        return Fixpoint(phi.op, mapping.get(phi.var, phi.var),
                        rename_binders(phi.body, mapping))
    return phi


def format_formula(phi: MuFormula) -> str:
    return _fmt(phi, 0)


# precedence levels: 0 fixpoint, 1 ||, 2 &&, 3 modal/atom
def _fmt(phi: MuFormula, level: int) -> str:
    if isinstance(phi, BoolConst):
        return "true" if phi.value else "false"
    if isinstance(phi, FixVar):
        return phi.name
    if isinstance(phi, Fixpoint):
        inner = f"{phi.op} {phi.var} . {_fmt(phi.body, 0)}"
        return f"({inner})" if level > 0 else inner
    if isinstance(phi, FOr):
        inner = f"{_fmt(phi.left, 1)} || {_fmt(phi.right, 2)}"
        return f"({inner})" if level > 1 else inner
    if isinstance(phi, FAnd):
        inner = f"{_fmt(phi.left, 2)} && {_fmt(phi.right, 3)}"
        return f"({inner})" if level > 2 else inner
    if isinstance(phi, Diamond):
        return f"<{phi.action}> {_fmt(phi.body, 3)}"
    if isinstance(phi, Box):
        return f"[{phi.action}] {_fmt(phi.body, 3)}"
    raise TypeError(f"unknown formula node {phi!r}")
