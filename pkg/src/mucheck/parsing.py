"""Shared lexer and data-term grammar for the textual input formats.

Terms (used inside .lpe conditions and the PBES debug dump):

    term    := imp
    imp     := disj ('=>' imp)?
    disj    := conj ('||' conj)*
    conj    := cmp ('&&' cmp)*
    cmp     := sum (('==' | '<' | '<=') sum)?
    sum     := atom (('+' | '-') atom)*
    atom    := NUMBER | 'true' | 'false' | IDENT | '!' atom | '(' term ')'

``a <= b`` is sugar for ``a < b + 1`` (naturals). Comments run from '%' to
end of line in every format.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional

from .kernel import BinOp, Const, Not, Sort, Term, Var, sort_of_term


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class SortError(ParseError):
    pass


class UnknownVariable(ParseError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "number", "punct", "eof"
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+|%[^\n]*)
    | (?P<number>\d+)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    | (?P<punct><=|==|=>|&&|\|\||->|[-+<>=!()\[\].,:;])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             line, pos - line_start + 1)
        col = m.start() - line_start + 1
        if m.lastgroup == "ws":
            line += m.group().count("\n")
            if "\n" in m.group():
                line_start = m.start() + m.group().rindex("\n") + 1
        elif m.lastgroup == "number":
            tokens.append(Token("number", m.group(), line, col))
        elif m.lastgroup == "ident":
            tokens.append(Token("ident", m.group(), line, col))
        else:
            tokens.append(Token("punct", m.group(), line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class TokenStream:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def error(self, message: str) -> ParseError:
        tok = self.current
        return ParseError(message, tok.line, tok.col)

    def check(self, text: str) -> bool:
        return self.current.text == text and self.current.kind != "eof"

    def accept(self, text: str) -> bool:
        if self.check(text):
            self.index += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.check(text):
            raise self.error(f"expected {text!r}, found {self.current.text!r}")
        tok = self.current
        self.index += 1
        return tok

    def expect_ident(self, what: str = "identifier") -> Token:
        if self.current.kind != "ident":
            raise self.error(f"expected {what}, found {self.current.text!r}")
        tok = self.current
        self.index += 1
        return tok

    def at_eof(self) -> bool:
        return self.current.kind == "eof"


def parse_sort(ts: TokenStream) -> Sort:
    tok = ts.expect_ident("sort name")
    if tok.text == "Bool":
        return Sort.BOOL
    if tok.text == "Nat":
        return Sort.NAT
    raise SortError(f"unknown sort {tok.text!r}", tok.line, tok.col)


# Variable scope: maps name -> Sort. Unknown identifiers are rejected here so
# parse errors point at the offending occurrence.
Scope = Callable[[str], Optional[Sort]]


def parse_term(ts: TokenStream, scope: Scope) -> Term:
    term = _parse_imp(ts, scope)
    _check_sorts(term, ts)
    return term


def _check_sorts(term: Term, ts: TokenStream) -> None:
    try:
        sort_of_term(term)
    except Exception as exc:
        tok = ts.current
        raise SortError(str(exc), tok.line, tok.col) from None


def _parse_imp(ts: TokenStream, scope: Scope) -> Term:
    left = _parse_disj(ts, scope)
    if ts.accept("=>"):
        return BinOp("=>", left, _parse_imp(ts, scope))
    return left


def _parse_disj(ts: TokenStream, scope: Scope) -> Term:
    term = _parse_conj(ts, scope)
    while ts.accept("||"):
        term = BinOp("||", term, _parse_conj(ts, scope))
    return term


def _parse_conj(ts: TokenStream, scope: Scope) -> Term:
    term = _parse_cmp(ts, scope)
    while ts.accept("&&"):
        term = BinOp("&&", term, _parse_cmp(ts, scope))
    return term


def _parse_cmp(ts: TokenStream, scope: Scope) -> Term:
    term = _parse_sum(ts, scope)
    if ts.accept("=="):
        return BinOp("==", term, _parse_sum(ts, scope))
    if ts.accept("<"):
        return BinOp("<", term, _parse_sum(ts, scope))
    if ts.accept("<="):
        right = _parse_sum(ts, scope)
        return BinOp("<", term, BinOp("+", right, Const(1)))
    return term


def _parse_sum(ts: TokenStream, scope: Scope) -> Term:
    term = _parse_atom(ts, scope)
    while True:
        if ts.accept("+"):
            term = BinOp("+", term, _parse_atom(ts, scope))
        elif ts.accept("-"):
            term = BinOp("-", term, _parse_atom(ts, scope))
        else:
            return term


def _parse_atom(ts: TokenStream, scope: Scope) -> Term:
    tok = ts.current
    if tok.kind == "number":
        ts.index += 1
        return Const(int(tok.text))
    if tok.text == "!":
        ts.index += 1
        return Not(_parse_atom(ts, scope))
    if ts.accept("("):
        term = _parse_imp(ts, scope)
        ts.expect(")")
        return term
    if tok.kind == "ident":
        ts.index += 1
        if tok.text == "true":
            return Const(True)
        if tok.text == "false":
            return Const(False)
        sort = scope(tok.text)
        if sort is None:
            raise UnknownVariable(f"unknown variable {tok.text!r}",
                                  tok.line, tok.col)
        return Var(tok.text, sort)
    raise ts.error(f"expected a term, found {tok.text!r}")
