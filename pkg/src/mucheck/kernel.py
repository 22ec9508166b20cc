"""Data sorts, terms, values and environments shared by all other modules.

The data language is deliberately small: Booleans and natural numbers with
their usual operators. Subtraction on naturals truncates at zero, so every
operator is total on well-sorted arguments.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Mapping, Optional, Union


class Sort(Enum):
    BOOL = "Bool"
    NAT = "Nat"

    def __str__(self) -> str:
        return self.value


# bool carries Sort.BOOL, non-negative int carries Sort.NAT. bool is a
# subclass of int, so all sort dispatch must test bool first.
Value = Union[bool, int]


class KernelError(Exception):
    pass


class UnboundVariable(KernelError):
    def __init__(self, name: str):
        super().__init__(f"unbound variable {name!r}")
        self.name = name


class SortMismatch(KernelError):
    pass


class BoundExceeded(KernelError):
    """A quantifier or sum variable cannot be enumerated within bounds."""


class StateExplosion(KernelError):
    """State or vertex count exceeded the configured cap."""


@dataclass(frozen=True)
class Bounds:
    """Caps for quantifier enumeration and state/vertex exploration."""

    quantifier_cap: int = 10_000
    max_vertices: int = 10_000_000


DEFAULT_BOUNDS = Bounds()


def value_sort(v: Value) -> Sort:
    if isinstance(v, bool):
        return Sort.BOOL
    if isinstance(v, int):
        if v < 0:
            raise SortMismatch(f"natural value must be non-negative, got {v}")
        return Sort.NAT
    raise SortMismatch(f"not a value: {v!r}")


def check_value(v: Value, sort: Sort) -> Value:
    if value_sort(v) is not sort:
        raise SortMismatch(f"value {v!r} does not have sort {sort}")
    return v


def format_value(v: Value) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True, slots=True)
class Term:
    pass


@dataclass(frozen=True, slots=True)
class Const(Term):
    value: Value


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str
    sort: Sort


@dataclass(frozen=True, slots=True)
class BinOp(Term):
    # op is one of: "==", "<", "+", "-", "&&", "||", "=>"
    op: str
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Not(Term):
    operand: Term


TRUE = Const(True)
FALSE = Const(False)

_ARITH_OPS = {"+", "-"}
_COMPARE_OPS = {"==", "<"}
_LOGIC_OPS = {"&&", "||", "=>"}


def sort_of_term(t: Term) -> Sort:
    """Return the sort of ``t``, checking well-sortedness along the way."""
    if isinstance(t, Const):
        return value_sort(t.value)
    if isinstance(t, Var):
        return t.sort
    if isinstance(t, Not):
        if sort_of_term(t.operand) is not Sort.BOOL:
            raise SortMismatch("operand of ! must be Bool")
        return Sort.BOOL
    if isinstance(t, BinOp):
        ls, rs = sort_of_term(t.left), sort_of_term(t.right)
        if t.op in _ARITH_OPS:
            if ls is not Sort.NAT or rs is not Sort.NAT:
                raise SortMismatch(f"operands of {t.op} must be Nat")
            return Sort.NAT
        if t.op == "<":
            if ls is not Sort.NAT or rs is not Sort.NAT:
                raise SortMismatch("operands of < must be Nat")
            return Sort.BOOL
        if t.op == "==":
            if ls is not rs:
                raise SortMismatch("operands of == must share a sort")
            return Sort.BOOL
        if t.op in _LOGIC_OPS:
            if ls is not Sort.BOOL or rs is not Sort.BOOL:
                raise SortMismatch(f"operands of {t.op} must be Bool")
            return Sort.BOOL
    raise SortMismatch(f"unknown term {t!r}")


def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Const):
        return frozenset()
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Not):
        return free_vars(t.operand)
    if isinstance(t, BinOp):
        return free_vars(t.left) | free_vars(t.right)
    raise SortMismatch(f"unknown term {t!r}")


# ---------------------------------------------------------------------------
# Environments


@dataclass(frozen=True, slots=True)
class DataEnvironment:
    """Immutable map from variable names to values.

    ``update`` returns a fresh environment; sharing is always safe.
    """

    bindings: Mapping[str, Value]

    @staticmethod
    def empty() -> "DataEnvironment":
        return DataEnvironment({})

    @staticmethod
    def of(**kwargs: Value) -> "DataEnvironment":
        return DataEnvironment(dict(kwargs))

    def lookup(self, name: str) -> Value:
        try:
            return self.bindings[name]
        except KeyError:
            raise UnboundVariable(name) from None

    def update(self, name: str, v: Value) -> "DataEnvironment":
        fresh = dict(self.bindings)
        fresh[name] = v
        return DataEnvironment(fresh)

    def __contains__(self, name: str) -> bool:
        return name in self.bindings


# ---------------------------------------------------------------------------
# Evaluation


def eval_term(t: Term, env: DataEnvironment) -> Value:
    """Standard interpretation of a well-sorted term under ``env``."""
    return _eval(t, env.bindings)


def _eval(t: Term, b: Mapping[str, Value]) -> Value:
    if isinstance(t, Const):
        return t.value
    if isinstance(t, Var):
        try:
            return b[t.name]
        except KeyError:
            raise UnboundVariable(t.name) from None
    if isinstance(t, BinOp):
        op = t.op
        if op == "&&":
            return bool(_eval(t.left, b)) and bool(_eval(t.right, b))
        if op == "||":
            return bool(_eval(t.left, b)) or bool(_eval(t.right, b))
        if op == "=>":
            return (not _eval(t.left, b)) or bool(_eval(t.right, b))
        l = _eval(t.left, b)
        r = _eval(t.right, b)
        if op == "==":
            if isinstance(l, bool) is not isinstance(r, bool):
                raise SortMismatch("== applied to values of different sorts")
            return l == r
        if op == "<":
            return l < r
        if op == "+":
            return l + r
        if op == "-":
            # monus: naturals are closed under subtraction by truncation
            return l - r if l > r else 0
    if isinstance(t, Not):
        return not _eval(t.operand, b)
    raise SortMismatch(f"unknown term {t!r}")


def partial_eval(t: Term, b: Mapping[str, Value]) -> Term:
    """Substitute bound variables and fold constant subterms.

    Variables absent from ``b`` stay symbolic; logical operators
    short-circuit on constant operands.
    """
    if isinstance(t, Const):
        return t
    if isinstance(t, Var):
        v = b.get(t.name)
        return t if v is None else Const(v)
    if isinstance(t, Not):
        inner = partial_eval(t.operand, b)
        if isinstance(inner, Const):
            return Const(not inner.value)
        return Not(inner)
    if isinstance(t, BinOp):
        op = t.op
        left = partial_eval(t.left, b)
        right = partial_eval(t.right, b)
        lc = left.value if isinstance(left, Const) else None
        rc = right.value if isinstance(right, Const) else None
        if isinstance(left, Const) and isinstance(right, Const):
            return Const(_eval(BinOp(op, left, right), {}))
        if op == "&&":
            if lc is False or rc is False:
                return FALSE
            if lc is True:
                return right
            if rc is True:
                return left
        elif op == "||":
            if lc is True or rc is True:
                return TRUE
            if lc is False:
                return right
            if rc is False:
                return left
        elif op == "=>":
            if lc is False or rc is True:
                return TRUE
            if lc is True:
                return right
        return BinOp(op, left, right)
    raise SortMismatch(f"unknown term {t!r}")


def format_term(t: Term, level: int = 0) -> str:
    """Render a term in the concrete syntax accepted by the parsers.

    Levels: 0 =>, 1 ||, 2 &&, 3 comparison, 4 additive, 5 atom.
    """
    if isinstance(t, Const):
        return format_value(t.value)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Not):
        return f"!{format_term(t.operand, 5)}"
    if isinstance(t, BinOp):
        prec = {"=>": 0, "||": 1, "&&": 2, "==": 3, "<": 3, "+": 4, "-": 4}[t.op]
        if t.op == "=>":  # right-associative
            inner = f"{format_term(t.left, 1)} => {format_term(t.right, 0)}"
        elif t.op in ("==", "<"):  # non-associative
            inner = f"{format_term(t.left, 4)} {t.op} {format_term(t.right, 4)}"
        else:
            inner = f"{format_term(t.left, prec)} {t.op} {format_term(t.right, prec + 1)}"
        return f"({inner})" if level > prec else inner
    raise SortMismatch(f"unknown term {t!r}")


def substitute_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    """Simultaneous substitution of terms for variables."""
    if isinstance(t, Const):
        return t
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Not):
        return Not(substitute_term(t.operand, mapping))
    if isinstance(t, BinOp):
        return BinOp(t.op, substitute_term(t.left, mapping),
                     substitute_term(t.right, mapping))
    raise SortMismatch(f"unknown term {t!r}")


# ---------------------------------------------------------------------------
# Syntactic enumeration bounds
#
# A Nat variable can only be enumerated when the surrounding condition makes
# values beyond some bound irrelevant. upper_bound_false(t, x) returns the
# least B (syntactically derivable) such that t is false for every x > B;
# upper_bound_true is the dual. None means no bound was found.


def upper_bound_false(t: Term, var: str) -> Optional[int]:
    if isinstance(t, Const):
        return -1 if t.value is False else None
    if isinstance(t, Not):
        return upper_bound_true(t.operand, var)
    if isinstance(t, BinOp):
        op = t.op
        if op == "&&":
            bounds = [x for x in (upper_bound_false(t.left, var),
                                  upper_bound_false(t.right, var)) if x is not None]
            return min(bounds) if bounds else None
        if op == "||":
            bl = upper_bound_false(t.left, var)
            br = upper_bound_false(t.right, var)
            return max(bl, br) if bl is not None and br is not None else None
        if op == "=>":
            bl = upper_bound_true(t.left, var)
            br = upper_bound_false(t.right, var)
            return max(bl, br) if bl is not None and br is not None else None
        if op == "<":
            # x < c is false for x > c - 1
            if isinstance(t.left, Var) and t.left.name == var \
                    and isinstance(t.right, Const):
                return t.right.value - 1
        if op == "==":
            if isinstance(t.left, Var) and t.left.name == var \
                    and isinstance(t.right, Const) and not isinstance(t.right.value, bool):
                return t.right.value
            if isinstance(t.right, Var) and t.right.name == var \
                    and isinstance(t.left, Const) and not isinstance(t.left.value, bool):
                return t.left.value
    return None


def upper_bound_true(t: Term, var: str) -> Optional[int]:
    if isinstance(t, Const):
        return -1 if t.value is True else None
    if isinstance(t, Not):
        return upper_bound_false(t.operand, var)
    if isinstance(t, BinOp):
        op = t.op
        if op == "||":
            bounds = [x for x in (upper_bound_true(t.left, var),
                                  upper_bound_true(t.right, var)) if x is not None]
            return min(bounds) if bounds else None
        if op == "&&":
            bl = upper_bound_true(t.left, var)
            br = upper_bound_true(t.right, var)
            return max(bl, br) if bl is not None and br is not None else None
        if op == "=>":
            bl = upper_bound_false(t.left, var)
            br = upper_bound_true(t.right, var)
            return min(x for x in (bl, br) if x is not None) \
                if bl is not None or br is not None else None
        if op == "<":
            # c < x is true for x > c
            if isinstance(t.right, Var) and t.right.name == var \
                    and isinstance(t.left, Const):
                return t.left.value
    return None


def enumerate_sort(sort: Sort, bound: Optional[int], bounds: Bounds,
                   what: str) -> Iterator[Value]:
    """Yield the candidate values of a quantified variable.

    ``bound`` is the syntactic upper bound for Nat variables; enumeration
    refuses to run unbounded or past the configured cap.
    """
    if sort is Sort.BOOL:
        yield False
        yield True
        return
    if bound is None:
        raise BoundExceeded(
            f"{what}: no syntactic upper bound for Nat enumeration")
    if bound >= bounds.quantifier_cap:
        raise BoundExceeded(
            f"{what}: bound {bound} exceeds quantifier cap {bounds.quantifier_cap}")
    yield from range(bound + 1)
