"""Linear process equations, their textual format, and bounded LTS exploration.

The process shape is a single data parameter plus condition-action-effect
summands, one per action label. Multi-parameter processes must be tupled by
the user before they reach this module.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .kernel import (
    Bounds,
    Const,
    DEFAULT_BOUNDS,
    SortMismatch,
    StateExplosion,
    Sort,
    Term,
    Value,
    BinOp,
    Var,
    enumerate_sort,
    eval_term,
    DataEnvironment,
    free_vars,
    partial_eval,
    sort_of_term,
    upper_bound_false,
    value_sort,
)
from .parsing import ParseError, SortError, TokenStream, UnknownVariable, parse_sort, parse_term


@dataclass(frozen=True)
class Summand:
    """One condition-action-effect rule: if the condition holds for some
    value of the local variable, the action fires and the parameter is
    updated to the next-state term."""

    action: str
    local_var: Optional[tuple[str, Sort]]
    condition: Term
    next_state: Term


@dataclass(frozen=True)
class Lpe:
    parameter: tuple[str, Sort]
    summands: tuple[Summand, ...]
    init: Optional[Value] = None

    def __post_init__(self) -> None:
        pname, psort = self.parameter
        seen: set[str] = set()
        for sm in self.summands:
            if sm.action in seen:
                raise ValueError(
                    f"duplicate summand for action {sm.action!r}: "
                    "the process form has exactly one rule per action")
            seen.add(sm.action)
            allowed = {pname}
            if sm.local_var is not None:
                if sm.local_var[0] == pname:
                    raise ValueError(
                        f"local variable of {sm.action!r} shadows the parameter")
                allowed.add(sm.local_var[0])
            if not free_vars(sm.condition) <= allowed:
                raise ValueError(f"condition of {sm.action!r} uses foreign variables")
            if not free_vars(sm.next_state) <= allowed:
                raise ValueError(f"next state of {sm.action!r} uses foreign variables")
            if sort_of_term(sm.condition) is not Sort.BOOL:
                raise ValueError(f"condition of {sm.action!r} is not Bool")
            if sort_of_term(sm.next_state) is not psort:
                raise ValueError(
                    f"next state of {sm.action!r} does not have parameter sort {psort}")

    @property
    def alphabet(self) -> tuple[str, ...]:
        """Action labels in declaration order."""
        return tuple(sm.action for sm in self.summands)

    def summand_for(self, action: str) -> Summand:
        for sm in self.summands:
            if sm.action == action:
                return sm
        raise KeyError(action)


@dataclass(frozen=True)
class Lts:
    initial: Value
    states: frozenset[Value]
    transitions: frozenset[tuple[Value, str, Value]]

    def __post_init__(self) -> None:
        assert self.initial in self.states
        for src, _, dst in self.transitions:
            assert src in self.states and dst in self.states

    def successors(self, state: Value) -> list[tuple[str, Value]]:
        return sorted((a, d) for s, a, d in self.transitions if s == state)


def is_sub_lts(small: Lts, big: Lts) -> bool:
    return small.states <= big.states and small.transitions <= big.transitions


# ---------------------------------------------------------------------------
# Parsing
#
#   proc L(<param> : <Sort>) =
#       sum <var> : <Sort> . (<condition>) -> <action> . L(<next_state>)
#     + ... ;
#   init L(<closed term>);
#
# The `sum` clause is optional. '%' starts a comment.


def parse_lpe(text: str) -> Lpe:
    ts = TokenStream(text)
    ts.expect("proc")
    proc_name = ts.expect_ident("process name").text
    ts.expect("(")
    pname = ts.expect_ident("parameter name").text
    ts.expect(":")
    psort = parse_sort(ts)
    ts.expect(")")
    ts.expect("=")

    summands: list[Summand] = []
    if not ts.check(";"):
        summands.append(_parse_summand(ts, proc_name, pname, psort))
        while ts.accept("+"):
            summands.append(_parse_summand(ts, proc_name, pname, psort))
    ts.expect(";")

    init_value: Optional[Value] = None
    if ts.accept("init"):
        name_tok = ts.expect_ident("process name")
        if name_tok.text != proc_name:
            raise ParseError(f"init names unknown process {name_tok.text!r}",
                             name_tok.line, name_tok.col)
        ts.expect("(")
        init_term = parse_term(ts, lambda _name: None)
        ts.expect(")")
        ts.expect(";")
        folded = partial_eval(init_term, {})
        if not isinstance(folded, Const):
            tok = ts.current
            raise ParseError("initial state must be a closed term", tok.line, tok.col)
        if value_sort(folded.value) is not psort:
            tok = ts.current
            raise SortError(f"initial state must have sort {psort}", tok.line, tok.col)
        init_value = folded.value
    if not ts.at_eof():
        raise ts.error(f"unexpected trailing input {ts.current.text!r}")

    try:
        return Lpe((pname, psort), tuple(summands), init_value)
    except ValueError as exc:
        raise ParseError(str(exc), 1, 1) from None


def _parse_summand(ts: TokenStream, proc_name: str, pname: str,
                   psort: Sort) -> Summand:
    local: Optional[tuple[str, Sort]] = None
    if ts.accept("sum"):
        vname_tok = ts.expect_ident("sum variable")
        ts.expect(":")
        vsort = parse_sort(ts)
        ts.expect(".")
        if vname_tok.text == pname:
            raise ParseError(f"sum variable {vname_tok.text!r} shadows the parameter",
                             vname_tok.line, vname_tok.col)
        local = (vname_tok.text, vsort)

    def scope(name: str) -> Optional[Sort]:
        if name == pname:
            return psort
        if local is not None and name == local[0]:
            return local[1]
        return None

    condition = parse_term(ts, scope)
    cond_tok = ts.current
    if sort_of_term(condition) is not Sort.BOOL:
        raise SortError("summand condition must be Bool", cond_tok.line, cond_tok.col)
    ts.expect("->")
    action = ts.expect_ident("action label").text
    ts.expect(".")
    name_tok = ts.expect_ident("process name")
    if name_tok.text != proc_name:
        raise ParseError(f"summand recurses into unknown process {name_tok.text!r}",
                         name_tok.line, name_tok.col)
    ts.expect("(")
    next_state = parse_term(ts, scope)
    end_tok = ts.current
    ts.expect(")")
    if sort_of_term(next_state) is not psort:
        raise SortError(f"next state must have sort {psort}", end_tok.line, end_tok.col)
    return Summand(action, local, condition, next_state)


# ---------------------------------------------------------------------------
# Exploration


def summand_targets(lpe: Lpe, sm: Summand, state: Value,
                    bounds: Bounds = DEFAULT_BOUNDS) -> list[Value]:
    """All next states the summand can reach from ``state``, in value order."""
    pname = lpe.parameter[0]
    cond = partial_eval(sm.condition, {pname: state})
    if cond == Const(False):
        return []
    targets: list[Value] = []
    if sm.local_var is None:
        if eval_term(cond, DataEnvironment.empty()):
            targets.append(eval_term(sm.next_state,
                                     DataEnvironment.of(**{pname: state})))
        return targets
    vname, vsort = sm.local_var
    bound = upper_bound_false(cond, vname) if vsort is Sort.NAT else None
    for v in enumerate_sort(vsort, bound, bounds,
                            f"sum variable {vname!r} of action {sm.action!r}"):
        env = {pname: state, vname: v}
        if eval_term(sm.condition, DataEnvironment(env)):
            targets.append(eval_term(sm.next_state, DataEnvironment(env)))
    return targets


def explore_lts(lpe: Lpe, init: Value, bounds: Bounds = DEFAULT_BOUNDS) -> Lts:
    """Reachable LTS of the process from ``init``.

    Deterministic: states are visited in BFS order, summands in declaration
    order, local-variable values in increasing order.
    """
    if value_sort(init) is not lpe.parameter[1]:
        raise SortMismatch(f"initial state must have sort {lpe.parameter[1]}")
    states: dict[Value, None] = {init: None}
    transitions: list[tuple[Value, str, Value]] = []
    frontier = [init]
    while frontier:
        next_frontier: list[Value] = []
        for state in frontier:
            for sm in lpe.summands:
                for target in summand_targets(lpe, sm, state, bounds):
                    transitions.append((state, sm.action, target))
                    if target not in states:
                        states[target] = None
                        next_frontier.append(target)
                        if len(states) > bounds.max_vertices:
                            raise StateExplosion(
                                f"more than {bounds.max_vertices} states")
        frontier = next_frontier
    return Lts(init, frozenset(states), frozenset(transitions))


def lts_to_lpe(lts: Lts, alphabet: tuple[str, ...]) -> tuple[Lpe, Value]:
    """Re-encode an explicit LTS as a process over Nat state indices.

    Per action one summand `sum k . (\\/_i s == src_i && k == dst_i) -> a . L(k)`;
    actions of ``alphabet`` without transitions get an unsatisfiable rule so
    the alphabet (and thus any formula over it) is preserved.
    """
    order = state_order(lts)
    index = {state: i for i, state in enumerate(order)}
    pname = "s"
    svar = Var(pname, Sort.NAT)
    kvar = Var("k", Sort.NAT)
    summands = []
    for action in alphabet:
        pairs = sorted((index[src], index[dst])
                       for src, a, dst in lts.transitions if a == action)
        if not pairs:
            summands.append(Summand(action, None, Const(False), svar))
            continue
        clauses: list[Term] = [
            BinOp("&&", BinOp("==", svar, Const(src)), BinOp("==", kvar, Const(dst)))
            for src, dst in pairs
        ]
        cond = clauses[0]
        for clause in clauses[1:]:
            cond = BinOp("||", cond, clause)
        summands.append(Summand(action, ("k", Sort.NAT), cond, kvar))
    lpe = Lpe((pname, Sort.NAT), tuple(summands), index[lts.initial])
    return lpe, index[lts.initial]


def state_order(lts: Lts) -> list[Value]:
    """States in first-visit order from the initial state (sorted successor
    exploration); unreachable states follow in value order."""
    succ: dict[Value, list[tuple[str, Value]]] = {}
    for src, a, dst in sorted(lts.transitions, key=lambda t: (str(t[0]), t[1], str(t[2]))):
        succ.setdefault(src, []).append((a, dst))
    order: list[Value] = [lts.initial]
    seen = {lts.initial}
    queue = [lts.initial]
    while queue:
        state = queue.pop(0)
        for _, dst in succ.get(state, []):
            if dst not in seen:
                seen.add(dst)
                order.append(dst)
                queue.append(dst)
    for state in sorted(lts.states - seen, key=str):
        order.append(state)
    return order
