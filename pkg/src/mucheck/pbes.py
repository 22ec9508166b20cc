"""Fixpoint equation systems over data-parameterised predicate variables.

Contains the AST, well-formedness checks, ranks, the formula semantics, the
instance-level folding engine used by instantiation, and a brute-force
nested-iteration solver that serves as the test oracle.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple, Optional, Sequence, Union

from .kernel import (
    Bounds,
    Const,
    DataEnvironment,
    DEFAULT_BOUNDS,
    Sort,
    SortMismatch,
    StateExplosion,
    Term,
    Value,
    Var,
    _eval,
    enumerate_sort,
    format_term,
    format_value,
    free_vars,
    partial_eval,
    sort_of_term,
    substitute_term,
    upper_bound_false,
    upper_bound_true,
    value_sort,
)
from .parsing import ParseError, TokenStream, parse_sort, parse_term


class PbesError(ValueError):
    pass


class UnknownVariable(PbesError):
    pass


# ---------------------------------------------------------------------------
# Predicate formulas


@dataclass(frozen=True)
class PredicateFormula:
    pass


@dataclass(frozen=True)
class Val(PredicateFormula):
    term: Term


@dataclass(frozen=True)
class Call(PredicateFormula):
    var: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class PAnd(PredicateFormula):
    args: tuple[PredicateFormula, ...]


@dataclass(frozen=True)
class POr(PredicateFormula):
    args: tuple[PredicateFormula, ...]


@dataclass(frozen=True)
class Exists(PredicateFormula):
    var: str
    sort: Sort
    body: PredicateFormula


@dataclass(frozen=True)
class Forall(PredicateFormula):
    var: str
    sort: Sort
    body: PredicateFormula


PF_TRUE = Val(Const(True))
PF_FALSE = Val(Const(False))


def is_true(pf: PredicateFormula) -> bool:
    return isinstance(pf, Val) and pf.term == Const(True)


def is_false(pf: PredicateFormula) -> bool:
    return isinstance(pf, Val) and pf.term == Const(False)


def pand(items: Sequence[PredicateFormula]) -> PredicateFormula:
    """N-ary conjunction: flattens, drops true units, collapses on false."""
    flat: list[PredicateFormula] = []
    for item in items:
        if is_false(item):
            return PF_FALSE
        if is_true(item):
            continue
        if isinstance(item, PAnd):
            flat.extend(item.args)
        else:
            flat.append(item)
    if not flat:
        return PF_TRUE
    if len(flat) == 1:
        return flat[0]
    return PAnd(tuple(flat))


def por(items: Sequence[PredicateFormula]) -> PredicateFormula:
    flat: list[PredicateFormula] = []
    for item in items:
        if is_true(item):
            return PF_TRUE
        if is_false(item):
            continue
        if isinstance(item, POr):
            flat.extend(item.args)
        else:
            flat.append(item)
    if not flat:
        return PF_FALSE
    if len(flat) == 1:
        return flat[0]
    return POr(tuple(flat))


def exists(var: str, sort: Sort, body: PredicateFormula) -> PredicateFormula:
    if is_true(body) or is_false(body):
        return body
    return Exists(var, sort, body)


def forall(var: str, sort: Sort, body: PredicateFormula) -> PredicateFormula:
    if is_true(body) or is_false(body):
        return body
    return Forall(var, sort, body)


def free_data_vars(pf: PredicateFormula) -> frozenset[str]:
    if isinstance(pf, Val):
        return free_vars(pf.term)
    if isinstance(pf, Call):
        out: frozenset[str] = frozenset()
        for arg in pf.args:
            out |= free_vars(arg)
        return out
    if isinstance(pf, (PAnd, POr)):
        out = frozenset()
        for arg in pf.args:
            out |= free_data_vars(arg)
        return out
    if isinstance(pf, (Exists, Forall)):
        return free_data_vars(pf.body) - {pf.var}
    raise TypeError(f"unknown formula node {pf!r}")


def occurring_variables(pf: PredicateFormula) -> frozenset[str]:
    """Predicate variables occurring in the formula (occ)."""
    if isinstance(pf, Call):
        return frozenset((pf.var,))
    if isinstance(pf, (PAnd, POr)):
        out: frozenset[str] = frozenset()
        for arg in pf.args:
            out |= occurring_variables(arg)
        return out
    if isinstance(pf, (Exists, Forall)):
        return occurring_variables(pf.body)
    return frozenset()


# ---------------------------------------------------------------------------
# Substitution


def substitute_data(pf: PredicateFormula, mapping: Mapping[str, Term]) -> PredicateFormula:
    """Capture-avoiding substitution of terms for data variables."""
    if not mapping:
        return pf
    if isinstance(pf, Val):
        return Val(substitute_term(pf.term, mapping))
    if isinstance(pf, Call):
        return Call(pf.var, tuple(substitute_term(a, mapping) for a in pf.args))
    if isinstance(pf, PAnd):
        return PAnd(tuple(substitute_data(a, mapping) for a in pf.args))
    if isinstance(pf, POr):
        return POr(tuple(substitute_data(a, mapping) for a in pf.args))
    if isinstance(pf, (Exists, Forall)):
        mapping = {k: v for k, v in mapping.items() if k != pf.var}
        if not mapping:
            return pf
        body = pf.body
        var = pf.var
        captured = any(var in free_vars(t) for t in mapping.values())
        if captured:
            avoid = free_data_vars(body) | set(mapping)
            for t in mapping.values():
                avoid |= free_vars(t)
            fresh = var
            suffix = 0
            while fresh in avoid:
                suffix += 1
                fresh = f"{var}_{suffix}"
            body = substitute_data(body, {var: _typed_var(fresh, pf.sort)})
            var = fresh
        body = substitute_data(body, mapping)
        kind = Exists if isinstance(pf, Exists) else Forall
        return kind(var, pf.sort, body)
    raise TypeError(f"unknown formula node {pf!r}")


def _typed_var(name: str, sort: Sort) -> Term:
    return Var(name, sort)


def substitute_calls(
    pf: PredicateFormula,
    subs: Mapping[str, tuple[tuple[str, ...], PredicateFormula]],
) -> PredicateFormula:
    """Replace calls Y(e) by bodies with Y's lambda parameters bound to e.

    ``subs[Y] = (param_names, body)``; the replacement is body[params := e],
    simplified by the smart constructors. Quantifiers that would capture a
    free variable of a replacement body are renamed apart.
    """
    danger: frozenset[str] = frozenset()
    for params, body in subs.values():
        danger |= free_data_vars(body) - frozenset(params)
    return _subst_calls(pf, subs, danger)


def _subst_calls(pf, subs, danger: frozenset[str]) -> PredicateFormula:
    if isinstance(pf, Val):
        return pf
    if isinstance(pf, Call):
        hit = subs.get(pf.var)
        if hit is None:
            return pf
        params, body = hit
        if len(params) != len(pf.args):
            raise PbesError(f"substitution for {pf.var!r} has wrong arity")
        return substitute_data(body, dict(zip(params, pf.args)))
    if isinstance(pf, PAnd):
        return pand([_subst_calls(a, subs, danger) for a in pf.args])
    if isinstance(pf, POr):
        return por([_subst_calls(a, subs, danger) for a in pf.args])
    if isinstance(pf, (Exists, Forall)):
        var, body = pf.var, pf.body
        if var in danger:
            avoid = free_data_vars(body) | danger
            fresh = var
            suffix = 0
            while fresh in avoid:
                suffix += 1
                fresh = f"{var}_{suffix}"
            body = substitute_data(body, {var: Var(fresh, pf.sort)})
            var = fresh
        kind = exists if isinstance(pf, Exists) else forall
        return kind(var, pf.sort, _subst_calls(body, subs, danger))
    raise TypeError(f"unknown formula node {pf!r}")


def simplify(pf: PredicateFormula) -> PredicateFormula:
    """Constant propagation: folds ground atoms and boolean units."""
    return partial_fold(pf, {})


def partial_fold(pf: PredicateFormula, env: Mapping[str, Value]) -> PredicateFormula:
    """Substitute values for data variables and fold what becomes constant."""
    if isinstance(pf, Val):
        return Val(partial_eval(pf.term, env))
    if isinstance(pf, Call):
        return Call(pf.var, tuple(partial_eval(a, env) for a in pf.args))
    if isinstance(pf, PAnd):
        return pand([partial_fold(a, env) for a in pf.args])
    if isinstance(pf, POr):
        return por([partial_fold(a, env) for a in pf.args])
    if isinstance(pf, (Exists, Forall)):
        inner_env = env
        if pf.var in env:
            inner_env = {k: v for k, v in env.items() if k != pf.var}
        body = partial_fold(pf.body, inner_env)
        kind = exists if isinstance(pf, Exists) else forall
        return kind(pf.var, pf.sort, body)
    raise TypeError(f"unknown formula node {pf!r}")


# Val canonicalisation: partial_fold produces Val(Const(b)) for decided atoms,
# which is_true/is_false and the smart constructors recognise.


# ---------------------------------------------------------------------------
# Equations and systems


class Instance(NamedTuple):
    """A signature element: predicate variable applied to concrete values."""

    var: str
    args: tuple[Value, ...]

    def __str__(self) -> str:
        return f"{self.var}({', '.join(format_value(v) for v in self.args)})"


@dataclass(frozen=True)
class Equation:
    fix: str  # "mu" | "nu"
    var: str
    params: tuple[tuple[str, Sort], ...]
    rhs: PredicateFormula

    def __post_init__(self) -> None:
        assert self.fix in ("mu", "nu")
        names = [n for n, _ in self.params]
        if len(set(names)) != len(names):
            raise PbesError(f"equation {self.var!r} repeats a parameter name")


@dataclass(frozen=True)
class Pbes:
    equations: tuple[Equation, ...]
    init: Instance

    def __post_init__(self) -> None:
        arity: dict[str, tuple[Sort, ...]] = {}
        for eq in self.equations:
            if eq.var in arity:
                raise PbesError(f"two defining equations for {eq.var!r}")
            arity[eq.var] = tuple(s for _, s in eq.params)
        for eq in self.equations:
            param_names = {n for n, _ in eq.params}
            loose = free_data_vars(eq.rhs) - param_names
            if loose:
                raise PbesError(
                    f"equation {eq.var!r} has free data variables {sorted(loose)}")
            _check_rhs(eq.rhs, eq.var, arity, dict(eq.params))
        if self.init.var not in arity:
            raise UnknownVariable(f"initial instance names unbound {self.init.var!r}")
        expected = arity[self.init.var]
        got = tuple(value_sort(v) for v in self.init.args)
        if got != expected:
            raise SortMismatch(
                f"initial instance {self.init} does not match parameters {expected}")

    def equation_for(self, var: str) -> Equation:
        for eq in self.equations:
            if eq.var == var:
                return eq
        raise UnknownVariable(f"no equation for {var!r}")

    @property
    def bound_variables(self) -> tuple[str, ...]:
        return tuple(eq.var for eq in self.equations)


def _check_rhs(pf: PredicateFormula, owner: str,
               arity: Mapping[str, tuple[Sort, ...]],
               scope: dict[str, Sort]) -> None:
    if isinstance(pf, Val):
        _check_term_vars(pf.term, scope, owner)
        if sort_of_term(pf.term) is not Sort.BOOL:
            raise SortMismatch(
                f"equation {owner!r}: data atom {format_term(pf.term)} is not Bool")
    elif isinstance(pf, Call):
        if pf.var not in arity:
            raise PbesError(f"equation {owner!r} calls unbound variable {pf.var!r}")
        expected = arity[pf.var]
        if len(pf.args) != len(expected):
            raise PbesError(f"call {pf.var!r} in {owner!r} has wrong arity")
        for arg, sort in zip(pf.args, expected):
            _check_term_vars(arg, scope, owner)
            if sort_of_term(arg) is not sort:
                raise SortMismatch(
                    f"call {pf.var!r} in {owner!r}: argument {format_term(arg)} "
                    f"is not of sort {sort}")
    elif isinstance(pf, (PAnd, POr)):
        for a in pf.args:
            _check_rhs(a, owner, arity, scope)
    elif isinstance(pf, (Exists, Forall)):
        inner = dict(scope)
        inner[pf.var] = pf.sort
        _check_rhs(pf.body, owner, arity, inner)


def _check_term_vars(t: Term, scope: Mapping[str, Sort], owner: str) -> None:
    for name in free_vars(t):
        declared = scope.get(name)
        if declared is None:
            continue  # caught by the free-variable check
        # the term was built with an explicit sort on each Var node
        if _var_sort_in(t, name) is not declared:
            raise SortMismatch(
                f"equation {owner!r}: variable {name!r} used with wrong sort")


def _var_sort_in(t: Term, name: str) -> Optional[Sort]:
    from .kernel import BinOp, Not

    if isinstance(t, Var):
        return t.sort if t.name == name else None
    if isinstance(t, Not):
        return _var_sort_in(t.operand, name)
    if isinstance(t, BinOp):
        return _var_sort_in(t.left, name) or _var_sort_in(t.right, name)
    return None


def rank(p: Pbes, var: str) -> int:
    """Minimal rank: even iff the fixpoint is nu, non-decreasing in equation
    order, incremented exactly at fixpoint alternations."""
    r: Optional[int] = None
    prev: Optional[str] = None
    for eq in p.equations:
        if r is None:
            r = 0 if eq.fix == "nu" else 1
        elif eq.fix != prev:
            r += 1
        prev = eq.fix
        if eq.var == var:
            return r
    raise UnknownVariable(f"no equation for {var!r}")


def ranks(p: Pbes) -> dict[str, int]:
    return {eq.var: rank(p, eq.var) for eq in p.equations}


@dataclass(frozen=True)
class PredicateEnvironment:
    """Total truth assignment on instances: explicit map plus default."""

    assignment: Mapping[Instance, bool]
    default: bool = False

    def lookup(self, inst: Instance) -> bool:
        return self.assignment.get(inst, self.default)

    @staticmethod
    def from_true_instances(true_set, default: bool = False) -> "PredicateEnvironment":
        return PredicateEnvironment({Instance(v, a): True for v, a in true_set}, default)


# ---------------------------------------------------------------------------
# Instance-level folding
#
# fold_rhs evaluates a right-hand side under a concrete data environment,
# expanding quantifiers over their (syntactically bounded) ranges and asking
# a hook what to do with each concrete call. The hook returns True/False (the
# semantic evaluator) or an Instance literal (instantiation), so the result
# is a constant or a positive boolean combination over instances.


class LAnd(NamedTuple):
    children: tuple


class LOr(NamedTuple):
    children: tuple


LitExpr = Union[bool, Instance, LAnd, LOr]

CallHook = Callable[[str, tuple], LitExpr]


def fold_rhs(pf: PredicateFormula, env: dict, hook: CallHook,
             bounds: Bounds = DEFAULT_BOUNDS) -> LitExpr:
    if isinstance(pf, Val):
        v = _eval_term_dict(pf.term, env)
        return v is True
    if isinstance(pf, Call):
        args = tuple(_eval_term_dict(a, env) for a in pf.args)
        return hook(pf.var, args)
    if isinstance(pf, PAnd):
        out: list = []
        for a in pf.args:
            c = fold_rhs(a, env, hook, bounds)
            if c is False:
                return False
            if c is True:
                continue
            if isinstance(c, LAnd):
                out.extend(c.children)
            else:
                out.append(c)
        return _mk_and(out)
    if isinstance(pf, POr):
        out = []
        for a in pf.args:
            c = fold_rhs(a, env, hook, bounds)
            if c is True:
                return True
            if c is False:
                continue
            if isinstance(c, LOr):
                out.extend(c.children)
            else:
                out.append(c)
        return _mk_or(out)
    if isinstance(pf, Exists):
        body = partial_fold(pf.body, env)
        if is_false(body):
            return False
        if is_true(body):
            return True
        bound = pf_upper_bound_false(body, pf.var) if pf.sort is Sort.NAT else None
        out = []
        for v in enumerate_sort(pf.sort, bound, bounds,
                                f"exists {pf.var}: {pf.sort}"):
            c = fold_rhs(body, {pf.var: v}, hook, bounds)
            if c is True:
                return True
            if c is False:
                continue
            if isinstance(c, LOr):
                out.extend(c.children)
            else:
                out.append(c)
        return _mk_or(out)
    if isinstance(pf, Forall):
        body = partial_fold(pf.body, env)
        if is_false(body):
            return False
        if is_true(body):
            return True
        bound = pf_upper_bound_true(body, pf.var) if pf.sort is Sort.NAT else None
        out = []
        for v in enumerate_sort(pf.sort, bound, bounds,
                                f"forall {pf.var}: {pf.sort}"):
            c = fold_rhs(body, {pf.var: v}, hook, bounds)
            if c is False:
                return False
            if c is True:
                continue
            if isinstance(c, LAnd):
                out.extend(c.children)
            else:
                out.append(c)
        return _mk_and(out)
    raise TypeError(f"unknown formula node {pf!r}")


def _eval_term_dict(t: Term, env: dict) -> Value:
    return _eval(t, env)


def _mk_and(children: list) -> LitExpr:
    if not children:
        return True
    uniq = list(dict.fromkeys(children))
    if len(uniq) == 1:
        return uniq[0]
    return LAnd(tuple(uniq))


def _mk_or(children: list) -> LitExpr:
    if not children:
        return False
    uniq = list(dict.fromkeys(children))
    if len(uniq) == 1:
        return uniq[0]
    return LOr(tuple(uniq))


def lit_instances(expr: LitExpr) -> list[Instance]:
    """Distinct instance literals of a folded right-hand side, in order."""
    out: dict[Instance, None] = {}
    _collect_lits(expr, out)
    return list(out)


def _collect_lits(expr: LitExpr, out: dict) -> None:
    if isinstance(expr, Instance):
        out[expr] = None
    elif isinstance(expr, (LAnd, LOr)):
        for c in expr.children:
            _collect_lits(c, out)


def pf_upper_bound_false(pf: PredicateFormula, var: str) -> Optional[int]:
    if isinstance(pf, Val):
        return upper_bound_false(pf.term, var)
    if isinstance(pf, PAnd):
        found = [b for b in (pf_upper_bound_false(a, var) for a in pf.args)
                 if b is not None]
        return min(found) if found else None
    if isinstance(pf, POr):
        out = -1
        for a in pf.args:
            b = pf_upper_bound_false(a, var)
            if b is None:
                return None
            out = max(out, b)
        return out
    if isinstance(pf, (Exists, Forall)):
        if pf.var == var:
            return None
        return pf_upper_bound_false(pf.body, var)
    return None  # calls give no bound


def pf_upper_bound_true(pf: PredicateFormula, var: str) -> Optional[int]:
    if isinstance(pf, Val):
        return upper_bound_true(pf.term, var)
    if isinstance(pf, POr):
        found = [b for b in (pf_upper_bound_true(a, var) for a in pf.args)
                 if b is not None]
        return min(found) if found else None
    if isinstance(pf, PAnd):
        out = -1
        for a in pf.args:
            b = pf_upper_bound_true(a, var)
            if b is None:
                return None
            out = max(out, b)
        return out
    if isinstance(pf, (Exists, Forall)):
        if pf.var == var:
            return None
        return pf_upper_bound_true(pf.body, var)
    return None


# ---------------------------------------------------------------------------
# Semantics and the brute-force oracle


def eval_predicate_formula(pf: PredicateFormula, eta: PredicateEnvironment,
                           delta: DataEnvironment,
                           bounds: Bounds = DEFAULT_BOUNDS) -> bool:
    """Truth of a formula under predicate and data environments.

    Quantifiers range over their syntactically bounded domains; an
    unbounded Nat quantifier raises BoundExceeded.
    """
    result = fold_rhs(pf, dict(delta.bindings),
                      lambda var, args: eta.lookup(Instance(var, args)), bounds)
    assert isinstance(result, bool)
    return result


def reachable_instances(p: Pbes, bounds: Bounds = DEFAULT_BOUNDS) -> dict[Instance, LitExpr]:
    """Folded right-hand sides for every instance reachable from p.init.

    The dependency closure is taken over the literals that survive constant
    folding, which is exactly the relevancy over-approximation used by
    instantiation.
    """
    rhs_of = {eq.var: eq for eq in p.equations}
    folded: dict[Instance, LitExpr] = {}
    queue = [p.init]
    seen = {p.init}
    hook: CallHook = Instance
    while queue:
        inst = queue.pop()
        eq = rhs_of[inst.var]
        env = {name: value for (name, _), value in zip(eq.params, inst.args)}
        expr = fold_rhs(eq.rhs, env, hook, bounds)
        folded[inst] = expr
        for dep in lit_instances(expr):
            if dep not in seen:
                seen.add(dep)
                queue.append(dep)
                if len(seen) > bounds.max_vertices:
                    raise StateExplosion(
                        f"more than {bounds.max_vertices} reachable instances")
    return folded


def brute_force_solve(p: Pbes, bounds: Bounds = DEFAULT_BOUNDS) -> PredicateEnvironment:
    """Naive nested fixpoint iteration over the reachable instance space.

    Equations are processed in order with outer fixpoints iterated outermost;
    correctness, not speed, is the contract. Each nesting level is memoised
    on the outer values its right-hand sides actually read, which leaves the
    iteration scheme (and its results) untouched but avoids re-solving inner
    blocks whose inputs did not change. The result lists exactly the
    instances reachable from p.init.
    """
    folded = reachable_instances(p, bounds)
    level_of = {eq.var: i for i, eq in enumerate(p.equations)}
    domains: list[list[Instance]] = [[] for _ in p.equations]
    for inst in folded:
        domains[level_of[inst.var]].append(inst)

    # outer instances a level's solve depends on: everything an rhs at this
    # level or deeper references from strictly earlier equations
    n_levels = len(p.equations)
    inner_domain: list[list[Instance]] = [[] for _ in range(n_levels)]
    referenced_outer: list[list[Instance]] = [[] for _ in range(n_levels)]
    for i in range(n_levels - 1, -1, -1):
        inner_domain[i] = domains[i] + (inner_domain[i + 1] if i + 1 < n_levels else [])
    for i in range(n_levels):
        refs: dict[Instance, None] = {}
        for inst in inner_domain[i]:
            for dep in lit_instances(folded[inst]):
                if level_of[dep.var] < i:
                    refs[dep] = None
        referenced_outer[i] = list(refs)

    assign: dict[Instance, bool] = {}
    caches: list[dict] = [{} for _ in range(n_levels)]

    def eval_lit(expr: LitExpr) -> bool:
        if expr is True or expr is False:
            return expr
        if isinstance(expr, Instance):
            return assign[expr]
        if isinstance(expr, LAnd):
            return all(eval_lit(c) for c in expr.children)
        return any(eval_lit(c) for c in expr.children)

    def solve_from(i: int) -> None:
        if i == n_levels:
            return
        key = tuple(assign[inst] for inst in referenced_outer[i])
        hit = caches[i].get(key)
        if hit is not None:
            assign.update(hit)
            return
        eq = p.equations[i]
        domain = domains[i]
        start = eq.fix == "nu"
        for inst in domain:
            assign[inst] = start
        while True:
            solve_from(i + 1)
            updated = {inst: eval_lit(folded[inst]) for inst in domain}
            if all(assign[inst] == v for inst, v in updated.items()):
                break
            assign.update(updated)
        caches[i][key] = {inst: assign[inst] for inst in inner_domain[i]}

    solve_from(0)
    return PredicateEnvironment(dict(assign), default=False)


# ---------------------------------------------------------------------------
# Debug dump (round-trippable)


def dump_pbes(p: Pbes) -> str:
    lines = []
    for eq in p.equations:
        params = ", ".join(f"{n}: {s}" for n, s in eq.params)
        lines.append(f"{eq.fix} {eq.var}({params}) = {format_predicate(eq.rhs)};")
    args = ", ".join(format_value(v) for v in p.init.args)
    lines.append(f"init {p.init.var}({args});")
    return "\n".join(lines) + "\n"


def format_predicate(pf: PredicateFormula, level: int = 0) -> str:
    # levels: 0 quantifiers, 1 ||, 2 &&, 3 atoms
    if isinstance(pf, Val):
        if pf.term == Const(True):
            return "true"
        if pf.term == Const(False):
            return "false"
        return f"val({format_term(pf.term)})"
    if isinstance(pf, Call):
        return f"{pf.var}({', '.join(format_term(a) for a in pf.args)})"
    if isinstance(pf, POr):
        inner = " || ".join(format_predicate(a, 2) for a in pf.args)
        return f"({inner})" if level > 1 else inner
    if isinstance(pf, PAnd):
        inner = " && ".join(format_predicate(a, 3) for a in pf.args)
        return f"({inner})" if level > 2 else inner
    if isinstance(pf, (Exists, Forall)):
        word = "exists" if isinstance(pf, Exists) else "forall"
        inner = f"{word} {pf.var}: {pf.sort} . {format_predicate(pf.body, 0)}"
        return f"({inner})" if level > 0 else inner
    raise TypeError(f"unknown formula node {pf!r}")


def parse_pbes(text: str) -> Pbes:
    ts = TokenStream(text)
    equations: list[Equation] = []
    while not ts.check("init"):
        if ts.at_eof():
            raise ts.error("expected 'init' before end of input")
        equations.append(_parse_equation(ts))
    ts.expect("init")
    var_tok = ts.expect_ident("predicate variable")
    ts.expect("(")
    args: list[Value] = []
    if not ts.check(")"):
        while True:
            term = parse_term(ts, lambda _n: None)
            folded = partial_eval(term, {})
            if not isinstance(folded, Const):
                raise ts.error("initial arguments must be closed")
            args.append(folded.value)
            if not ts.accept(","):
                break
    ts.expect(")")
    ts.expect(";")
    if not ts.at_eof():
        raise ts.error(f"unexpected trailing input {ts.current.text!r}")
    return Pbes(tuple(equations), Instance(var_tok.text, tuple(args)))


def _parse_equation(ts: TokenStream) -> Equation:
    tok = ts.current
    if tok.text not in ("mu", "nu"):
        raise ts.error(f"expected 'mu' or 'nu', found {tok.text!r}")
    ts.index += 1
    var = ts.expect_ident("predicate variable").text
    params: list[tuple[str, Sort]] = []
    ts.expect("(")
    if not ts.check(")"):
        while True:
            name = ts.expect_ident("parameter name").text
            ts.expect(":")
            params.append((name, parse_sort(ts)))
            if not ts.accept(","):
                break
    ts.expect(")")
    ts.expect("=")
    scope = dict(params)
    rhs = _parse_pf(ts, scope)
    ts.expect(";")
    return Equation(tok.text, var, tuple(params), rhs)


def _parse_pf(ts: TokenStream, scope: dict[str, Sort]) -> PredicateFormula:
    if ts.current.text in ("exists", "forall"):
        word = ts.current.text
        ts.index += 1
        name = ts.expect_ident("quantified variable").text
        ts.expect(":")
        sort = parse_sort(ts)
        ts.expect(".")
        inner_scope = dict(scope)
        inner_scope[name] = sort
        body = _parse_pf(ts, inner_scope)
        return Exists(name, sort, body) if word == "exists" else Forall(name, sort, body)
    return _parse_por(ts, scope)


def _parse_por(ts: TokenStream, scope: dict[str, Sort]) -> PredicateFormula:
    items = [_parse_pand(ts, scope)]
    while ts.accept("||"):
        if ts.current.text in ("exists", "forall"):
            items.append(_parse_pf(ts, scope))
            break
        items.append(_parse_pand(ts, scope))
    return por(items) if len(items) > 1 else items[0]


def _parse_pand(ts: TokenStream, scope: dict[str, Sort]) -> PredicateFormula:
    items = [_parse_patom(ts, scope)]
    while ts.accept("&&"):
        items.append(_parse_patom(ts, scope))
    return pand(items) if len(items) > 1 else items[0]


def _parse_patom(ts: TokenStream, scope: dict[str, Sort]) -> PredicateFormula:
    tok = ts.current
    if ts.accept("("):
        pf = _parse_pf(ts, scope)
        ts.expect(")")
        return pf
    if tok.kind != "ident":
        raise ts.error(f"expected a predicate formula, found {tok.text!r}")
    ts.index += 1
    if tok.text == "true":
        return PF_TRUE
    if tok.text == "false":
        return PF_FALSE
    if tok.text == "val":
        ts.expect("(")
        term = parse_term(ts, lambda n: scope.get(n))
        ts.expect(")")
        return Val(term)
    if tok.text in ("exists", "forall"):
        ts.index -= 1
        return _parse_pf(ts, scope)
    # predicate variable call
    ts.expect("(")
    args: list[Term] = []
    if not ts.check(")"):
        while True:
            args.append(parse_term(ts, lambda n: scope.get(n)))
            if not ts.accept(","):
                break
    ts.expect(")")
    return Call(tok.text, tuple(args))
