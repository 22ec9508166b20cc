"""Parity-game instantiation, relevancy dependencies, and certificate graphs.

Instantiation explores instances breadth-first from the initial one. Each
instance's right-hand side is constant-folded under its concrete parameter
values; disjunctive structure becomes an Even-owned vertex, conjunctive
structure an Odd-owned one, and quantifiers expand over their bounded
ranges. Constant right-hand sides are totalised through a shared even
self-loop vertex (true) or odd self-loop vertex (false), so every vertex
has a successor. Instance vertices take the rank of their variable as
priority; synthetic subformula vertices inherit the owning instance's.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Protocol

from .kernel import Bounds, DEFAULT_BOUNDS, DataEnvironment, StateExplosion, format_value, value_sort
from .pbes import (
    Equation,
    Instance,
    LAnd,
    LOr,
    LitExpr,
    Pbes,
    PredicateEnvironment,
    eval_predicate_formula,
    fold_rhs,
    lit_instances,
    ranks,
)

PROOF = "proof"
REFUTATION = "refutation"

EVEN = 0
ODD = 1


class RhsRestriction(Protocol):
    """Hook restricting which dependencies of an instance are kept.

    ``allows`` is consulted for every concrete call the folded right-hand
    side of ``source`` makes; disallowed calls fold to false.
    """

    def allows(self, source: Instance, var: str, args: tuple) -> bool: ...


@dataclass
class ParityGame:
    """Explicit min-parity game. Read-only after construction."""

    owner: list[int]
    priority: list[int]
    succ: list[list[int]]
    origin: list  # Instance | "true" | "false" | None (synthetic)
    initial: int
    instance_index: dict[Instance, int]

    def __len__(self) -> int:
        return len(self.owner)

    @property
    def num_instance_vertices(self) -> int:
        return len(self.instance_index)

    def instance_vertices(self) -> list[Instance]:
        return list(self.instance_index)


def instantiate(p: Pbes, bounds: Bounds = DEFAULT_BOUNDS,
                rhs_provider: Optional[RhsRestriction] = None) -> ParityGame:
    """Explore the parity game underlying ``p`` from its initial instance.

    Deterministic: instances are numbered in BFS discovery order, synthetic
    vertices in construction order within their instance.
    """
    eq_of = {eq.var: eq for eq in p.equations}
    rank_of = ranks(p)

    owner: list[int] = []
    priority: list[int] = []
    succ: list[list[int]] = []
    origin: list = []
    instance_index: dict[Instance, int] = {}
    special = {"true": -1, "false": -1}

    def new_vertex(own: int, prio: int, orig) -> int:
        if len(owner) >= bounds.max_vertices:
            raise StateExplosion(f"more than {bounds.max_vertices} game vertices")
        owner.append(own)
        priority.append(prio)
        succ.append([])
        origin.append(orig)
        return len(owner) - 1

    def constant_vertex(which: str) -> int:
        if special[which] == -1:
            v = new_vertex(ODD if which == "true" else EVEN,
                           0 if which == "true" else 1, which)
            succ[v].append(v)
            special[which] = v
        return special[which]

    queue: deque[Instance] = deque()

    def instance_vertex(inst: Instance) -> int:
        v = instance_index.get(inst)
        if v is None:
            v = new_vertex(EVEN, rank_of[inst.var], inst)
            instance_index[inst] = v
            queue.append(inst)
        return v

    def emit(expr: LitExpr, vertex: int, rank: int) -> None:
        if expr is True:
            succ[vertex].append(constant_vertex("true"))
        elif expr is False:
            succ[vertex].append(constant_vertex("false"))
        elif isinstance(expr, Instance):
            succ[vertex].append(instance_vertex(expr))
        elif isinstance(expr, LOr):
            owner[vertex] = EVEN
            for child in expr.children:
                succ[vertex].append(child_vertex(child, rank))
        elif isinstance(expr, LAnd):
            owner[vertex] = ODD
            for child in expr.children:
                succ[vertex].append(child_vertex(child, rank))
        else:
            raise TypeError(f"unexpected folded node {expr!r}")

    def child_vertex(expr: LitExpr, rank: int) -> int:
        if isinstance(expr, Instance):
            return instance_vertex(expr)
        v = new_vertex(EVEN, rank, None)
        emit(expr, v, rank)
        return v

    instance_vertex(p.init)
    while queue:
        inst = queue.popleft()
        vertex = instance_index[inst]
        eq = eq_of[inst.var]
        env = {name: value for (name, _), value in zip(eq.params, inst.args)}
        if rhs_provider is None:
            hook = Instance
        else:
            provider = rhs_provider

            def hook(var: str, args: tuple, _src=inst) -> LitExpr:
                if provider.allows(_src, var, args):
                    return Instance(var, args)
                return False

        expr = fold_rhs(eq.rhs, env, hook, bounds)
        emit(expr, vertex, rank_of[inst.var])

    return ParityGame(owner, priority, succ, origin,
                      instance_index[p.init], instance_index)


# ---------------------------------------------------------------------------
# Relevancy dependencies (instance-level projection of instantiation)


@dataclass(frozen=True)
class RelevancyGraph:
    root: Instance
    vertices: tuple[Instance, ...]
    edges: Mapping[Instance, tuple[Instance, ...]]

    def __len__(self) -> int:
        return len(self.vertices)

    def edge_count(self) -> int:
        return sum(len(v) for v in self.edges.values())


def relevancy_proxy(p: Pbes, bounds: Bounds = DEFAULT_BOUNDS,
                    rhs_provider: Optional[RhsRestriction] = None) -> RelevancyGraph:
    """Instance dependency graph after constant folding.

    Over-approximates the semantic relevancy relation; its vertex set equals
    the instance-vertex set of ``instantiate`` on the same inputs.
    """
    eq_of = {eq.var: eq for eq in p.equations}
    edges: dict[Instance, tuple[Instance, ...]] = {}
    queue: deque[Instance] = deque([p.init])
    seen: dict[Instance, None] = {p.init: None}
    while queue:
        inst = queue.popleft()
        eq = eq_of[inst.var]
        env = {name: value for (name, _), value in zip(eq.params, inst.args)}
        if rhs_provider is None:
            hook = Instance
        else:
            provider = rhs_provider

            def hook(var: str, args: tuple, _src=inst) -> LitExpr:
                if provider.allows(_src, var, args):
                    return Instance(var, args)
                return False

        expr = fold_rhs(eq.rhs, env, hook, bounds)
        deps = tuple(lit_instances(expr))
        edges[inst] = deps
        for dep in deps:
            if dep not in seen:
                seen[dep] = None
                queue.append(dep)
                if len(seen) > bounds.max_vertices:
                    raise StateExplosion(
                        f"more than {bounds.max_vertices} reachable instances")
    return RelevancyGraph(p.init, tuple(seen), edges)


# ---------------------------------------------------------------------------
# Evidence graphs (proof / refutation certificates)


@dataclass(frozen=True)
class EvidenceGraph:
    polarity: str  # PROOF | REFUTATION
    root: Instance
    vertices: frozenset[Instance]
    edges: frozenset[tuple[Instance, Instance]]
    ranks: Mapping[str, int]

    def successors(self, inst: Instance) -> list[Instance]:
        return sorted((d for s, d in self.edges if s == inst), key=str)

    def adjacency(self) -> dict[Instance, list[Instance]]:
        adj: dict[Instance, list[Instance]] = {v: [] for v in self.vertices}
        for s, d in sorted(self.edges, key=lambda e: (str(e[0]), str(e[1]))):
            adj[s].append(d)
        return adj


@dataclass(frozen=True)
class Violation:
    kind: str  # "signature" | "local" | "parity"
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(f"{v.kind}: {v.detail}" for v in self.violations)


def validate_evidence_graph(g: EvidenceGraph, p: Pbes,
                            bounds: Bounds = DEFAULT_BOUNDS) -> ValidationReport:
    """Check the certificate conditions of ``g`` against ``p``.

    Proof polarity: the successor set of each vertex, taken as the only true
    instances, must satisfy the vertex's right-hand side, and no cycle may
    have odd minimal rank. Refutation polarity is the dual: successors taken
    as the only false instances must falsify the right-hand side, and no
    cycle may have even minimal rank.
    """
    violations: list[Violation] = []
    eq_of = {eq.var: eq for eq in p.equations}
    rank_of = ranks(p)
    adj = g.adjacency()

    for inst in sorted(g.vertices, key=str):
        eq = eq_of.get(inst.var)
        if eq is None:
            violations.append(Violation("signature", f"{inst} names an unbound variable"))
            continue
        if len(inst.args) != len(eq.params) or any(
                value_sort(v) is not sort for v, (_, sort) in zip(inst.args, eq.params)):
            violations.append(Violation("signature", f"{inst} does not match parameters"))
            continue
        if g.polarity == PROOF:
            eta = PredicateEnvironment({d: True for d in adj[inst]}, default=False)
            expected = True
        else:
            eta = PredicateEnvironment({d: False for d in adj[inst]}, default=True)
            expected = False
        delta = DataEnvironment(
            {name: value for (name, _), value in zip(eq.params, inst.args)})
        got = eval_predicate_formula(eq.rhs, eta, delta, bounds)
        if got is not expected:
            violations.append(Violation(
                "local",
                f"{inst}: right-hand side is {format_value(got).lower()} under its "
                f"successor environment"))

    bad_parity = ODD if g.polarity == PROOF else EVEN
    cycle = _find_bad_cycle_scc(g, rank_of, bad_parity)
    if cycle is not None:
        names = ", ".join(str(v) for v in cycle)
        side = "odd" if bad_parity == ODD else "even"
        violations.append(Violation(
            "parity", f"cycle through {{{names}}} has {side} minimal rank"))
    return ValidationReport(tuple(violations))


def _find_bad_cycle_scc(g: EvidenceGraph, rank_of: Mapping[str, int],
                        bad_parity: int) -> Optional[list[Instance]]:
    """Return vertices of a strongly connected subgraph whose minimal rank
    has the bad parity, or None. Every infinite path settles inside some SCC
    and there is a cycle through that SCC's minimal-rank vertex, so checking
    SCC minima (peeling off good minimal ranks) is equivalent to the
    infinite-path condition."""
    adj = g.adjacency()
    work: list[dict[Instance, list[Instance]]] = [adj]
    while work:
        sub = work.pop()
        for comp in _sccs(sub):
            has_cycle = len(comp) > 1 or comp[0] in sub.get(comp[0], ())
            if not has_cycle:
                continue
            m = min(rank_of[v.var] for v in comp)
            if m % 2 == bad_parity:
                return comp
            keep = {v for v in comp if rank_of[v.var] > m}
            work.append({v: [d for d in sub[v] if d in keep] for v in keep})
    return None


def _sccs(adj: Mapping[Instance, list[Instance]]) -> list[list[Instance]]:
    """Tarjan's algorithm, iterative."""
    index: dict[Instance, int] = {}
    low: dict[Instance, int] = {}
    on_stack: set[Instance] = set()
    stack: list[Instance] = []
    out: list[list[Instance]] = []
    counter = 0
    for root in adj:
        if root in index:
            continue
        call_stack: list[tuple[Instance, int]] = [(root, 0)]
        while call_stack:
            v, child = call_stack[-1]
            if child == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            advanced = False
            for i in range(child, len(adj[v])):
                w = adj[v][i]
                if w not in index:
                    call_stack[-1] = (v, i + 1)
                    call_stack.append((w, 0))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            call_stack.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
            if call_stack:
                u, _ = call_stack[-1]
                low[u] = min(low[u], low[v])
    return out


# ---------------------------------------------------------------------------
# DOT export


def parity_game_dot(game: ParityGame) -> str:
    lines = ["digraph parity_game {"]
    for v in range(len(game)):
        orig = game.origin[v]
        if isinstance(orig, Instance):
            label = f"{orig}\\nrank {game.priority[v]}"
            extra = ", peripheries=2" if _is_z_instance(orig) else ""
        elif orig in ("true", "false"):
            label = orig
            extra = ""
        else:
            label = str(game.priority[v])
            extra = ""
        shape = "diamond" if game.owner[v] == EVEN else "box"
        init = ", penwidth=2" if v == game.initial else ""
        lines.append(f'  v{v} [label="{label}", shape={shape}{extra}{init}];')
    for v in range(len(game)):
        for w in game.succ[v]:
            lines.append(f"  v{v} -> v{w};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def relevancy_dot(rg: RelevancyGraph) -> str:
    ids = {inst: i for i, inst in enumerate(rg.vertices)}
    lines = ["digraph relevancy {"]
    for inst, i in ids.items():
        extra = ", peripheries=2" if _is_z_instance(inst) else ""
        init = ", penwidth=2" if inst == rg.root else ""
        lines.append(f'  v{i} [label="{inst}"{extra}{init}];')
    for inst in rg.vertices:
        for dep in rg.edges.get(inst, ()):
            lines.append(f"  v{ids[inst]} -> v{ids[dep]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def evidence_dot(g: EvidenceGraph) -> str:
    order = sorted(g.vertices, key=str)
    ids = {inst: i for i, inst in enumerate(order)}
    lines = [f"digraph {g.polarity} {{"]
    for inst, i in ids.items():
        extra = ", peripheries=2" if _is_z_instance(inst) else ""
        init = ", penwidth=2" if inst == g.root else ""
        lines.append(
            f'  v{i} [label="{inst}\\nrank {g.ranks.get(inst.var, "?")}"{extra}{init}];')
    for s, d in sorted(g.edges, key=lambda e: (str(e[0]), str(e[1]))):
        lines.append(f"  v{ids[s]} -> v{ids[d]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _is_z_instance(inst: Instance) -> bool:
    from .encode import is_evidence_variable

    return is_evidence_variable(inst.var)
