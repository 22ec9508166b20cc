"""The guided restriction that turns a phase-1 certificate into a small
phase-2 solving problem, and the end-to-end pipeline built on it.

The restriction replaces every call to a non-bookkeeping variable by the
call guarded with membership of the guiding graph's edge set: only
dependencies the phase-1 certificate actually used remain expandable. In
the pipeline it is never materialised as a rewritten equation system; the
guarded right-hand sides are computed on the fly during instantiation.
``materialize_combine`` builds the rewritten system literally (including
the clauses that are vacuous at any concrete instance) for tests and
debugging.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Mapping, Optional

from .encode import (
    core_of,
    encode_with_evidence,
    evidence_variables_of,
    strip_for_polarity,
)
from .formula import MuFormula
from .graphs import (
    EVEN,
    PROOF,
    REFUTATION,
    EvidenceGraph,
    ParityGame,
    RelevancyGraph,
    instantiate,
    relevancy_proxy,
)
from .kernel import BinOp, Bounds, Const, DEFAULT_BOUNDS, Term, Value
from .model import Lpe
from .pbes import (
    Call,
    Equation,
    Exists,
    Forall,
    Instance,
    PAnd,
    PF_FALSE,
    POr,
    Pbes,
    PredicateFormula,
    Val,
    exists,
    forall,
    pand,
    por,
    substitute_calls,
)
from .solve import GameSolution, extract_evidence_graph, zielonka

log = logging.getLogger(__name__)


class UnknownInstance(ValueError):
    pass


@dataclass(frozen=True)
class CombineContext:
    """Per-variable vertex sets and per-instance allowed dependencies of a
    guiding certificate graph. Bookkeeping (Z) variables are never
    restricted."""

    vertex_args: Mapping[str, frozenset[tuple[Value, ...]]]
    allowed: Mapping[tuple[Instance, str], frozenset[tuple[Value, ...]]]
    zvars: frozenset[str]

    @staticmethod
    def from_guiding_graph(g: EvidenceGraph, zvars: frozenset[str]) -> "CombineContext":
        vertex_args: dict[str, set] = {}
        allowed: dict[tuple[Instance, str], set] = {}
        for inst in g.vertices:
            vertex_args.setdefault(inst.var, set()).add(inst.args)
        for src, dst in g.edges:
            allowed.setdefault((src, dst.var), set()).add(dst.args)
        return CombineContext(
            {var: frozenset(args) for var, args in vertex_args.items()},
            {key: frozenset(args) for key, args in allowed.items()},
            zvars,
        )

    def allows(self, source: Instance, var: str, args: tuple) -> bool:
        if var in self.zvars:
            return True
        svars = self.vertex_args.get(source.var)
        if svars is None or source.args not in svars:
            raise UnknownInstance(
                f"{source} is not a vertex of the guiding graph")
        return args in self.allowed.get((source, var), frozenset())


def combine_rhs(ctx: CombineContext, var: str, args: tuple[Value, ...],
                rhs: PredicateFormula) -> PredicateFormula:
    """Right-hand side of the concrete instance var(args) under the guided
    restriction, beta-reduced: since the instance is fixed, the guard
    conjunction collapses to the single clause for these argument values."""
    source = Instance(var, args)
    svars = ctx.vertex_args.get(var)
    if svars is None or args not in svars:
        raise UnknownInstance(f"{source} is not a vertex of the guiding graph")
    return _guard_calls(rhs, ctx, source)


def _guard_calls(pf: PredicateFormula, ctx: CombineContext,
                 source: Instance) -> PredicateFormula:
    if isinstance(pf, Val):
        return pf
    if isinstance(pf, Call):
        if pf.var in ctx.zvars:
            return pf
        targets = ctx.allowed.get((source, pf.var), frozenset())
        return pand([_membership(pf.args, targets), pf])
    if isinstance(pf, PAnd):
        return pand([_guard_calls(a, ctx, source) for a in pf.args])
    if isinstance(pf, POr):
        return por([_guard_calls(a, ctx, source) for a in pf.args])
    if isinstance(pf, Exists):
        return exists(pf.var, pf.sort, _guard_calls(pf.body, ctx, source))
    if isinstance(pf, Forall):
        return forall(pf.var, pf.sort, _guard_calls(pf.body, ctx, source))
    raise TypeError(f"unknown formula node {pf!r}")


def _membership(args: tuple[Term, ...], targets: frozenset[tuple[Value, ...]]) -> PredicateFormula:
    """``args in targets`` as a data atom (disjunction of equalities)."""
    if not targets:
        return PF_FALSE
    clauses = []
    for values in sorted(targets, key=str):
        eqs: Optional[Term] = None
        for arg, value in zip(args, values):
            one = BinOp("==", arg, Const(value))
            eqs = one if eqs is None else BinOp("&&", eqs, one)
        clauses.append(eqs if eqs is not None else Const(True))
    disj = clauses[0]
    for clause in clauses[1:]:
        disj = BinOp("||", disj, clause)
    return Val(disj)


def materialize_combine(p: Pbes, ctx: CombineContext) -> Pbes:
    """The guided restriction as a literal rewrite of every equation.

    Every call Y(e) with Y unrestricted becomes the full guard conjunction
    over the guiding graph's vertices of the calling variable, as in the
    defining substitution (no per-instance collapse). Intended for small
    systems; the pipeline never calls this.
    """
    rewritten = []
    for eq in p.equations:
        vset = ctx.vertex_args.get(eq.var, frozenset())
        param_terms = [_param_var(n, s) for n, s in eq.params]
        lam_params = tuple(f"{eq.var}_arg{i}" for i in range(len(eq.params)))
        subs: dict[str, tuple[tuple[str, ...], PredicateFormula]] = {}
        for other in p.equations:
            if other.var in ctx.zvars:
                continue
            formals = tuple(f"e{i}" for i in range(len(other.params)))
            formal_terms = tuple(
                _param_var(f, s) for f, (_, s) in zip(formals, other.params))
            clauses = []
            for values in sorted(vset, key=str):
                eq_guard: Optional[Term] = None
                for pt, value in zip(param_terms, values):
                    one = BinOp("==", pt, Const(value))
                    eq_guard = one if eq_guard is None else BinOp("&&", eq_guard, one)
                member = _membership(
                    formal_terms,
                    ctx.allowed.get((Instance(eq.var, values), other.var),
                                    frozenset()))
                body = pand([member, Call(other.var, formal_terms)])
                guard = Val(eq_guard) if eq_guard is not None else Val(Const(True))
                clauses.append(por([Val(_negate(eq_guard)), body])
                               if eq_guard is not None else body)
            subs[other.var] = (formals, pand(clauses))
        rewritten.append(Equation(eq.fix, eq.var, eq.params,
                                  substitute_calls(eq.rhs, subs)))
    return Pbes(tuple(rewritten), p.init)


def _param_var(name: str, sort) -> Term:
    from .kernel import Var

    return Var(name, sort)


def _negate(t: Term) -> Term:
    from .kernel import Not

    return Not(t)


# ---------------------------------------------------------------------------
# Pipeline


@dataclass
class CheckResult:
    verdict: bool
    mode: str
    evidence: Optional[EvidenceGraph]
    encoded: Pbes
    guiding: Optional[EvidenceGraph] = None
    stripped: Optional[Pbes] = None
    context: Optional[CombineContext] = None
    phase1_vertices: Optional[int] = None
    phase2_vertices: Optional[int] = None
    direct_vertices: Optional[int] = None
    wall_times_ms: dict = None  # phase name -> milliseconds

    def stats(self) -> dict:
        return {
            "mode": self.mode,
            "verdict": self.verdict,
            "phase1_vertices": self.phase1_vertices,
            "phase2_vertices": self.phase2_vertices,
            "direct_vertices": self.direct_vertices,
            "wall_times_ms": self.wall_times_ms,
        }


def run_pipeline(lpe: Lpe, phi: MuFormula, init: Value,
                 bounds: Bounds = DEFAULT_BOUNDS) -> CheckResult:
    """Solve the plain core first, then re-solve the evidence system
    restricted by the phase-1 certificate.

    Phase 1 settles the verdict and produces a guiding proof (or refutation)
    graph of the core; phase 2 instantiates only the dependencies that graph
    allows, which keeps the bookkeeping vertices to the ones the final
    evidence needs.
    """
    times: dict[str, float] = {}
    encoded = encode_with_evidence(lpe, phi, init)
    zvars = frozenset(evidence_variables_of(encoded).all_names)

    start = time.perf_counter()
    core = core_of(encoded)
    core_game = instantiate(core, bounds)
    core_sol = zielonka(core_game)
    verdict = core_sol.win[core_game.initial] == EVEN
    polarity = PROOF if verdict else REFUTATION
    guiding = extract_evidence_graph(core_game, core_sol, polarity)
    times["phase1"] = (time.perf_counter() - start) * 1000.0
    log.info("phase 1: %d instance vertices, verdict %s",
             core_game.num_instance_vertices, verdict)

    start = time.perf_counter()
    stripped = strip_for_polarity(encoded, verdict)
    ctx = CombineContext.from_guiding_graph(guiding, zvars)
    game2 = instantiate(stripped, bounds, rhs_provider=ctx)
    sol2 = zielonka(game2)
    evidence = extract_evidence_graph(game2, sol2, polarity)
    times["phase2"] = (time.perf_counter() - start) * 1000.0
    log.info("phase 2: %d instance vertices, evidence %d vertices",
             game2.num_instance_vertices, len(evidence.vertices))

    return CheckResult(
        verdict=verdict, mode="two-step", evidence=evidence, encoded=encoded,
        guiding=guiding, stripped=stripped, context=ctx,
        phase1_vertices=core_game.num_instance_vertices,
        phase2_vertices=game2.num_instance_vertices,
        wall_times_ms=times)


def run_direct(lpe: Lpe, phi: MuFormula, init: Value,
               bounds: Bounds = DEFAULT_BOUNDS) -> CheckResult:
    """Solve the full evidence system in one pass (the unguided baseline)."""
    times: dict[str, float] = {}
    encoded = encode_with_evidence(lpe, phi, init)
    start = time.perf_counter()
    game = instantiate(encoded, bounds)
    sol = zielonka(game)
    verdict = sol.win[game.initial] == EVEN
    evidence = extract_evidence_graph(
        game, sol, PROOF if verdict else REFUTATION)
    times["direct"] = (time.perf_counter() - start) * 1000.0
    log.info("direct: %d instance vertices", game.num_instance_vertices)
    return CheckResult(
        verdict=verdict, mode="direct", evidence=evidence, encoded=encoded,
        direct_vertices=game.num_instance_vertices, wall_times_ms=times)


def run_plain(lpe: Lpe, phi: MuFormula, init: Value,
              bounds: Bounds = DEFAULT_BOUNDS) -> CheckResult:
    """Verdict only, from the core encoding; no evidence is produced."""
    times: dict[str, float] = {}
    encoded = encode_with_evidence(lpe, phi, init)
    start = time.perf_counter()
    core = core_of(encoded)
    game = instantiate(core, bounds)
    sol = zielonka(game)
    verdict = sol.win[game.initial] == EVEN
    times["phase1"] = (time.perf_counter() - start) * 1000.0
    return CheckResult(
        verdict=verdict, mode="plain", evidence=None, encoded=encoded,
        phase1_vertices=game.num_instance_vertices, wall_times_ms=times)
