"""Witness / counterexample extraction and LTS serialisation.

A proof graph marks the transitions a witness needs through its Zp
instances: Zp_a(d, d') stands for the a-transition from state d to d'.
Refutation graphs dually mark counterexample transitions through Zm
instances. Collecting those transitions (plus the initial state) yields a
sub-LTS of the model that explains the verdict.
"""
from __future__ import annotations

from .encode import evidence_action, evidence_polarity
from .graphs import PROOF, EvidenceGraph
from .kernel import Bounds, DEFAULT_BOUNDS, Value
from .model import Lpe, Lts, state_order, summand_targets


class DanglingEvidence(ValueError):
    """An evidence transition is not derivable from the model; this signals
    an encoder or solver bug, not bad user input."""


def evidence_lts(g: EvidenceGraph, lpe: Lpe, init: Value,
                 bounds: Bounds = DEFAULT_BOUNDS) -> Lts:
    """Extract the explanation LTS from a certificate graph.

    Every Zp (proof) or Zm (refutation) instance Z(d, d') in the graph
    becomes a transition d -a-> d'; states are the transition endpoints plus
    the initial state. Each transition is re-derived from its summand as a
    consistency check.
    """
    wanted = "plus" if g.polarity == PROOF else "minus"
    transitions: set[tuple[Value, str, Value]] = set()
    for inst in g.vertices:
        side = evidence_polarity(inst.var)
        if side != wanted:
            continue
        action = evidence_action(inst.var)
        src, dst = inst.args
        if dst not in summand_targets(lpe, lpe.summand_for(action), src, bounds):
            raise DanglingEvidence(
                f"{inst}: no {action}-transition from {src} to {dst} in the model")
        transitions.add((src, action, dst))
    states = {init} | {s for s, _, _ in transitions} | {d for _, _, d in transitions}
    return Lts(init, frozenset(states), frozenset(transitions))


def export_aut(lts: Lts) -> str:
    """Aldebaran format; states indexed by first-visit order from the
    initial state."""
    order = state_order(lts)
    index = {state: i for i, state in enumerate(order)}
    trans = sorted((index[src], action, index[dst])
                   for src, action, dst in lts.transitions)
    lines = [f"des (0, {len(trans)}, {len(order)})"]
    for src, action, dst in trans:
        lines.append(f'({src}, "{action}", {dst})')
    return "\n".join(lines) + "\n"


def export_dot_lts(lts: Lts) -> str:
    order = state_order(lts)
    index = {state: i for i, state in enumerate(order)}
    lines = ["digraph lts {"]
    for state in order:
        init = ", penwidth=2" if state == lts.initial else ""
        lines.append(f'  s{index[state]} [label="{state}", shape=circle{init}];')
    for src, action, dst in sorted(lts.transitions,
                                   key=lambda t: (index[t[0]], t[1], index[t[2]])):
        lines.append(f'  s{index[src]} -> s{index[dst]} [label="{action}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
