"""Independent reference implementations used only to check the real ones.

Each oracle takes a deliberately different route than the code under test:
the formula checker works on explicit state sets, the game solver
enumerates positional strategies, and the rank oracle counts alternations
directly off the fixpoint sequence.
"""
from __future__ import annotations

from itertools import product

from mucheck.formula import (
    BoolConst,
    Box,
    Diamond,
    FAnd,
    FixVar,
    FOr,
    Fixpoint,
    MuFormula,
)
from mucheck.graphs import ParityGame
from mucheck.model import Lts


def lts_states_satisfying(lts: Lts, phi: MuFormula) -> frozenset:
    """Fixpoint evaluation of a closed formula over explicit state sets."""
    states = frozenset(lts.states)
    succ: dict = {}
    for src, action, dst in lts.transitions:
        succ.setdefault((src, action), set()).add(dst)

    def sat(f: MuFormula, env: dict) -> frozenset:
        if isinstance(f, BoolConst):
            return states if f.value else frozenset()
        if isinstance(f, FixVar):
            return env[f.name]
        if isinstance(f, FAnd):
            return sat(f.left, env) & sat(f.right, env)
        if isinstance(f, FOr):
            return sat(f.left, env) | sat(f.right, env)
        if isinstance(f, Diamond):
            body = sat(f.body, env)
            return frozenset(s for s in states
                             if succ.get((s, f.action), frozenset()) & body)
        if isinstance(f, Box):
            body = sat(f.body, env)
            return frozenset(s for s in states
                             if succ.get((s, f.action), frozenset()) <= body)
        if isinstance(f, Fixpoint):
            current = frozenset() if f.op == "mu" else states
            while True:
                inner = dict(env)
                inner[f.var] = current
                updated = sat(f.body, inner)
                if updated == current:
                    return current
                current = updated
        raise TypeError(f"unknown formula node {f!r}")

    return sat(phi, {})


def lts_check(lts: Lts, phi: MuFormula) -> bool:
    return lts.initial in lts_states_satisfying(lts, phi)


def brute_force_game_winners(game: ParityGame) -> list[int]:
    """Winner per vertex by enumerating positional strategies of both
    players and analysing the cycles of the induced single-successor graph.
    Exponential; only for very small games."""
    n = len(game)
    even_vertices = [v for v in range(n) if game.owner[v] == 0]
    odd_vertices = [v for v in range(n) if game.owner[v] == 1]

    def plays_won_by_even(sigma: dict, tau: dict) -> list[bool]:
        # with both strategies fixed, each vertex has one successor; the
        # play from v ends in a unique cycle whose min priority decides
        choice = {}
        for v in range(n):
            choice[v] = sigma[v] if game.owner[v] == 0 else tau[v]
        result = [False] * n
        for v in range(n):
            seen: dict[int, int] = {}
            path = []
            cur = v
            while cur not in seen:
                seen[cur] = len(path)
                path.append(cur)
                cur = choice[cur]
            cycle = path[seen[cur]:]
            result[v] = min(game.priority[w] for w in cycle) % 2 == 0
        return result

    even_options = [game.succ[v] for v in even_vertices]
    odd_options = [game.succ[v] for v in odd_vertices]

    winners = [1] * n
    # Even wins v iff some sigma beats every tau from v
    for sigma_choice in product(*even_options) if even_vertices else [()]:
        sigma = dict(zip(even_vertices, sigma_choice))
        beaten = [True] * n
        for tau_choice in product(*odd_options) if odd_vertices else [()]:
            tau = dict(zip(odd_vertices, tau_choice))
            outcome = plays_won_by_even(sigma, tau)
            beaten = [b and o for b, o in zip(beaten, outcome)]
            if not any(beaten):
                break
        for v in range(n):
            if beaten[v]:
                winners[v] = 0
    return winners


def alternation_ranks(fixpoints: list[str]) -> list[int]:
    """Rank per equation by direct alternation counting."""
    out = []
    r = None
    prev = None
    for fix in fixpoints:
        if r is None:
            r = 0 if fix == "nu" else 1
        elif fix != prev:
            r += 1
        prev = fix
        out.append(r)
    return out
