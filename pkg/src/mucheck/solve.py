"""Zielonka's recursive algorithm (min-priority convention) with positional
strategy extraction, and construction of certificate graphs from strategies.

The recursion is simulated on an explicit frame stack, so the solver is
unaffected by the interpreter recursion limit regardless of game depth.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .graphs import EVEN, ODD, PROOF, REFUTATION, EvidenceGraph, ParityGame
from .pbes import Instance


class WrongPolarity(ValueError):
    pass


@dataclass
class GameSolution:
    win: list[int]       # winner per vertex
    strategy: list[int]  # winning move per vertex owned by its winner, else -1


def zielonka(game: ParityGame) -> GameSolution:
    """Solve the game; every vertex must have at least one successor.

    Returns the winner partition and, for each vertex owned by the player
    winning it, one winning move. Ties between equally winning moves are
    broken towards the lowest vertex index, so results are deterministic.
    """
    n = len(game)
    succ = game.succ
    owner = game.owner
    priority = game.priority
    pred: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        for w in succ[v]:
            pred[w].append(v)

    def attract(region: set[int], player: int, targets: list[int]):
        """Player's attractor to ``targets`` within ``region``; also the
        attracting move for player-owned vertices outside ``targets``."""
        area = set(targets)
        strat: dict[int, int] = {}
        queue = deque(targets)
        needed: dict[int, int] = {}
        while queue:
            v = queue.popleft()
            for u in pred[v]:
                if u not in region or u in area:
                    continue
                if owner[u] == player:
                    area.add(u)
                    strat[u] = v
                    queue.append(u)
                else:
                    c = needed.get(u)
                    if c is None:
                        c = sum(1 for w in succ[u] if w in region)
                    c -= 1
                    needed[u] = c
                    if c == 0:
                        area.add(u)
                        queue.append(u)
        return area, strat

    # Explicit recursion. A frame solves the subgame on S; results are
    # (wins[0], wins[1], strats[0], strats[1]).
    result = None
    stack: list[dict] = [{"S": set(range(n)), "phase": 0}]
    while stack:
        f = stack[-1]
        if f["phase"] == 0:
            S = f["S"]
            if not S:
                result = (set(), set(), {}, {})
                stack.pop()
                continue
            m = min(priority[v] for v in S)
            p = m % 2
            targets = sorted(v for v in S if priority[v] == m)
            area, astrat = attract(S, p, targets)
            f.update(m=m, p=p, U=targets, A=area, astrat=astrat, phase=1)
            stack.append({"S": S - area, "phase": 0})
        elif f["phase"] == 1:
            w0, w1, s0, s1 = result
            p = f["p"]
            opp_win = (w1, w0)[p]  # opponent's winning set in the subgame
            if not opp_win:
                S = f["S"]
                strat = (s0, s1)[p]
                strat.update(f["astrat"])
                for v in f["U"]:
                    if owner[v] == p:
                        strat[v] = next(w for w in succ[v] if w in S)
                wins = (S, set()) if p == EVEN else (set(), S)
                strats = (strat, {}) if p == EVEN else ({}, strat)
                result = (wins[0], wins[1], strats[0], strats[1])
                stack.pop()
            else:
                opp = 1 - p
                area, bstrat = attract(f["S"], opp, sorted(opp_win))
                f.update(B=area, bstrat=bstrat, phase=2,
                         opp_strat=(s0, s1)[opp])
                stack.append({"S": f["S"] - area, "phase": 0})
        else:
            w0, w1, s0, s1 = result
            p = f["p"]
            opp = 1 - p
            opp_strat = (s0, s1)[opp]
            opp_strat.update(f["bstrat"])
            opp_strat.update(f["opp_strat"])
            opp_win = (w0, w1)[opp] | f["B"]
            if opp == EVEN:
                result = (opp_win, (w0, w1)[p], opp_strat, (s0, s1)[p])
            else:
                result = ((w0, w1)[p], opp_win, (s0, s1)[p], opp_strat)
            stack.pop()

    w0, w1, s0, s1 = result
    win = [ODD] * n
    strategy = [-1] * n
    for v in w0:
        win[v] = EVEN
    for v, w in s0.items():
        strategy[v] = w
    for v, w in s1.items():
        strategy[v] = w
    for v in range(n):
        if owner[v] != win[v]:
            strategy[v] = -1
    return GameSolution(win, strategy)


def extract_evidence_graph(game: ParityGame, sol: GameSolution,
                           polarity: str) -> EvidenceGraph:
    """Certificate graph from a winning strategy.

    Within the winner's region, winner-owned vertices keep only their
    strategy move and loser-owned vertices keep every move; synthetic
    vertices are collapsed so edges run instance to instance; the result is
    restricted to what is reachable from the initial vertex.
    """
    player = EVEN if polarity == PROOF else ODD
    if sol.win[game.initial] != player:
        raise WrongPolarity(
            f"initial vertex is won by the other player; no {polarity} graph exists")

    def allowed(v: int) -> list[int]:
        if game.owner[v] == player:
            move = sol.strategy[v]
            assert move >= 0, "winner-owned vertex without a strategy move"
            return [move]
        return game.succ[v]

    init_inst = game.origin[game.initial]
    assert isinstance(init_inst, Instance)
    vertices: set[Instance] = set()
    edges: set[tuple[Instance, Instance]] = set()
    rank_map: dict[str, int] = {}
    queue: deque[int] = deque([game.initial])
    seen_instances = {game.initial}
    while queue:
        v = queue.popleft()
        inst = game.origin[v]
        vertices.add(inst)
        rank_map.setdefault(inst.var, game.priority[v])
        # walk through synthetic vertices to the next instances
        walk = deque(allowed(v))
        walked: set[int] = set()
        while walk:
            u = walk.popleft()
            orig = game.origin[u]
            if isinstance(orig, Instance):
                edges.add((inst, orig))
                if u not in seen_instances:
                    seen_instances.add(u)
                    queue.append(u)
            elif orig is None:
                if u not in walked:
                    walked.add(u)
                    walk.extend(allowed(u))
            # "true"/"false" vertices terminate silently
    return EvidenceGraph(polarity, init_inst, frozenset(vertices),
                         frozenset(edges), rank_map)
