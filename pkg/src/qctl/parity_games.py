"""Finite two-player min-parity games.

Player ``EVEN`` (0) wins an infinite play iff the least priority seen
infinitely often is even.  :func:`solve` is the recursive attractor
algorithm; :func:`brute_solve` enumerates memoryless strategy pairs and
serves as an oracle on tiny games.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field
from typing import Hashable

from .errors import QctlError, ScaleError

EVEN = 0
ODD = 1


@dataclass(frozen=True)
class ParityGame:
    owner: tuple[int, ...]
    succ: tuple[tuple[int, ...], ...]
    priority: tuple[int, ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        n = len(self.owner)
        if len(self.succ) != n or len(self.priority) != n:
            raise QctlError("inconsistent game arrays")
        for v in range(n):
            if not self.succ[v]:
                raise QctlError(f"position {v} has no move")
            if self.owner[v] not in (EVEN, ODD) or self.priority[v] < 0:
                raise QctlError(f"bad owner or priority at position {v}")
            for w in self.succ[v]:
                if not 0 <= w < n:
                    raise QctlError(f"edge {v} -> {w} out of range")

    def __len__(self) -> int:
        return len(self.owner)

    def name(self, v: int) -> str:
        return self.names[v] if self.names else str(v)

    def predecessors(self) -> list[list[int]]:
        pre: list[list[int]] = [[] for _ in self.owner]
        for v, out in enumerate(self.succ):
            for w in out:
                pre[w].append(v)
        return pre


class GameBuilder:
    """Incremental construction with positions interned by hashable keys."""

    def __init__(self):
        self.index: dict[Hashable, int] = {}
        self.keys: list[Hashable] = []
        self.owner: list[int] = []
        self.priority: list[int] = []
        self.succ: list[list[int]] = []

    def add(self, key: Hashable, owner: int, priority: int) -> tuple[int, bool]:
        """Return (position, created)."""
        v = self.index.get(key)
        if v is not None:
            return v, False
        v = len(self.keys)
        self.index[key] = v
        self.keys.append(key)
        self.owner.append(owner)
        self.priority.append(priority)
        self.succ.append([])
        return v, True

    def edge(self, v: int, w: int) -> None:
        self.succ[v].append(w)

    def build(self, names: bool = False) -> ParityGame:
        succ = tuple(tuple(dict.fromkeys(s)) for s in self.succ)
        nm = tuple(str(k) for k in self.keys) if names else None
        return ParityGame(tuple(self.owner), succ, tuple(self.priority), nm)


@dataclass
class Solution:
    winner: list[int]
    strategy: dict[int, int] = field(default_factory=dict)

    def region(self, player: int) -> set[int]:
        return {v for v, w in enumerate(self.winner) if w == player}

    def strategy_of(self, game: ParityGame, player: int) -> dict[int, int]:
        return {v: w for v, w in self.strategy.items()
                if game.owner[v] == player and self.winner[v] == player}


# ------------------------------------------------------------------ solver

def _attractor(g: ParityGame, pre, alive: set[int], target: set[int], player: int,
               strategy: dict[int, int]) -> set[int]:
    """Positions of ``alive`` from which ``player`` forces a visit to ``target``.

    Moves of ``player`` that realize the attraction are written to
    ``strategy`` (lowest-indexed successor of smaller rank).
    """
    attr = set(target)
    rank = {v: 0 for v in target}
    count = {}
    layer = sorted(target)
    r = 0
    while layer:
        r += 1
        nxt = []
        for w in layer:
            for v in pre[w]:
                if v not in alive or v in attr:
                    continue
                if g.owner[v] == player:
                    attr.add(v)
                    rank[v] = r
                    nxt.append(v)
                else:
                    c = count.get(v)
                    if c is None:
                        c = sum(1 for u in g.succ[v] if u in alive)
                    c -= 1
                    count[v] = c
                    if c == 0:
                        attr.add(v)
                        rank[v] = r
                        nxt.append(v)
        layer = sorted(set(nxt))
    for v in attr:
        if v not in target and g.owner[v] == player:
            strategy[v] = min(u for u in g.succ[v] if u in attr and rank[u] < rank[v])
    return attr


def solve(g: ParityGame) -> Solution:
    """Winning regions and memoryless winning strategies for both players."""
    pre = g.predecessors()
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10_000 + 4 * len(g)))
    try:
        w, strat = _zielonka(g, pre, set(range(len(g))))
    finally:
        sys.setrecursionlimit(limit)
    winner = [EVEN] * len(g)
    for v in w[ODD]:
        winner[v] = ODD
    return Solution(winner, strat)


def _zielonka(g: ParityGame, pre, alive: set[int]):
    if not alive:
        return (set(), set()), {}
    p = min(g.priority[v] for v in alive)
    i = p % 2
    top = {v for v in alive if g.priority[v] == p}
    strat: dict[int, int] = {}
    a = _attractor(g, pre, alive, top, i, strat)
    sub_w, sub_s = _zielonka(g, pre, alive - a)
    if not sub_w[1 - i]:
        w = [set(), set()]
        w[i] = set(alive)
        strat.update(sub_s)
        for v in top:
            if g.owner[v] == i:
                strat[v] = min(u for u in g.succ[v] if u in alive)
        return (w[0], w[1]), strat
    strat_b: dict[int, int] = {}
    b = _attractor(g, pre, alive, sub_w[1 - i], 1 - i, strat_b)
    w2, s2 = _zielonka(g, pre, alive - b)
    w = [set(), set()]
    w[1 - i] = w2[1 - i] | b
    w[i] = w2[i]
    out = dict(s2)
    for v in sub_w[1 - i]:
        if v in sub_s:
            out[v] = sub_s[v]
    out.update(strat_b)
    return (w[0], w[1]), out


# ------------------------------------------------------------------ oracle

BRUTE_MAX_POSITIONS = 10


def brute_solve(g: ParityGame) -> Solution:
    """Enumerate memoryless strategies of both players (tiny games only)."""
    n = len(g)
    if n > BRUTE_MAX_POSITIONS:
        raise ScaleError(f"brute-force solving supports at most {BRUTE_MAX_POSITIONS} positions")
    mine = [v for v in range(n) if g.owner[v] == EVEN]
    theirs = [v for v in range(n) if g.owner[v] == ODD]
    even_choices = list(itertools.product(*(g.succ[v] for v in mine)))
    odd_choices = list(itertools.product(*(g.succ[v] for v in theirs)))

    def play_winner(start, move) -> int:
        seen: dict[int, int] = {}
        path = []
        v = start
        while v not in seen:
            seen[v] = len(path)
            path.append(v)
            v = move[v]
        cycle = path[seen[v]:]
        return min(g.priority[u] for u in cycle) % 2

    winner = [ODD] * n
    strategy: dict[int, int] = {}
    for v in range(n):
        for ec in even_choices:
            move = dict(zip(mine, ec))
            ok = True
            for oc in odd_choices:
                move.update(zip(theirs, oc))
                if play_winner(v, move) != EVEN:
                    ok = False
                    break
            if ok:
                winner[v] = EVEN
                break
    # Odd strategy is not reconstructed; regions are the oracle output
    return Solution(winner, strategy)


# ------------------------------------------------------------ self-check

def verify_strategy(g: ParityGame, sol: Solution, player: int) -> bool:
    """Check that ``player``'s strategy keeps plays in its region and wins.

    In the graph restricted to the region, where ``player`` only uses its
    strategy, every cycle must have least priority of ``player``'s parity.
    """
    region = sol.region(player)
    adj: dict[int, tuple[int, ...]] = {}
    for v in region:
        if g.owner[v] == player:
            w = sol.strategy.get(v)
            if w is None or w not in region or w not in g.succ[v]:
                return False
            adj[v] = (w,)
        else:
            if any(w not in region for w in g.succ[v]):
                return False
            adj[v] = g.succ[v]
    bad_parities = sorted({g.priority[v] for v in region if g.priority[v] % 2 != player})
    for p in bad_parities:
        keep = {v for v in region if g.priority[v] >= p}
        for comp in _sccs(keep, adj):
            if any(g.priority[v] == p for v in comp) and _has_cycle(comp, adj):
                return False
    return True


def _has_cycle(comp: list[int], adj) -> bool:
    if len(comp) > 1:
        return True
    v = comp[0]
    return v in adj[v]


def _sccs(nodes: set[int], adj) -> list[list[int]]:
    """Tarjan's algorithm, iterative."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on: set[int] = set()
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in sorted(nodes):
        if root in index:
            continue
        work = [(root, iter(adj[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in nodes:
                    continue
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w in on:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def game_to_dot(g: ParityGame, sol: Solution | None = None, name: str = "G") -> str:
    """Diamonds for Even, boxes for Odd; labels show priorities."""
    out = [f"digraph {name} {{"]
    for v in range(len(g)):
        shape = "diamond" if g.owner[v] == EVEN else "box"
        label = f"{g.name(v)}\\n{g.priority[v]}".replace('"', "'")
        extra = ""
        if sol is not None:
            extra = ", style=filled, fillcolor=" + ("palegreen" if sol.winner[v] == EVEN else "lightpink")
        out.append(f'  v{v} [label="{label}", shape={shape}{extra}];')
    for v, outs in enumerate(g.succ):
        for w in outs:
            bold = sol is not None and sol.strategy.get(v) == w
            out.append(f"  v{v} -> v{w}" + (" [penwidth=2];" if bold else ";"))
    out.append("}")
    return "\n".join(out) + "\n"
