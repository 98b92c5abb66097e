"""Satisfiability under the tree semantics.

The formula is rewritten for binary branching (internal nodes flagged by
a fresh proposition), compiled into a nondeterministic parity tree
automaton over {1,2}-trees and tested for emptiness.  A winning strategy
of the emptiness game is a regular tree; collapsing its internal nodes
gives a finite structure whose unwinding satisfies the formula.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

from . import logic_ast as L
from .errors import BlowUpError, QctlError, UndecidableError
from .kripke import P_INT, KripkeStructure, RegularTree
from .logic_ast import AF, AG, And, Not, Prop
from .mc_structure import sat_set
from .mc_tree import check_tree, compile_formula
from .parity_games import EVEN, ODD, GameBuilder, ParityGame, solve
from .transforms import hat_transform
from .tree_automata import DEFAULT_STATE_CAP, Npta, letters_of, simulate

DEFAULT_POSITION_CAP = 2_000_000


# ---------------------------------------------------------------- emptiness

@dataclass
class EmptinessResult:
    empty: bool
    tree: RegularTree | None = None
    game: ParityGame | None = None
    positions: int = 0
    automaton_states: int = 0


def _limited(stream, limit: int) -> tuple[list, bool]:
    out = []
    for tup in stream:
        if len(out) == limit:
            return out, True
        out.append(tup)
    return out, False


def emptiness_game(n: Npta, position_cap: int = DEFAULT_POSITION_CAP, limit: int | None = None):
    """Even picks a letter, a degree and a disjunct; Odd picks a direction.

    With ``limit``, Even only gets the first ``limit`` disjuncts per letter
    and degree, which can only shrink her winning region.  Returns
    (game, start, builder, letter, complete) where ``letter`` maps an Even
    move to the letter enabling it and ``complete`` says that nothing was
    cut off.
    """
    gb = GameBuilder()
    bot, _ = gb.add(("bot",), EVEN, 1)
    gb.edge(bot, bot)
    letters = letters_of(n.universe)
    degrees = sorted(n.degrees)
    letter: dict[tuple[int, int], frozenset] = {}
    work: list[tuple[int, object]] = []
    choice_positions: list[int] = []
    stream = getattr(n, "choice_stream", None)
    complete = True

    def state_pos(q) -> int:
        v, new = gb.add(("q", q), EVEN, n.priority(q))
        if new:
            work.append((v, q))
        return v

    start = state_pos(n.initial)
    while work:
        if len(gb.keys) > position_cap:
            raise BlowUpError(f"emptiness game exceeds {position_cap} positions")
        v, q = work.pop()
        for sigma in letters:
            for d in degrees:
                if limit is None or stream is None:
                    tups = n.choices(q, sigma, d)
                else:
                    tups, cut = _limited(stream(q, sigma, d), limit)
                    complete = complete and not cut
                for tup in tups:
                    w, new = gb.add(("t", tup), ODD, -1)
                    if new:
                        choice_positions.append(w)
                        for r in tup:
                            gb.edge(w, state_pos(r))
                    if (v, w) not in letter:
                        letter[(v, w)] = sigma
                        gb.edge(v, w)
        if not gb.succ[v]:
            gb.edge(v, bot)
    top = max([p for p in gb.priority if p >= 0] + [1])
    for w in choice_positions:
        gb.priority[w] = top
    return gb.build(), start, gb, letter, complete


LIMIT_SCHEDULE = (1, 2, 4, 16, None)


def emptiness(n: Npta, position_cap: int = DEFAULT_POSITION_CAP,
              schedule: tuple = LIMIT_SCHEDULE) -> EmptinessResult:
    """Decide whether ``n`` accepts some tree; if so return a regular one.

    Games with growing numbers of disjuncts are tried in turn; a win for
    Even in a restricted game is a win in the full one.
    """
    for limit in schedule:
        game, start, gb, letter, complete = emptiness_game(n, position_cap, limit)
        sol = solve(game)
        states = sum(1 for k in gb.keys if k[0] == "q")
        if sol.winner[start] == EVEN:
            return EmptinessResult(False, _extract(gb, sol, start, letter), game, len(game), states)
        if complete:
            return EmptinessResult(True, None, game, len(game), states)
    raise BlowUpError("emptiness undecided within the disjunct schedule")


def _extract(gb: GameBuilder, sol, start: int, letter) -> RegularTree:
    strategy = sol.strategy
    # nodes are (position, copy); copies keep repeated children apart
    order: list[tuple[int, int]] = [(start, 0)]
    index = {order[0]: 0}
    succ: list[list[int]] = []
    labels: list[frozenset] = []
    for node in order:
        v, _ = node
        w = strategy[v]
        labels.append(letter[(v, w)])
        tup = gb.keys[w][1]
        repeated = len(set(tup)) < len(tup)
        kids = []
        for c, r in enumerate(tup):
            child = (gb.index[("q", r)], c if repeated else 0)
            if child not in index:
                index[child] = len(order)
                order.append(child)
            kids.append(index[child])
        succ.append(kids)
    names = [f"n{i}" for i in range(len(order))]
    s = KripkeStructure(tuple(names), tuple(tuple(sorted(k)) for k in succ), tuple(labels), 0)
    return RegularTree(s, 0)


# ----------------------------------------------------------------- collapse

def collapse_internal(s: KripkeStructure, root: int, p_int: str = P_INT) -> KripkeStructure:
    """Replace paths through ``p_int`` states by direct edges.

    Every path from a regular state through internal states to a regular
    state becomes one successor, so states reached along several paths
    are copied to keep the branching degree of the unwinding.
    """
    internal = [p_int in lab for lab in s.labels]
    if internal[root]:
        raise QctlError("the root of a witness cannot be internal")
    memo: dict[int, Counter] = {}
    active: set[int] = set()

    def reach(u: int) -> Counter:
        # regular states reached from internal ``u``, counted by paths
        if u in memo:
            return memo[u]
        if u in active:
            raise QctlError("cycle of internal states in witness")
        active.add(u)
        out: Counter = Counter()
        for c in s.succ[u]:
            out.update(reach(c) if internal[c] else {c: 1})
        active.discard(u)
        memo[u] = out
        return out

    targets: dict[int, Counter] = {}

    def targets_of(u: int) -> Counter:
        if u not in targets:
            out: Counter = Counter()
            for c in s.succ[u]:
                out.update(reach(c) if internal[c] else {c: 1})
            targets[u] = out
        return targets[u]

    order: list[tuple[int, int]] = [(root, 0)]
    index = {order[0]: 0}
    succ: list[list[int]] = []
    for u, _ in order:
        kids = []
        for m, k in sorted(targets_of(u).items()):
            for j in range(k):
                if (m, j) not in index:
                    index[(m, j)] = len(order)
                    order.append((m, j))
                kids.append(index[(m, j)])
        succ.append(kids)
    names = [f"w{i}" for i in range(len(order))]
    labels = tuple(frozenset(s.labels[u] - {p_int}) for u, _ in order)
    return KripkeStructure(tuple(names), tuple(tuple(sorted(k)) for k in succ), labels, 0)


def minimize_witness(s: KripkeStructure, root: int) -> tuple[KripkeStructure, int]:
    """Merge states with isomorphic unwindings.

    Classes are refined by label and by the multiset of successor classes.
    The quotient is taken only when no state has two successors in one
    class, since merging them would change the branching degree.
    """
    reach = sorted(s.reachable(root))
    cls = {u: hash(s.labels[u]) for u in reach}
    count = len(set(cls.values()))
    while True:
        sig = {u: (cls[u], tuple(sorted(Counter(cls[c] for c in s.succ[u]).items()))) for u in reach}
        ids: dict = {}
        new = {u: ids.setdefault(sig[u], len(ids)) for u in reach}
        if len(ids) == count:
            cls = new
            break
        cls, count = new, len(ids)
    if any(len({cls[c] for c in s.succ[u]}) < len(s.succ[u]) for u in reach):
        return s, root
    order = [cls[root]]
    rep = {cls[root]: root}
    for k in order:
        for c in s.succ[rep[k]]:
            if cls[c] not in rep:
                rep[cls[c]] = c
                order.append(cls[c])
    pos = {k: i for i, k in enumerate(order)}
    succ = tuple(tuple(sorted(pos[cls[c]] for c in s.succ[rep[k]])) for k in order)
    labels = tuple(s.labels[rep[k]] for k in order)
    return KripkeStructure(tuple(f"w{i}" for i in range(len(order))), succ, labels, 0), 0


# ---------------------------------------------------------------------- sat

@dataclass
class SatResult:
    satisfiable: bool
    witness: KripkeStructure | None = None
    root: int | None = None
    binary_witness: RegularTree | None = None
    stats: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.satisfiable


def strip_outer_exists(f: L.Formula) -> tuple[tuple[str, ...], L.Formula]:
    props: list[str] = []
    while isinstance(f, L.Exists):
        props.extend(f.props)
        f = f.body
    return tuple(props), f


def sat(f: L.Formula, cap: int = DEFAULT_STATE_CAP, position_cap: int = DEFAULT_POSITION_CAP,
        verify: bool = True) -> SatResult:
    """Is ``f`` satisfied at the root of some regular tree?

    A satisfying result carries a finite witness structure; unless
    ``verify`` is off it has been re-checked against ``f``.
    """
    L.require_qctl(f)
    t0 = time.perf_counter()
    f = L.standardize_apart(f)
    stripped, g = strip_outer_exists(f)
    p_int = P_INT if P_INT not in L.all_props(f) else L.FreshNames(L.all_props(f))("p_int")
    I = Prop(p_int)
    target = L.conj(hat_transform(g, p_int), Not(I), AG(AF(Not(I))))
    universe = L.free_props(g) | {p_int}
    a = compile_formula(target, (1, 2), universe, cap)
    n = simulate(a, cap)
    res = emptiness(n, position_cap)
    stats = {"automatonStates": res.automaton_states, "gamePositions": res.positions,
             "stripped": list(stripped)}
    if res.empty:
        stats["millis"] = round(1000 * (time.perf_counter() - t0), 1)
        return SatResult(False, stats=stats)
    tree = res.tree
    pre = tree.structure
    check = sat_set(pre, And(Not(I), AG(AF(Not(I)))))
    if tree.root not in check:
        raise QctlError("binary witness violates the internal-node discipline")
    w, _ = minimize_witness(collapse_internal(pre, tree.root, p_int), 0)
    if verify and not check_tree(w, 0, f, cap):
        raise QctlError("extracted witness does not satisfy the formula")
    stats["witnessStates"] = len(w.states)
    stats["millis"] = round(1000 * (time.perf_counter() - t0), 1)
    return SatResult(True, w, 0, tree, stats)


def sat_structure(f: L.Formula):
    """Satisfiability under the structure semantics is undecidable."""
    raise UndecidableError("satisfiability under the structure semantics is undecidable; "
                           "use the tree semantics")
