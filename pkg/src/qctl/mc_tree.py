"""Model checking under the tree semantics.

A QCTL formula is compiled into an alternating parity tree automaton by
induction on quantifier nesting: every maximal quantified subformula is
compiled on its own, made nondeterministic, projected on its quantified
propositions and plugged into the automaton of the surrounding CTL
context.  Membership of the unwinding is then a parity game.
"""

from __future__ import annotations

from typing import Iterable

from . import logic_ast as L
from .errors import BlowUpError
from .kripke import KripkeStructure
from .parity_games import EVEN, ParityGame, solve
from .tree_automata import (DEFAULT_STATE_CAP, Apta, ctl_to_apta, dual, membership_game, project,
                            simulate)


def _merge_exists(f: L.Formula) -> L.Formula:
    props = list(f.props)
    body = f.body
    while isinstance(body, L.Exists):
        props.extend(body.props)
        body = body.body
    return L.Exists(tuple(dict.fromkeys(props)), body)


def compile_formula(f: L.Formula, degrees: Iterable[int], universe: Iterable[str] | None = None,
                    cap: int = DEFAULT_STATE_CAP) -> Apta:
    """Automaton accepting the ``degrees``-trees whose root satisfies ``f``."""
    L.require_qctl(f)
    degrees = frozenset(degrees)
    g = L.negation_normal_form(L.standardize_apart(f))
    fresh = L.FreshNames(L.all_props(g))
    if universe is None:
        universe = L.free_props(f)
    return _compile(g, degrees, frozenset(universe), cap, fresh, 0)


def _compile(g: L.Formula, degrees, universe, cap, fresh, level) -> Apta:
    plugs: dict[str, Apta] = {}
    cache: dict[L.Formula, Apta] = {}

    def block(e: L.Exists) -> Apta:
        e = _merge_exists(e)
        b = cache.get(e)
        if b is None:
            inner_universe = universe | L.free_props(e.body)
            inner = _compile(e.body, degrees, inner_universe, cap, fresh, level + 1)
            try:
                b = project(simulate(inner, cap, level + 1), e.props)
            except BlowUpError as exc:
                raise BlowUpError(str(exc), level + 1) from None
            cache[e] = b
        return b

    def strip(h: L.Formula) -> L.Formula:
        if isinstance(h, L.Exists):
            name = fresh("plug")
            plugs[name] = block(h)
            return L.Prop(name)
        if isinstance(h, L.Not) and isinstance(h.arg, L.Exists):
            name = fresh("coplug")
            plugs[name] = dual(block(h.arg))
            return L.Prop(name)
        kids = L.children(h)
        if not kids:
            return h
        return L.rebuild(h, tuple(strip(k) for k in kids))

    context = strip(g)
    plain = L.free_props(context) - set(plugs)
    return ctl_to_apta(context, degrees, universe | plain, plugs, name=f"level{level}")


def tree_game(s: KripkeStructure, q: int | str, f: L.Formula,
              cap: int = DEFAULT_STATE_CAP) -> tuple[ParityGame, int, Apta]:
    q = s.index(q)
    degrees = s.degrees(q)
    a = compile_formula(f, degrees, cap=cap)
    game, start, _ = membership_game(a, s, q)
    return game, start, a


def check_tree(s: KripkeStructure, q: int | str, f: L.Formula,
               cap: int = DEFAULT_STATE_CAP) -> bool:
    """Does the unwinding of ``s`` from ``q`` satisfy ``f``?"""
    game, start, _ = tree_game(s, q, f, cap)
    return solve(game).winner[start] == EVEN


def tree_sat_set(s: KripkeStructure, f: L.Formula, cap: int = DEFAULT_STATE_CAP) -> frozenset[int]:
    return frozenset(i for i in range(len(s.states)) if check_tree(s, i, f, cap))
