"""Seeded generators of random structures, formulas, games and MSO formulas."""

from __future__ import annotations

import random

from qctl import logic_ast as L
from qctl.kripke import KripkeStructure
from qctl.logic_ast import Prop
from qctl.mso import MAnd, MEdge, MEq, MExists, MForall, MIn, MLab, MNot, MOr, MsoFormula
from qctl.parity_games import ParityGame

ATOMS = ("p", "q", "r")


def structure(rng: random.Random, n: int, atoms=ATOMS, density: float = 0.4) -> KripkeStructure:
    states = [f"s{i}" for i in range(n)]
    edges = [(a, b) for a in states for b in states if rng.random() < density]
    edges += [(a, rng.choice(states)) for a in states]
    labels = {s: [a for a in atoms if rng.random() < 0.5] for s in states}
    return KripkeStructure.build(states, edges, labels, states[0])


_UNARY = (L.Not, L.EX, L.AX, L.EF, L.AF, L.EG, L.AG)
_BINARY = (L.And, L.Or, L.Implies, L.EU, L.AU, L.EW, L.AW)


def ctl(rng: random.Random, depth: int, atoms=ATOMS) -> L.Formula:
    if depth == 0 or rng.random() < 0.15:
        return L.TRUE if rng.random() < 0.08 else Prop(rng.choice(atoms))
    if rng.random() < 0.45:
        return rng.choice(_UNARY)(ctl(rng, depth - 1, atoms))
    return rng.choice(_BINARY)(ctl(rng, depth - 1, atoms), ctl(rng, depth - 1, atoms))


def qctl(rng: random.Random, depth: int, quantifiers: int, atoms=ATOMS,
         bindable=("p", "q")) -> L.Formula:
    """At most ``quantifiers`` quantifier nodes; bound names occur in the body."""
    budget = [quantifiers]

    def go(d: int) -> L.Formula:
        if d == 0 or rng.random() < 0.1:
            return Prop(rng.choice(atoms))
        if budget[0] > 0 and rng.random() < 0.3:
            budget[0] -= 1
            v = rng.choice(bindable)
            body = go(d - 1)
            if v not in L.free_props(body):
                body = rng.choice((L.And, L.Or))(body, rng.choice((L.EX, L.AF, L.EG, L.neg))(Prop(v)))
            return (L.Exists if rng.random() < 0.5 else L.Forall)((v,), body)
        if rng.random() < 0.45:
            return rng.choice(_UNARY)(go(d - 1))
        return rng.choice(_BINARY)(go(d - 1), go(d - 1))

    return go(depth)


def game(rng: random.Random, n: int, priorities: int = 3) -> ParityGame:
    succ = []
    for v in range(n):
        out = sorted({rng.randrange(n) for _ in range(rng.randint(1, 3))})
        succ.append(tuple(out))
    owner = tuple(rng.randint(0, 1) for _ in range(n))
    prio = tuple(rng.randrange(priorities) for _ in range(n))
    return ParityGame(owner, tuple(succ), prio)


def mso(rng: random.Random, depth: int, labels=("p", "q")) -> MsoFormula:
    """MSO formula in x with at most two bound first-order and one set variable."""

    def atom(fo: list[str], so: list[str]) -> MsoFormula:
        vs = ["x"] + fo
        kinds = ["edg", "eq", "lab"] + (["in"] if so else [])
        k = rng.choice(kinds)
        if k == "edg":
            return MEdge(rng.choice(vs), rng.choice(vs))
        if k == "eq":
            return MEq(rng.choice(vs), rng.choice(vs))
        if k == "lab":
            return MLab(rng.choice(labels), rng.choice(vs))
        return MIn(rng.choice(vs), rng.choice(so))

    def go(d: int, fo: list[str], so: list[str]) -> MsoFormula:
        if d == 0 or rng.random() < 0.2:
            return atom(fo, so)
        c = rng.randrange(6)
        if c == 0:
            return MNot(go(d - 1, fo, so))
        if c == 1:
            return MAnd(go(d - 1, fo, so), go(d - 1, fo, so))
        if c == 2:
            return MOr(go(d - 1, fo, so), go(d - 1, fo, so))
        if c == 3 and len(fo) < 2:
            v = ("y", "z")[len(fo)]
            return rng.choice((MExists, MForall))(v, go(d - 1, fo + [v], so))
        if c == 4 and not so:
            return rng.choice((MExists, MForall))("X", go(d - 1, fo, ["X"]))
        return MNot(go(d - 1, fo, so))

    return go(depth, [], [])
