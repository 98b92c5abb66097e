"""Named formulas, hardness gadgets and reference evaluators.

Constructors take the propositions they talk about as arguments and pick
bound names that do not clash with them.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Mapping

from . import logic_ast as L
from .errors import QctlError
from .kripke import KripkeStructure
from .logic_ast import AF, AG, AU, AX, EF, EU, EX, And, Iff, Implies, Not, Or, Prop, conj, disj


def _p(x: str | L.Formula) -> L.Formula:
    return Prop(x) if isinstance(x, str) else x


def _fresh(base: str, *avoid: L.Formula) -> str:
    """``base`` or ``base1``, ``base2``, ... avoiding all propositions of ``avoid``."""
    used: set[str] = set()
    for f in avoid:
        used |= L.all_props(f)
    if base not in used:
        return base
    for i in itertools.count(1):
        if f"{base}{i}" not in used:
            return f"{base}{i}"
    raise AssertionError


def _ax_n(f: L.Formula, n: int) -> L.Formula:
    for _ in range(n):
        f = AX(f)
    return f


# ------------------------------------------------------------ basic gadgets

def selfloop() -> L.Formula:
    """Holds exactly at states with a self-loop (structure semantics)."""
    return L.forall("z", Implies(Prop("z"), EX(Prop("z"))))


def uniq(phi: str | L.Formula, var: str | None = None) -> L.Formula:
    """Exactly one reachable state (or tree node) satisfies ``phi``."""
    phi = _p(phi)
    z = var or _fresh("z", phi)
    return And(EF(phi), L.forall(z, Implies(EF(And(phi, Prop(z))), AG(Implies(phi, Prop(z))))))


def EX1(phi: str | L.Formula, var: str | None = None) -> L.Formula:
    """Exactly one successor satisfies ``phi``."""
    phi = _p(phi)
    z = var or _fresh("z", phi)
    return And(EX(phi), L.forall(z, Implies(EX(And(phi, Prop(z))), AX(Implies(phi, Prop(z))))))


def EXgeq(k: int, phi: str | L.Formula) -> L.Formula:
    """At least ``k`` successors satisfy ``phi``."""
    if k < 1:
        raise QctlError("EXgeq needs k >= 1")
    phi = _p(phi)
    names = []
    for i in range(1, k + 1):
        names.append(_fresh(f"c{i}", phi, *(Prop(n) for n in names)))
    ps = [Prop(n) for n in names]
    distinct = conj(*(Or(Not(ps[i]), Not(ps[j])) for i in range(k) for j in range(i + 1, k)))
    return L.exists(names, And(AX(distinct), conj(*(EX(And(p, phi)) for p in ps))))


def acyclic() -> L.Formula:
    """False on every finite structure, true on every unwinding."""
    z = Prop("z")
    return AG(L.exists("z", conj(z, uniq(z), AX(AG(Not(z))))))


# ---------------------------------------------------------------- yardsticks

@dataclass(frozen=True)
class YardstickParams:
    k: int
    n: int

    def __post_init__(self):
        if self.k < 0 or self.n < 1:
            raise QctlError("yardstick parameters need k >= 0 and n >= 1")

    @property
    def distance(self) -> int:
        """F(k, n): F(0, n) = n and F(k+1, n) = F(k, n) * 2^F(k, n)."""
        f = self.n
        for _ in range(self.k):
            f = f * (1 << f)
        return f

    @property
    def tower(self) -> int:
        """E(k, n): E(0, n) = n and E(k+1, n) = 2^E(k, n)."""
        e = self.n
        for _ in range(self.k):
            e = 1 << e
        return e


def once(phi: str | L.Formula) -> L.Formula:
    phi = _p(phi)
    return And(AF(phi), AG(Implies(phi, AX(AG(Not(phi))))))


def delimiters(s: str = "s", t: str = "t") -> L.Formula:
    S, T = _p(s), _p(t)
    return conj(once(S), once(T), AG(Implies(S, AF(T))))


def yardstick_0(n: int, s: str = "s", t: str = "t") -> L.Formula:
    """Along every branch ``t`` comes exactly ``n`` steps after ``s``."""
    if n < 1:
        raise QctlError("yardstick needs n >= 1")
    S, T = _p(s), _p(t)
    start = 1 if S == T else 0
    gaps = [_ax_n(Not(T), k) for k in range(start, n)]
    return AG(Implies(S, conj(_ax_n(T, n), *gaps)))


def graduation_1(n: int, r: str, s: str, t: str) -> L.Formula:
    R, S, T = _p(r), _p(s), _p(t)
    return And(AG(Implies(Or(S, T), R)), yardstick_0(n, r, r))


def zeros(c: str, r: str, s: str, t: str) -> L.Formula:
    C, R, S = _p(c), _p(r), _p(s)
    return AG(Iff(S, conj(R, Not(C), AX(AU(Not(C), R)))))


def ones(c: str, r: str, s: str, t: str) -> L.Formula:
    C, R, T = _p(c), _p(r), _p(t)
    return AG(Implies(And(R, AX(AU(Not(R), T))), AU(C, T)))


def increment_1(n: int, c: str, r: str, s: str, t: str) -> L.Formula:
    C, R, S = _p(c), _p(r), _p(s)
    carry = AX(AU(Not(R), And(Not(C), Not(R))))
    return AG(Implies(S, AG(Iff(Iff(C, _ax_n(C, n)), carry))))


def counter_1(n: int, c: str, r: str, s: str, t: str) -> L.Formula:
    return conj(zeros(c, r, s, t), ones(c, r, s, t), increment_1(n, c, r, s, t))


def _level_names(k: int) -> tuple[str, str, str, str]:
    return f"r{k}", f"c{k}", f"u{k}", f"v{k}"


def graduation_k(k: int, n: int, r: str, s: str, t: str) -> L.Formula:
    if k == 1:
        return graduation_1(n, r, s, t)
    R, S, T = _p(r), _p(s), _p(t)
    _, _, u, v = _level_names(k)
    U, V = Prop(u), Prop(v)
    guard = And(delimiters(u, v), yardstick_k(k - 1, n, u, v))
    body = And(AG(Implies(U, AF(And(R, AF(V))))),
               AG(Implies(conj(R, AF(V), Not(AF(U))), AX(AU(Not(R), V)))))
    return And(AG(Implies(Or(S, T), R)), L.forall((u, v), Implies(guard, body)))


def increment_k(k: int, n: int, c: str, r: str, s: str, t: str) -> L.Formula:
    if k == 1:
        return increment_1(n, c, r, s, t)
    C, R, S = _p(c), _p(r), _p(s)
    _, _, u, v = _level_names(k)
    U, V = Prop(u), Prop(v)
    guard = And(delimiters(u, v), yardstick_k(k - 1, n, u, v))
    carry = AX(AU(Not(R), And(Not(C), Not(R))))
    inner = AG(Iff(Iff(And(U, C), AG(Implies(V, C))), carry))
    return L.forall((u, v), Implies(guard, AG(Implies(And(S, AF(U)), inner))))


def counter_k(k: int, n: int, c: str, r: str, s: str, t: str) -> L.Formula:
    return conj(zeros(c, r, s, t), ones(c, r, s, t), increment_k(k, n, c, r, s, t))


def yardstick_k(k: int, n: int, s: str = "s", t: str = "t") -> L.Formula:
    """Along every branch ``t`` comes exactly F(k, n) steps after ``s``."""
    YardstickParams(k, n)
    if k == 0:
        return yardstick_0(n, s, t)
    r, c, _, _ = _level_names(k)
    return L.exists((r, c), And(graduation_k(k, n, r, s, t), counter_k(k, n, c, r, s, t)))


# --------------------------------------------------------------------- grids

def _lit(name: str, positive: bool) -> L.Formula:
    return Prop(name) if positive else Not(Prop(name))


GRID_PROPS = ("s", "h", "v", "l", "r", "t", "b")


def grid_matrix() -> list[L.Formula]:
    """The conjuncts of the grid characterisation (outer propositions free)."""
    h, v, s = Prop("h"), Prop("v"), Prop("s")
    a, b, g = Prop("alpha"), Prop("beta"), Prop("gamma")
    signs = [(hs, vs) for hs in (True, False) for vs in (True, False)]

    # at least one and at most two successors, differing on h and v
    squares = conj(*(
        Implies(And(_lit("h", hs), _lit("v", vs)),
                And(EX(And(_lit("h", not hs), _lit("v", vs))), EX(And(_lit("h", hs), _lit("v", not vs)))))
        for hs, vs in signs))
    two_succ = And(AG(EX(L.TRUE)), L.forall(("alpha", "beta"), AG(Implies(
        And(EX(And(a, b)), EX(And(a, Not(b)))),
        And(AX(a), squares)))))

    sink = conj(uniq(s), AG(Implies(s, AG(s))), AF(s))
    init = conj(And(h, v), EX(And(h, Not(v))), EX(And(Not(h), v)))

    dirs = [Prop("h"), Not(Prop("h")), Prop("v"), Not(Prop("v"))]

    def neg(d: L.Formula) -> L.Formula:
        return d.arg if isinstance(d, Not) else Not(d)

    square1 = L.forall("gamma", AG(conj(*(
        Implies(conj(d, EX(d), EX(neg(d))),
                And(Implies(EX(And(d, AX(g))), EX(And(neg(d), EX(And(neg(d), g))))),
                    Implies(EX(And(neg(d), AX(g))), EX(And(d, EX(And(neg(d), g)))))))
        for d in dirs))))
    square2 = L.forall("gamma", AG(conj(*(
        Implies(d, Iff(EX(And(d, EX(And(neg(d), g)))),
                       EX(conj(neg(d), Not(s), EX(And(neg(d), g))))))
        for d in dirs))))

    hv = L.forall("gamma", Implies(EF(g), disj(*(
        And(EU(_lit("h", hq), And(_lit("h", hq), EU(_lit("v", vg), And(_lit("v", vg), g)))),
            EU(_lit("v", vq), And(_lit("v", vq), EU(_lit("h", hg), And(_lit("h", hg), g)))))
        for hq, vq in signs for hg, vg in signs))))
    HV = disj(*(
        AG(disj(*(
            And(EU(_lit("h", hq), And(_lit("h", hq), EU(_lit("v", vs), And(_lit("v", vs), s)))),
                EU(_lit("v", vq), And(_lit("v", vq), EU(_lit("h", hs), And(_lit("h", hs), s)))))
            for hq, vq in signs)))
        for hs, vs in signs))

    l, r, t, bb = Prop("l"), Prop("r"), Prop("t"), Prop("b")
    lrtb = conj(
        AU(And(v, l), And(Not(v), Not(l))), AG(Implies(Not(v), AG(Not(l)))),
        AG(Iff(r, Or(AG(v), AG(Not(v))))),
        AU(And(h, t), And(Not(h), Not(t))), AG(Implies(Not(h), AG(Not(t)))),
        AG(Iff(bb, Or(AG(h), AG(Not(h))))))
    return [two_succ, sink, init, square1, square2, hv, HV, lrtb]


def grid2d() -> L.Formula:
    """True exactly at the initial corner of two-dimensional grids."""
    return L.exists(GRID_PROPS, conj(*grid_matrix()))


def grid1d() -> L.Formula:
    """True exactly on lines ending in a self-loop."""
    r, g = Prop("r"), Prop("gamma")
    return L.exists("r", L.forall("gamma", conj(
        AG(And(EX(L.TRUE), Implies(EX(g), AX(g)))),
        Implies(EF(And(r, g)), AG(Implies(r, g))),
        EF(AG(r)))))


def build_grid(m: int, n: int) -> tuple[KripkeStructure, dict[str, list[str]]]:
    """The m-by-n grid (moves down and right, self-loop at the far corner)
    and a labelling of the grid propositions witnessing :func:`grid2d`."""
    if m < 2 or n < 2:
        raise QctlError("grids need m, n >= 2")
    name = lambda i, j: f"g{i}_{j}"
    states = [name(i, j) for i in range(1, m + 1) for j in range(1, n + 1)]
    edges = []
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            if i < m:
                edges.append((name(i, j), name(i + 1, j)))
            if j < n:
                edges.append((name(i, j), name(i, j + 1)))
    edges.append((name(m, n), name(m, n)))
    witness: dict[str, list[str]] = {p: [] for p in GRID_PROPS}
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            q = name(i, j)
            if i % 2:
                witness["h"].append(q)
            if j % 2:
                witness["v"].append(q)
            if j == 1:
                witness["l"].append(q)
            if j == n:
                witness["r"].append(q)
            if i == 1:
                witness["t"].append(q)
            if i == m:
                witness["b"].append(q)
    witness["s"].append(name(m, n))
    return KripkeStructure.build(states, edges, {}, name(1, 1)), witness


def line(n: int) -> KripkeStructure:
    """States 0..n-1 in a row; the last one loops."""
    if n < 1:
        raise QctlError("line needs n >= 1")
    states = [f"l{i}" for i in range(n)]
    edges = [(states[i], states[i + 1]) for i in range(n - 1)] + [(states[-1], states[-1])]
    return KripkeStructure.build(states, edges, {}, states[0])


# ----------------------------------------------------------------------- QBF

@dataclass(frozen=True)
class QbfInstance:
    """Blocks alternate starting with an existential one.  The matrix is a
    list of clauses (CNF) or of terms (DNF); literals are ``x`` or ``-x``."""

    blocks: tuple[tuple[str, ...], ...]
    matrix: tuple[tuple[str, ...], ...]
    form: str = "cnf"

    def __post_init__(self):
        seen: set[str] = set()
        for b in self.blocks:
            if seen & set(b):
                raise QctlError("QBF blocks must be disjoint")
            seen |= set(b)
        if self.form not in ("cnf", "dnf"):
            raise QctlError("matrix form must be 'cnf' or 'dnf'")
        for c in self.matrix:
            if not c:
                raise QctlError("empty clause or term")
            for lit in c:
                if lit.lstrip("-") not in seen:
                    raise QctlError(f"literal {lit!r} uses an unquantified variable")

    @property
    def k(self) -> int:
        return len(self.blocks)


def _lit_value(lit: str, val: Mapping[str, bool]) -> bool:
    return not val[lit[1:]] if lit.startswith("-") else val[lit]


def eval_matrix(inst: QbfInstance, val: Mapping[str, bool]) -> bool:
    if inst.form == "cnf":
        return all(any(_lit_value(l, val) for l in c) for c in inst.matrix)
    return any(all(_lit_value(l, val) for l in c) for c in inst.matrix)


def brute_qbf(inst: QbfInstance) -> bool:
    """Reference evaluation by full expansion."""

    def go(i: int, val: dict) -> bool:
        if i == len(inst.blocks):
            return eval_matrix(inst, val)
        block = inst.blocks[i]
        results = (go(i + 1, {**val, **dict(zip(block, bits))})
                   for bits in itertools.product((False, True), repeat=len(block)))
        return any(results) if i % 2 == 0 else all(results)

    return go(0, {})


def qbf_formula(k: int) -> L.Formula:
    """The fixed formula of the reduction for one or two blocks."""
    if k == 1:
        test, plus = Prop("test"), Prop("plus")
        return L.exists("plus", And(AX(Implies(test, And(EX(plus), EX(Not(plus))))),
                                    AX(Implies(Not(test), EX(plus)))))
    if k == 2:
        t1, t2 = Prop("test_1"), Prop("test_2")
        p1, p2 = Prop("plus_1"), Prop("plus_2")
        own1 = And(AX(Implies(t1, And(EX(p1), EX(Not(p1))))), AX(Implies(t2, AX(Not(p1)))))
        own2 = And(AX(Implies(t2, And(EX(p2), EX(Not(p2))))), AX(Implies(t1, AX(Not(p2)))))
        goal = EX(conj(Not(t1), Not(t2), AX(Or(p1, p2))))
        return L.exists("plus_1", L.forall("plus_2", And(own1, Implies(own2, goal))))
    raise QctlError("the QBF reduction is implemented for one or two blocks")


def qbf_to_mc(inst: QbfInstance) -> tuple[KripkeStructure, L.Formula]:
    """Structure encoding the matrix and the fixed formula; the formula
    holds at ``phi_b`` iff the instance is true."""
    k = inst.k
    if k not in (1, 2):
        raise QctlError("the QBF reduction is implemented for one or two blocks")
    want = "cnf" if k == 1 else "dnf"
    if inst.form != want:
        raise QctlError(f"{k}-block instances need a {want.upper()} matrix")
    states = ["phi_b"]
    edges = []
    labels: dict[str, list[str]] = {}
    for i, c in enumerate(inst.matrix, 1):
        states.append(f"C{i}")
        edges.append(("phi_b", f"C{i}"))
        for lit in c:
            var = lit.lstrip("-")
            edges.append((f"C{i}", f"not_{var}" if lit.startswith("-") else f"pos_{var}"))
    for bi, block in enumerate(inst.blocks, 1):
        for var in block:
            tname = f"test_{var}"
            states += [tname, f"pos_{var}", f"not_{var}"]
            labels[tname] = ["test"] if k == 1 else [f"test_{bi}"]
            edges += [("phi_b", tname), (tname, f"pos_{var}"), (tname, f"not_{var}"),
                      (f"pos_{var}", f"pos_{var}"), (f"not_{var}", f"not_{var}")]
    return KripkeStructure.build(states, edges, labels, "phi_b"), qbf_formula(k)


def random_qbf(rng: random.Random, k: int, nvars: int = 3, nclauses: int = 3,
               width: int = 2) -> QbfInstance:
    names = [f"x{i}" for i in range(1, nvars + 1)]
    if k == 1:
        blocks = (tuple(names),)
    else:
        cut = rng.randint(1, nvars - 1) if nvars > 1 else 1
        blocks = (tuple(names[:cut]), tuple(names[cut:]))
    matrix = tuple(tuple(rng.choice(("", "-")) + rng.choice(names) for _ in range(rng.randint(1, width)))
                   for _ in range(nclauses))
    return QbfInstance(blocks, matrix, "cnf" if k == 1 else "dnf")


# ------------------------------------------------------------------ circuits

@dataclass(frozen=True)
class Circuit:
    """Monotone circuit: gates map to ``("and"|"or", (child, child))``,
    terminals to ``("0",)`` or ``("1",)``."""

    gates: Mapping[str, tuple]
    root: str


def evaluate_circuit(c: Circuit) -> bool:
    memo: dict[str, bool] = {}

    def val(g: str) -> bool:
        if g not in memo:
            node = c.gates[g]
            kind = node[0]
            if kind == "1":
                memo[g] = True
            elif kind == "0":
                memo[g] = False
            elif kind == "and":
                memo[g] = all(val(x) for x in node[1])
            elif kind == "or":
                memo[g] = any(val(x) for x in node[1])
            else:
                raise QctlError(f"non-monotone gate kind {kind!r}")
        return memo[g]

    return val(c.root)


CIRCUIT_LABEL = {"and": "conj", "or": "disj", "0": "zero", "1": "one"}


def circuit_phi() -> L.Formula:
    p = Prop("p")
    return AG(conj(Implies(Prop("one"), p), Implies(Prop("zero"), Not(p)),
                   Implies(Prop("conj"), Iff(p, AX(p))),
                   Implies(Prop("disj"), Iff(p, EX(p)))))


def circuit_to_mc(c: Circuit, universal: bool = False) -> tuple[KripkeStructure, L.Formula]:
    """Structure of the circuit and the fixed formula (existential form, or
    the universal one when ``universal``)."""
    states = list(c.gates)
    edges = []
    labels = {}
    for g, node in c.gates.items():
        kind = node[0]
        if kind not in CIRCUIT_LABEL:
            raise QctlError(f"non-monotone gate kind {kind!r}")
        labels[g] = [CIRCUIT_LABEL[kind]]
        if kind in ("0", "1"):
            edges.append((g, g))
        else:
            for child in node[1]:
                edges.append((g, child))
    phi = circuit_phi()
    p = Prop("p")
    f = L.forall("p", Implies(phi, p)) if universal else L.exists("p", And(p, phi))
    return KripkeStructure.build(states, edges, labels, c.root), f


def sample_circuit() -> Circuit:
    """A ten-gate monotone circuit whose output is 1."""
    return Circuit({
        "A": ("or", ("B1", "B2")),
        "B1": ("or", ("C1", "C3")),
        "B2": ("and", ("C2", "C3")),
        "C1": ("and", ("D1", "D2")),
        "C2": ("and", ("D1", "D3")),
        "C3": ("or", ("D3", "E0")),
        "D1": ("or", ("E0", "E1")),
        "D2": ("and", ("E1", "E1")),
        "D3": ("and", ("E0", "E1")),
        "E1": ("1",),
        "E0": ("0",),
    }, "A")


def random_circuit(rng: random.Random, gates: int = 8) -> Circuit:
    names = [f"g{i}" for i in range(gates)]
    nodes: dict[str, tuple] = {"T1": ("1",), "T0": ("0",)}
    for i in reversed(range(gates)):
        pool = names[i + 1:] + ["T0", "T1"]
        nodes[names[i]] = (rng.choice(("and", "or")), (rng.choice(pool), rng.choice(pool)))
    return Circuit(nodes, names[0])


# ------------------------------------------------------------- dispatcher

def _int(x) -> int:
    return int(x)


NAMED: dict[str, tuple[Callable[..., L.Formula], str]] = {
    "selfloop": (lambda: selfloop(), ""),
    "uniq": (lambda phi="p": uniq(L.parse_formula(phi)), "[PHI]"),
    "EX1": (lambda phi="p": EX1(L.parse_formula(phi)), "[PHI]"),
    "EXgeq": (lambda k="2", phi="p": EXgeq(_int(k), L.parse_formula(phi)), "[K] [PHI]"),
    "acyclic": (lambda: acyclic(), ""),
    "once": (lambda phi="s": once(L.parse_formula(phi)), "[PHI]"),
    "delimiters": (lambda s="s", t="t": delimiters(s, t), "[S] [T]"),
    "yardstick_0": (lambda n="3", s="s", t="t": yardstick_0(_int(n), s, t), "[N] [S] [T]"),
    "yardstick_k": (lambda k="1", n="1", s="s", t="t": yardstick_k(_int(k), _int(n), s, t), "[K] [N] [S] [T]"),
    "graduation": (lambda k="1", n="1", r="r", s="s", t="t": graduation_k(_int(k), _int(n), r, s, t), "[K] [N] [R] [S] [T]"),
    "counter": (lambda k="1", n="1", c="c", r="r", s="s", t="t": counter_k(_int(k), _int(n), c, r, s, t), "[K] [N] [C] [R] [S] [T]"),
    "zeros": (lambda c="c", r="r", s="s", t="t": zeros(c, r, s, t), "[C] [R] [S] [T]"),
    "ones": (lambda c="c", r="r", s="s", t="t": ones(c, r, s, t), "[C] [R] [S] [T]"),
    "increment": (lambda k="1", n="1", c="c", r="r", s="s", t="t": increment_k(_int(k), _int(n), c, r, s, t), "[K] [N] [C] [R] [S] [T]"),
    "grid2d": (lambda: grid2d(), ""),
    "grid1d": (lambda: grid1d(), ""),
    "circuit": (lambda: circuit_phi(), ""),
    "qbf": (lambda k="1": qbf_formula(_int(k)), "[K]"),
}


def named_formula(name: str, *args: str) -> L.Formula:
    if name not in NAMED:
        raise QctlError(f"unknown corpus formula {name!r}; known: {', '.join(sorted(NAMED))}")
    fn, _ = NAMED[name]
    try:
        return fn(*args)
    except TypeError:
        raise QctlError(f"wrong arguments for {name}; usage: {name} {NAMED[name][1]}".rstrip()) from None
