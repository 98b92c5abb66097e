"""Alternating and nondeterministic parity tree automata.

Transitions are positive boolean formulas (:class:`Pbf`) over atoms
``(direction, state)``, given separately for each node degree.  Acceptance
is min-parity: a run branch is accepting iff the least priority seen
infinitely often is even.  Automata are lazy: transitions are computed on
demand and cached, so that nested constructions only build what is used.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from . import logic_ast as L
from .errors import BlowUpError, FragmentError, QctlError
from .kripke import KripkeStructure
from .parity_games import EVEN, ODD, GameBuilder, ParityGame, solve

Letter = frozenset
State = Hashable

DEFAULT_STATE_CAP = 1_000_000


# --------------------------------------------------------------------- Pbf

class Pbf:
    __slots__ = ()

    def __str__(self) -> str:
        return pbf_str(self)


@dataclass(frozen=True, slots=True)
class PTrue(Pbf):
    pass


@dataclass(frozen=True, slots=True)
class PFalse(Pbf):
    pass


@dataclass(frozen=True, slots=True)
class Atom(Pbf):
    direction: int
    state: State


@dataclass(frozen=True, slots=True)
class PAnd(Pbf):
    args: tuple


@dataclass(frozen=True, slots=True)
class POr(Pbf):
    args: tuple


TOP = PTrue()
BOT = PFalse()


def mk_and(args: Iterable[Pbf]) -> Pbf:
    out: dict[Pbf, None] = {}
    for a in args:
        if isinstance(a, PFalse):
            return BOT
        if isinstance(a, PTrue):
            continue
        if isinstance(a, PAnd):
            out.update(dict.fromkeys(a.args))
        else:
            out[a] = None
    if not out:
        return TOP
    if len(out) == 1:
        return next(iter(out))
    return PAnd(tuple(out))


def mk_or(args: Iterable[Pbf]) -> Pbf:
    out: dict[Pbf, None] = {}
    for a in args:
        if isinstance(a, PTrue):
            return TOP
        if isinstance(a, PFalse):
            continue
        if isinstance(a, POr):
            out.update(dict.fromkeys(a.args))
        else:
            out[a] = None
    if not out:
        return BOT
    if len(out) == 1:
        return next(iter(out))
    return POr(tuple(out))


def pbf_map(f: Pbf, fn: Callable[[Atom], Pbf]) -> Pbf:
    """Replace every atom by ``fn(atom)``."""
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, PAnd):
        return mk_and(pbf_map(a, fn) for a in f.args)
    if isinstance(f, POr):
        return mk_or(pbf_map(a, fn) for a in f.args)
    return f


def pbf_dual(f: Pbf) -> Pbf:
    if isinstance(f, PTrue):
        return BOT
    if isinstance(f, PFalse):
        return TOP
    if isinstance(f, PAnd):
        return mk_or(pbf_dual(a) for a in f.args)
    if isinstance(f, POr):
        return mk_and(pbf_dual(a) for a in f.args)
    return f


def pbf_atoms(f: Pbf) -> set[Atom]:
    if isinstance(f, Atom):
        return {f}
    if isinstance(f, (PAnd, POr)):
        out: set[Atom] = set()
        for a in f.args:
            out |= pbf_atoms(a)
        return out
    return set()


def pbf_satisfied(f: Pbf, model: set | frozenset) -> bool:
    """Does the set of atoms ``model`` satisfy ``f``?"""
    if isinstance(f, PTrue):
        return True
    if isinstance(f, PFalse):
        return False
    if isinstance(f, Atom):
        return f in model
    if isinstance(f, PAnd):
        return all(pbf_satisfied(a, model) for a in f.args)
    return any(pbf_satisfied(a, model) for a in f.args)


def _antichain(sets: Iterable[frozenset]) -> list[frozenset]:
    out: list[frozenset] = []
    for s in sorted(set(sets), key=len):
        if not any(t <= s for t in out):
            out.append(s)
    return out


def minimal_models(f: Pbf) -> list[frozenset]:
    """The subset-minimal sets of atoms satisfying ``f``."""
    if isinstance(f, PTrue):
        return [frozenset()]
    if isinstance(f, PFalse):
        return []
    if isinstance(f, Atom):
        return [frozenset((f,))]
    if isinstance(f, POr):
        return _antichain(m for a in f.args for m in minimal_models(a))
    acc = [frozenset()]
    for a in f.args:
        ms = minimal_models(a)
        acc = _antichain(x | y for x in acc for y in ms)
        if not acc:
            return []
    return acc


def pbf_str(f: Pbf, show: Callable[[State], str] = str) -> str:
    if isinstance(f, PTrue):
        return "true"
    if isinstance(f, PFalse):
        return "false"
    if isinstance(f, Atom):
        return f"({f.direction},{show(f.state)})"
    sep = " & " if isinstance(f, PAnd) else " | "
    return "(" + sep.join(pbf_str(a, show) for a in f.args) + ")"


# ------------------------------------------------------------------ Apta

def letters_of(universe: Iterable[str]) -> list[frozenset]:
    """All subsets of ``universe``, in a fixed order."""
    u = sorted(universe)
    return [frozenset(p for i, p in enumerate(u) if m >> i & 1) for m in range(1 << len(u))]


class Apta:
    """Alternating parity tree automaton over ``2^universe``-labelled D-trees.

    ``delta(q, letter, d)`` returns the transition Pbf; letters are
    restricted to ``universe`` before the call.  ``max_priority`` bounds
    the range of ``priority``.
    """

    def __init__(self, initial: State, delta: Callable[[State, frozenset, int], Pbf],
                 priority: Callable[[State], int], degrees: Iterable[int],
                 universe: Iterable[str], max_priority: int, name: str = "A"):
        self.initial = initial
        self._delta = delta
        self._priority = priority
        self.degrees = frozenset(degrees)
        if not self.degrees or min(self.degrees) < 1:
            raise QctlError("degree set must be a nonempty set of positive integers")
        self.universe = frozenset(universe)
        self.max_priority = max_priority
        self.name = name
        self._cache: dict = {}
        self._prio_cache: dict = {}
        self._explored: list | None = None

    def transition(self, q: State, letter: Iterable[str], d: int) -> Pbf:
        if d not in self.degrees:
            raise QctlError(f"degree {d} not in the automaton's degree set")
        sigma = frozenset(letter) & self.universe
        key = (q, sigma, d)
        out = self._cache.get(key)
        if out is None:
            out = self._delta(q, sigma, d)
            self._cache[key] = out
        return out

    def priority(self, q: State) -> int:
        p = self._prio_cache.get(q)
        if p is None:
            p = self._priority(q)
            self._prio_cache[q] = p
        return p

    @property
    def index(self) -> int:
        return self.max_priority + 1

    def successors(self, q: State) -> set:
        out = set()
        for sigma in letters_of(self.universe):
            for d in sorted(self.degrees):
                out |= {a.state for a in pbf_atoms(self.transition(q, sigma, d))}
        return out

    def states(self, cap: int = DEFAULT_STATE_CAP) -> list:
        """All states reachable from the initial state, breadth first."""
        if self._explored is None:
            seen = {self.initial}
            order = [self.initial]
            for q in order:
                for r in sorted(self.successors(q), key=repr):
                    if r not in seen:
                        seen.add(r)
                        order.append(r)
                        if len(order) > cap:
                            raise BlowUpError(f"automaton {self.name} exceeds {cap} states", None)
            self._explored = order
        return self._explored

    def size(self) -> int:
        return len(self.states())

    def used_priorities(self) -> set[int]:
        return {self.priority(q) for q in self.states()}


class Npta(Apta):
    """Nondeterministic automaton: ``choices(q, letter, d)`` lists tuples
    ``(q_0, ..., q_{d-1})``; the transition is their disjunction."""

    def __init__(self, initial, choices: Callable[[State, frozenset, int], tuple],
                 priority, degrees, universe, max_priority, name="N"):
        self._choices = choices
        self._choice_cache: dict = {}
        super().__init__(initial, self._pbf_of_choices, priority, degrees, universe,
                         max_priority, name)

    def choices(self, q: State, letter: Iterable[str], d: int) -> tuple:
        sigma = frozenset(letter) & self.universe
        key = (q, sigma, d)
        out = self._choice_cache.get(key)
        if out is None:
            out = tuple(dict.fromkeys(self._choices(q, sigma, d)))
            self._choice_cache[key] = out
        return out

    def _pbf_of_choices(self, q, sigma, d) -> Pbf:
        disjuncts = []
        for tup in self.choices(q, sigma, d):
            atoms = [Atom(c, r) for c, r in enumerate(tup)]
            disjuncts.append(atoms[0] if d == 1 else PAnd(tuple(atoms)))
        if not disjuncts:
            return BOT
        return disjuncts[0] if len(disjuncts) == 1 else POr(tuple(disjuncts))

    def successors(self, q: State) -> set:
        out = set()
        for sigma in letters_of(self.universe):
            for d in sorted(self.degrees):
                for tup in self.choices(q, sigma, d):
                    out.update(tup)
        return out


def is_npta_shape(f: Pbf, d: int) -> bool:
    """Disjunction of conjunctions that use every direction below ``d`` once."""
    if isinstance(f, PFalse):
        return True
    disjuncts = f.args if isinstance(f, POr) else (f,)
    for c in disjuncts:
        conj = c.args if isinstance(c, PAnd) else (c,)
        if not all(isinstance(a, Atom) for a in conj):
            return False
        if sorted(a.direction for a in conj) != list(range(d)):
            return False
    return True


def check_npta_shape(a: Apta, cap: int = 10_000) -> bool:
    for q in a.states(cap):
        for sigma in letters_of(a.universe):
            for d in a.degrees:
                if not is_npta_shape(a.transition(q, sigma, d), d):
                    return False
    return True


# ------------------------------------------------------------- CTL -> APTA

def ctl_to_apta(f: L.Formula, degrees: Iterable[int], universe: Iterable[str] | None = None,
                plugs: Mapping[str, Apta] | None = None, name: str = "ctl") -> Apta:
    """Automaton for a CTL formula in negation normal form.

    Propositions listed in ``plugs`` are opaque: their truth is decided by
    the plugged automaton, whose initial transition is inlined and whose
    states are wrapped as ``(plug_name, state)``.  Own states are integers
    standing for temporal subformulas; boolean structure is inlined.
    """
    plugs = dict(plugs or {})
    if not L.is_nnf(f) or L.has_quantifier(f):
        raise FragmentError("ctl_to_apta expects a quantifier-free formula in negation normal form")
    if universe is None:
        universe = L.free_props(f) - set(plugs)
    universe = frozenset(universe)
    for p in plugs.values():
        universe |= p.universe
    for p, auto in plugs.items():
        if not auto.degrees >= frozenset(degrees):
            raise QctlError(f"plug {p!r} lacks some degrees")
    formulas: list[L.Formula] = []
    ids: dict[L.Formula, int] = {}

    def sid(g: L.Formula) -> int:
        i = ids.get(g)
        if i is None:
            i = len(formulas)
            ids[g] = i
            formulas.append(g)
        return i

    sid(f)

    def inline(g: L.Formula, sigma: frozenset, d: int) -> Pbf:
        if isinstance(g, L.TrueF):
            return TOP
        if isinstance(g, L.FalseF):
            return BOT
        if isinstance(g, L.Prop):
            if g.name in plugs:
                auto = plugs[g.name]
                t = auto.transition(auto.initial, sigma, d)
                return pbf_map(t, lambda a, k=g.name: Atom(a.direction, (k, a.state)))
            return TOP if g.name in sigma else BOT
        if isinstance(g, L.Not):
            if g.arg.name in plugs:
                raise FragmentError("negated plug; supply the dual automaton as a separate plug")
            return BOT if g.arg.name in sigma else TOP
        if isinstance(g, L.And):
            return mk_and((inline(g.left, sigma, d), inline(g.right, sigma, d)))
        if isinstance(g, L.Or):
            return mk_or((inline(g.left, sigma, d), inline(g.right, sigma, d)))
        if isinstance(g, L.PathQuant):
            p = g.path
            comb = mk_or if g.quant == "E" else mk_and
            if isinstance(p, L.Next):
                target = sid(p.arg)
                return comb(Atom(c, target) for c in range(d))
            me = sid(g)
            step = comb(Atom(c, me) for c in range(d))
            return mk_or((inline(p.right, sigma, d), mk_and((inline(p.left, sigma, d), step))))
        raise FragmentError(f"unexpected formula in CTL translation: {g!r}")

    def delta(q, sigma, d):
        if isinstance(q, tuple):
            k, inner = q
            auto = plugs[k]
            t = auto.transition(inner, sigma, d)
            return pbf_map(t, lambda a: Atom(a.direction, (k, a.state)))
        return inline(formulas[q], sigma, d)

    def priority(q):
        if isinstance(q, tuple):
            return plugs[q[0]].priority(q[1])
        g = formulas[q]
        if isinstance(g, L.PathQuant) and isinstance(g.path, L.Until):
            return 1
        return 2

    top = max([2] + [p.max_priority for p in plugs.values()])
    return Apta(0, delta, priority, degrees, universe, top, name)


# ------------------------------------------------------------ operations

def accept_all(degrees: Iterable[int], universe: Iterable[str] = ()) -> Apta:
    return Apta("all", lambda q, s, d: TOP, lambda q: 0, degrees, universe, 0, "all")


def dual(a: Apta) -> Apta:
    """Complement: swap and/or and true/false, shift priorities by one."""
    return Apta(a.initial, lambda q, s, d: pbf_dual(a.transition(q, s, d)),
                lambda q: a.priority(q) + 1, a.degrees, a.universe, a.max_priority + 1,
                f"dual({a.name})")


def combine(a: Apta, b: Apta, op: str) -> Apta:
    """Intersection (``op="and"``) or union (``op="or"``) with a fresh initial state."""
    if a.degrees != b.degrees:
        raise QctlError("combined automata must share the degree set")
    if op not in ("and", "or"):
        raise QctlError("op must be 'and' or 'or'")
    mk = mk_and if op == "and" else mk_or
    parts = (a, b)
    init = ("init",)

    def wrap(i, t):
        return pbf_map(t, lambda x: Atom(x.direction, (i, x.state)))

    def delta(q, s, d):
        if q == init:
            return mk((wrap(0, a.transition(a.initial, s, d)), wrap(1, b.transition(b.initial, s, d))))
        i, inner = q
        return wrap(i, parts[i].transition(inner, s, d))

    def priority(q):
        if q == init:
            return 0
        return parts[q[0]].priority(q[1])

    return Apta(init, delta, priority, a.degrees, a.universe | b.universe,
                max(a.max_priority, b.max_priority), f"({a.name} {op} {b.name})")


def project(n: Npta, props: Iterable[str]) -> Npta:
    """Existential projection: the label of ``props`` is guessed."""
    if not isinstance(n, Npta):
        raise FragmentError("projection requires a nondeterministic automaton")
    P = frozenset(props) & n.universe
    variants = letters_of(P)

    def choices(q, sigma, d):
        out: list = []
        for v in variants:
            out.extend(n.choices(q, sigma | v, d))
        return out

    return Npta(n.initial, choices, n.priority, n.degrees, n.universe - P, n.max_priority,
                f"proj({n.name})")


# ------------------------------------------------------------ simulation

class _Safra:
    """Safra construction for the automaton reading relation letters that
    accepts iff some thread of the run has an odd least recurring priority.

    Its states are ``(i, t)`` for automaton state ``i``: ``t = 0`` before
    the guess, ``t > 0`` after guessing that priority ``odds[t-1]`` is the
    least one seen from now on.
    """

    def __init__(self, prios: list[int], odds: list[int]):
        self.prios = prios
        self.odds = odds
        self.width = 1 + len(odds)
        self.nbw_states = len(prios) * self.width
        self.neutral = 2 * self.nbw_states + 1
        self.final = 0
        self.guess = []
        for i, p in enumerate(prios):
            m = 1 << (i * self.width)
            for t, j in enumerate(odds, 1):
                if j <= p:
                    m |= 1 << (i * self.width + t)
                if j == p:
                    self.final |= 1 << (i * self.width + t)
            self.guess.append(m)

    def initial_tree(self, q0: int) -> tuple:
        return ((-1, self.guess[q0]),)

    def post(self, label: int, rel: Mapping[int, Sequence[int]]) -> int:
        out = 0
        w = self.width
        prios = self.prios
        while label:
            low = label & -label
            b = low.bit_length() - 1
            label ^= low
            i, t = divmod(b, w)
            for r in rel.get(i, ()):
                if t == 0:
                    out |= self.guess[r]
                elif prios[r] >= self.odds[t - 1]:
                    out |= 1 << (r * w + t)
        return out

    def step(self, tree: tuple, rel: Mapping[int, Sequence[int]]) -> tuple[tuple, int]:
        """Next tree and the transition priority (min-parity, even = some thread bad)."""
        if not tree:
            return (), self.neutral
        old = len(tree)
        parent = [p for p, _ in tree]
        label = [l for _, l in tree]
        for k in range(old):
            f = label[k] & self.final
            if f:
                parent.append(k)
                label.append(f)
        label = [self.post(l, rel) for l in label]
        n = len(label)
        claimed = [0] * n  # union of processed labels of children so far
        for k in range(n):
            p = parent[k]
            if p >= 0:
                label[k] &= label[p] & ~claimed[p]
                claimed[p] |= label[k]
        alive = [label[k] != 0 for k in range(n)]
        green = []
        children: list[list[int]] = [[] for _ in range(n)]
        for k in range(1, n):
            if alive[k] and alive[parent[k]]:
                children[parent[k]].append(k)
            else:
                alive[k] = False
        for k in range(n):
            if not alive[k] or not children[k]:
                continue
            if claimed[k] == label[k]:
                green.append(k)
                stack = list(children[k])
                while stack:
                    c = stack.pop()
                    alive[c] = False
                    stack.extend(children[c])
                children[k] = []
        prio = self.neutral
        for k in green:
            prio = min(prio, 2 * (k + 1))
        for k in range(old):
            if not alive[k]:
                prio = min(prio, 2 * (k + 1) - 1)
                break
        if not alive[0]:
            return (), prio
        remap = {}
        out = []
        for k in range(n):
            if alive[k]:
                remap[k] = len(out)
                out.append((remap[parent[k]] if parent[k] >= 0 else -1, label[k]))
        return tuple(out), prio


def simulate(a: Apta, cap: int = DEFAULT_STATE_CAP, level: int | None = None) -> Npta:
    """Equivalent nondeterministic automaton.

    The run of ``a`` is resolved by local strategies; a Safra automaton
    tracks, along each branch, whether some thread of ``a``'s run violates
    the parity condition.  States of the result are integers.
    """
    a_states = a.states(cap)
    ids = {q: i for i, q in enumerate(a_states)}
    prios = [a.priority(q) for q in a_states]
    odds = sorted({p for p in prios if p % 2 == 1})
    safra = _Safra(prios, odds)
    table: dict[tuple, int] = {}
    keys: list[tuple] = []

    def intern(key: tuple) -> int:
        v = table.get(key)
        if v is None:
            v = len(keys)
            if v >= cap:
                raise BlowUpError(
                    f"simulation of {a.name} exceeds {cap} states" +
                    (f" at quantifier level {level}" if level is not None else ""), level)
            table[key] = v
            keys.append(key)
        return v

    init = intern((safra.initial_tree(0), safra.neutral))
    width = safra.width

    def active(tree: tuple) -> list[int]:
        if not tree:
            return []
        lab = tree[0][1]
        out = []
        for i in range(len(a_states)):
            if lab >> (i * width) & ((1 << width) - 1):
                out.append(i)
        return out

    n_a = len(a_states)
    block = n_a * n_a
    model_cache: dict[tuple, list[int]] = {}
    step_cache: dict[tuple, int] = {}

    def models(i: int, sigma: frozenset, d: int) -> list[int]:
        # minimal models of state i's transition as masks over (direction, i, j)
        key = (i, sigma, d)
        out = model_cache.get(key)
        if out is None:
            out = []
            for m in minimal_models(a.transition(a_states[i], sigma, d)):
                mask = 0
                for atom in m:
                    mask |= 1 << (atom.direction * block + i * n_a + ids[atom.state])
                out.append(mask)
            model_cache[key] = out
        return out

    def successor(v: int, tree: tuple, rel_mask: int) -> int:
        key = (v, rel_mask)
        w = step_cache.get(key)
        if w is None:
            rel: dict[int, list[int]] = {}
            m = rel_mask
            while m:
                low = m & -m
                i, j = divmod(low.bit_length() - 1, n_a)
                rel.setdefault(i, []).append(j)
                m ^= low
            w = intern(safra.step(tree, rel))
            step_cache[key] = w
        return w

    def choices(v: int, sigma: frozenset, d: int) -> list:
        tree, _ = keys[v]
        vectors = [0]
        for i in active(tree):
            ms = models(i, sigma, d)
            if not ms:
                return []
            vectors = _mask_antichain({x | m for x in vectors for m in ms})
        full = (1 << block) - 1
        return [tuple(successor(v, tree, vec >> (c * block) & full) for c in range(d))
                for vec in vectors]

    def choice_stream(v: int, sigma: frozenset, d: int):
        """Choices in order of increasing obligations, without the full
        antichain; dominated vectors are skipped when detected."""
        tree, _ = keys[v]
        lists = []
        for i in active(tree):
            ms = models(i, sigma, d)
            if not ms:
                return
            lists.append(sorted(ms, key=lambda x: (x.bit_count(), x)))
        full = (1 << block) - 1
        done: list[int] = []
        stack = [(0, 0)]
        while stack:
            k, acc = stack.pop()
            if any(w & acc == w for w in done):
                continue
            if k == len(lists):
                done.append(acc)
                yield tuple(successor(v, tree, acc >> (c * block) & full) for c in range(d))
                continue
            for m in reversed(lists[k]):
                stack.append((k + 1, acc | m))

    def priority(v: int) -> int:
        return keys[v][1] + 1

    n = Npta(init, choices, priority, a.degrees, a.universe, safra.neutral + 1, f"sim({a.name})")
    n.choice_stream = choice_stream
    n.source_size = len(a_states)
    n.source_index = a.index
    return n


def _mask_antichain(masks) -> list[int]:
    """Inclusion-minimal masks."""
    out: list[int] = []
    for m in sorted(masks, key=lambda x: (x.bit_count(), x)):
        if not any(w & m == w for w in out):
            out.append(m)
    return out


# ------------------------------------------------------------ membership

def membership_game(a: Apta, s: KripkeStructure, q: int | str,
                    position_cap: int = 10_000_000) -> tuple[ParityGame, int, GameBuilder]:
    """Game in which Even wins from the returned start position iff ``a``
    accepts the unwinding of ``s`` from ``q``."""
    q = s.index(q)
    gb = GameBuilder()
    top_pos, _ = gb.add(("top",), EVEN, 0)
    gb.edge(top_pos, top_pos)
    bot_pos, _ = gb.add(("bot",), EVEN, 1)
    gb.edge(bot_pos, bot_pos)
    labels = s.labels
    pending_prio: list[int] = []
    keep: list = []
    work: list = []

    def state_pos(r: int, aq) -> int:
        v, new = gb.add(("s", r, aq), EVEN, a.priority(aq))
        if new:
            work.append(("s", v, r, aq))
        return v

    def pbf_pos(r: int, f: Pbf) -> int:
        if isinstance(f, PTrue):
            return top_pos
        if isinstance(f, PFalse):
            return bot_pos
        if isinstance(f, Atom):
            return state_pos(s.succ[r][f.direction], f.state)
        keep.append(f)
        v, new = gb.add(("b", r, id(f)), EVEN if isinstance(f, POr) else ODD, -1)
        if new:
            pending_prio.append(v)
            work.append(("b", v, r, f))
        return v

    start = state_pos(q, a.initial)
    while work:
        if len(gb.keys) > position_cap:
            raise BlowUpError(f"membership game exceeds {position_cap} positions", None)
        kind, v, r, x = work.pop()
        if kind == "s":
            d = s.degree(r)
            t = a.transition(x, labels[r], d)
            gb.edge(v, pbf_pos(r, t))
        else:
            for arg in x.args:
                gb.edge(v, pbf_pos(r, arg))
    top = max([p for p in gb.priority if p >= 0] + [1])
    for v in pending_prio:
        gb.priority[v] = top
    return gb.build(), start, gb


def accepts(a: Apta, s: KripkeStructure, q: int | str) -> bool:
    """Does ``a`` accept the unwinding of ``s`` from ``q``?"""
    game, start, _ = membership_game(a, s, q)
    return solve(game).winner[start] == EVEN


# ---------------------------------------------------------------- dumps

def automaton_to_text(a: Apta, cap: int = 10_000) -> str:
    states = a.states(cap)
    name = {q: f"q{i}" for i, q in enumerate(states)}
    lines = [f"# {a.name}: {len(states)} states, index {a.index}, degrees "
             f"{sorted(a.degrees)}, universe {sorted(a.universe)}"]
    for q in states:
        lines.append(f"state {name[q]} prio {a.priority(q)}")
    for q in states:
        for d in sorted(a.degrees):
            for sigma in letters_of(a.universe):
                t = a.transition(q, sigma, d)
                lab = "{" + ",".join(sorted(sigma)) + "}"
                lines.append(f"trans {d} {name[q]} {lab} := {pbf_str(t, lambda x: name[x])}")
    return "\n".join(lines) + "\n"


def automaton_to_dot(a: Apta, cap: int = 2_000) -> str:
    states = a.states(cap)
    name = {q: i for i, q in enumerate(states)}
    out = ["digraph A {", "  start [shape=point];"]
    for q in states:
        out.append(f'  q{name[q]} [label="q{name[q]}\\nprio {a.priority(q)}"];')
    out.append(f"  start -> q{name[a.initial]};")
    for q in states:
        for d in sorted(a.degrees):
            for sigma in letters_of(a.universe):
                lab = "{" + ",".join(sorted(sigma)) + "}"
                for atom in sorted(pbf_atoms(a.transition(q, sigma, d)), key=lambda x: (x.direction, name[x.state])):
                    out.append(f'  q{name[q]} -> q{name[atom.state]} [label="{lab} d={d} c={atom.direction}"];')
    out.append("}")
    return "\n".join(out) + "\n"
