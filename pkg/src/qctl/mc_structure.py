"""Model checking under the structure semantics.

:func:`sat_set` is the optimized engine.  Propositional quantifiers are
evaluated bit-parallel: every state carries an integer whose bit ``l`` is
the truth value under the ``l``-th labelling ("lane") of the quantified
propositions currently in scope.  When the number of lanes would exceed
``CheckOptions.lane_cap`` the remaining labelling bits are enumerated.

:func:`brute_force_sat` is an independent reference evaluator written
directly from the semantic clauses, and :func:`eval_mso` evaluates MSO
formulas by brute force.
"""

from __future__ import annotations

import itertools
from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import logic_ast as L
from .errors import EnumerationBudgetError, FragmentError, ScaleError, StructureError
from .kripke import KripkeStructure, relabel_variants, reachable_part
from .mso import (MAnd, MEdge, MEq, MExists, MForall, MIn, MLab, MNot, MOr, MTrue,
                  MsoFormula, is_set_var, mso_free_vars, mso_set_vars)


@dataclass
class CheckOptions:
    """Engine options.

    ``enumeration_cap`` bounds the number of labelling bits that are
    enumerated one by one (bits handled in parallel lanes are free).
    ``witness_labels`` maps proposition names to state names; an
    existential block whose propositions are all hinted first tries the
    hinted labelling.  With ``hints_only`` such blocks are never
    enumerated, which under-approximates positive existential blocks.
    """

    enumeration_cap: int = 24
    lane_cap: int = 1 << 16
    witness_labels: Mapping[str, Iterable[str]] | None = None
    hints_only: bool = False
    memoize: bool = True
    memo_limit: int = 200_000

    def __post_init__(self):
        if self.enumeration_cap < 0:
            raise ValueError("enumeration cap must be nonnegative")


class StateSet(frozenset):
    """Set of state indices of a structure."""

    def names(self, s: KripkeStructure) -> list[str]:
        return [s.states[i] for i in sorted(self)]


# ----------------------------------------------------------- node compiler

class _Node:
    __slots__ = ("op", "kids", "props", "name", "fb", "uid", "positive")

    def __init__(self, op, kids=(), props=(), name=None):
        self.op = op
        self.kids = kids
        self.props = props
        self.name = name
        self.fb: frozenset[str] = frozenset()
        self.uid = 0
        self.positive = True


def _separate_free(f: L.Formula) -> L.Formula:
    """Rename binders whose name also occurs free, keeping the other names."""
    clash = L.free_props(f) & L.bound_props(f)
    if not clash:
        return f
    fresh = L.FreshNames(L.all_props(f))

    def go(g: L.Formula, env: Mapping[str, str]) -> L.Formula:
        if isinstance(g, L.Prop):
            return L.Prop(env.get(g.name, g.name))
        if isinstance(g, (L.Exists, L.Forall)):
            env2 = dict(env)
            names = []
            for p in g.props:
                env2[p] = fresh(p) if p in clash else p
                names.append(env2[p])
            return type(g)(tuple(names), go(g.body, env2))
        return L.rebuild(g, tuple(go(c, env) for c in L.children(g)))

    return go(f, {})


def _compile(f: L.Formula) -> _Node:
    """Translate to a DAG of nodes; same-kind quantifiers are merged into blocks."""
    f = _separate_free(f)
    table: dict[L.Formula, _Node] = {}
    counter = itertools.count()

    def go(g: L.Formula) -> _Node:
        if g in table:
            return table[g]
        if isinstance(g, L.Prop):
            n = _Node("prop", name=g.name)
        elif isinstance(g, L.TrueF):
            n = _Node("true")
        elif isinstance(g, L.FalseF):
            n = _Node("false")
        elif isinstance(g, L.Not):
            n = _Node("not", (go(g.arg),))
        elif isinstance(g, (L.And, L.Or, L.Implies, L.Iff)):
            n = _Node(type(g).__name__.lower(), (go(g.left), go(g.right)))
        elif isinstance(g, (L.Exists, L.Forall)):
            props = list(g.props)
            body = g.body
            while type(body) is type(g):
                props.extend(body.props)
                body = body.body
            n = _Node("exists" if isinstance(g, L.Exists) else "forall", (go(body),), tuple(props))
        elif isinstance(g, L.PathQuant):
            p = g.path
            q = g.quant
            if isinstance(p, L.Next):
                n = _Node(q + "X", (go(p.arg),))
            elif isinstance(p, L.Until):
                n = _Node(q + "U", (go(p.left), go(p.right)))
            elif isinstance(p, L.WeakUntil):
                n = _Node(q + "W", (go(p.left), go(p.right)))
            elif isinstance(p, L.Finally):
                n = _Node(q + "U", (go(L.TRUE), go(p.arg)))
            elif isinstance(p, L.Globally):
                n = _Node(q + "W", (go(p.arg), go(L.FALSE)))
            else:
                raise FragmentError("CTL* path formula")
        else:
            raise FragmentError(f"unsupported formula {g!r}")
        n.uid = next(counter)
        table[g] = n
        return n

    root = go(f)
    # free bound props per node, and polarity of quantifier blocks
    bound = L.bound_props(f)
    order: list[_Node] = []
    seen: set[int] = set()

    def post(n: _Node):
        if n.uid in seen:
            return
        seen.add(n.uid)
        for k in n.kids:
            post(k)
        order.append(n)

    post(root)
    for n in order:
        if n.op == "prop":
            n.fb = frozenset((n.name,)) & bound
        else:
            fb = frozenset().union(*(k.fb for k in n.kids)) if n.kids else frozenset()
            if n.op in ("exists", "forall"):
                fb -= frozenset(n.props)
            n.fb = fb

    def polarity(n: _Node, pos: bool, done: set):
        key = (n.uid, pos)
        if key in done:
            return
        done.add(key)
        if n.op in ("exists", "forall") and not pos:
            n.positive = False
        if n.op == "not":
            polarity(n.kids[0], not pos, done)
        elif n.op == "implies":
            polarity(n.kids[0], not pos, done)
            polarity(n.kids[1], pos, done)
        elif n.op == "iff":
            for k in n.kids:
                polarity(k, pos, done)
                polarity(k, not pos, done)
        else:
            for k in n.kids:
                polarity(k, pos, done)

    polarity(root, True, set())
    return root


# ----------------------------------------------------------------- engine

def _repunit(width: int, count: int) -> int:
    """Integer with ``count`` blocks of ``width`` bits, each block equal to 1."""
    if count <= 1:
        return 1 if count == 1 else 0
    return ((1 << (width * count)) - 1) // ((1 << width) - 1)


class _Env:
    """Lane context: number of lanes and per-proposition lane masks."""

    __slots__ = ("lanes", "full", "values", "versions")

    def __init__(self, lanes: int, values: dict, versions: dict):
        self.lanes = lanes
        self.full = (1 << lanes) - 1
        self.values = values
        self.versions = versions


class Engine:
    def __init__(self, s: KripkeStructure, opts: CheckOptions | None = None):
        self.s = s
        self.opts = opts or CheckOptions()
        self.n = len(s.states)
        self.succ = s.succ
        self.memo: OrderedDict = OrderedDict()
        self.version = itertools.count(1)
        self.patterns: dict = {}
        self.hints = None
        if self.opts.witness_labels:
            self.hints = {}
            for p, names in self.opts.witness_labels.items():
                idx = {s.index(x) for x in names}
                self.hints[p] = idx
        self.stats_labellings = 0
        self.root = None
        self.focus = None

    # -- entry points
    def sat(self, f: L.Formula, focus: int | None = None) -> StateSet:
        """Satisfying states; with ``focus`` only that state's membership is exact."""
        L.require_qctl(f)
        root = _compile(f)
        self.root, self.focus = root, focus
        env = _Env(1, {}, {})
        v = self.eval(root, env)
        return StateSet(i for i, x in enumerate(v) if x)

    # -- evaluation
    def eval(self, n: _Node, env: _Env) -> list[int]:
        if not n.fb and env.lanes > 1:
            base = self.eval(n, _Env(1, {}, {}))
            full = env.full
            return [full if x else 0 for x in base]
        key = None
        if self.opts.memoize:
            key = (n.uid, env.lanes, tuple(env.versions[p] for p in sorted(n.fb)))
            hit = self.memo.get(key)
            if hit is not None:
                return hit
        v = self._eval(n, env)
        if key is not None:
            self.memo[key] = v
            if len(self.memo) > self.opts.memo_limit:
                self.memo.popitem(last=False)
        return v

    def _eval(self, n: _Node, env: _Env) -> list[int]:
        op = n.op
        full = env.full
        N = self.n
        if op == "prop":
            if n.name in env.values:
                return env.values[n.name]
            labels = self.s.labels
            return [full if n.name in labels[i] else 0 for i in range(N)]
        if op == "true":
            return [full] * N
        if op == "false":
            return [0] * N
        if op == "not":
            a = self.eval(n.kids[0], env)
            return [full ^ x for x in a]
        if op in ("and", "or", "implies", "iff"):
            a = self.eval(n.kids[0], env)
            b = self.eval(n.kids[1], env)
            if op == "and":
                return [x & y for x, y in zip(a, b)]
            if op == "or":
                return [x | y for x, y in zip(a, b)]
            if op == "implies":
                return [(full ^ x) | y for x, y in zip(a, b)]
            return [full ^ (x ^ y) for x, y in zip(a, b)]
        if op in ("exists", "forall"):
            return self.quantify(n, env)
        if op == "EX":
            a = self.eval(n.kids[0], env)
            return [self._or_succ(a, i) for i in range(N)]
        if op == "AX":
            a = self.eval(n.kids[0], env)
            return [self._and_succ(a, i, full) for i in range(N)]
        a = self.eval(n.kids[0], env)
        b = self.eval(n.kids[1], env)
        if op == "EU":
            return self._fix(a, b, list(b), self._or_succ, full)
        if op == "AU":
            return self._fix(a, b, list(b), self._and_succ, full)
        if op == "EW":
            return self._fix(a, b, [full] * N, self._or_succ, full)
        if op == "AW":
            return self._fix(a, b, [full] * N, self._and_succ, full)
        raise FragmentError(f"unknown node {op}")

    def _or_succ(self, v, i, full=None):
        out = 0
        for r in self.succ[i]:
            out |= v[r]
        return out

    def _and_succ(self, v, i, full):
        out = full
        for r in self.succ[i]:
            out &= v[r]
        return out

    def _fix(self, a, b, z, step, full):
        """Iterate z := b | (a & step(z)) to a fixpoint from the given seed."""
        changed = True
        order = range(self.n - 1, -1, -1)
        while changed:
            changed = False
            for i in order:
                new = b[i] | (a[i] & step(z, i, full))
                if new != z[i]:
                    z[i] = new
                    changed = True
        return z

    # -- quantifier blocks
    def _pattern(self, lanes: int, bits: int, b: int) -> int:
        key = (lanes, bits, b)
        pat = self.patterns.get(key)
        if pat is None:
            block = lanes << b  # lanes * 2^b
            unit = ((1 << block) - 1) << block
            pat = unit * _repunit(2 * block, 1 << (bits - b - 1))
            self.patterns[key] = pat
        return pat

    def quantify(self, n: _Node, env: _Env) -> list[int]:
        is_exists = n.op == "exists"
        props = n.props
        body = n.kids[0]
        N = self.n
        nb = N * len(props)
        full = env.full
        # propagate outer bindings actually used by the body
        outer = [p for p in sorted(body.fb) if p in env.values]

        acc = [0] * N if is_exists else [full] * N
        if is_exists and self.hints is not None and n.positive and all(p in self.hints for p in props):
            values = {p: env.values[p] for p in outer}
            versions = {p: env.versions[p] for p in outer}
            for p in props:
                values[p] = [full if i in self.hints[p] else 0 for i in range(N)]
                versions[p] = next(self.version)
            acc = list(self.eval(body, _Env(env.lanes, values, versions)))
            if self.opts.hints_only or all(x == full for x in acc):
                return acc
            # the hinted labelling already settles the queried state
            if n is self.root and self.focus is not None and acc[self.focus] == full:
                return acc

        # split labelling bits into parallel (low) and enumerated (high) ones
        par = 0
        while par < nb and (env.lanes << (par + 1)) <= self.opts.lane_cap:
            par += 1
        enum_bits = nb - par
        if enum_bits > self.opts.enumeration_cap:
            raise EnumerationBudgetError(
                f"quantifier block over {', '.join(props)} needs {enum_bits} enumerated labelling bits "
                f"(cap {self.opts.enumeration_cap})")
        lanes = env.lanes << par
        newfull = (1 << lanes) - 1
        rep = _repunit(env.lanes, 1 << par)
        base_values = {p: [x * rep for x in env.values[p]] for p in outer}
        base_versions = {p: next(self.version) for p in outer}
        k = len(props)
        for hi in range(1 << enum_bits):
            values = dict(base_values)
            versions = dict(base_versions)
            for t, p in enumerate(props):
                col = []
                for i in range(N):
                    b = i * k + t
                    if b < par:
                        col.append(self._pattern(env.lanes, par, b))
                    else:
                        col.append(newfull if hi >> (b - par) & 1 else 0)
                values[p] = col
                versions[p] = next(self.version)
            self.stats_labellings += 1 << par
            v = self.eval(body, _Env(lanes, values, versions))
            for i in range(N):
                x = v[i]
                for b in range(par - 1, -1, -1):
                    half = env.lanes << b
                    lo = x & ((1 << half) - 1)
                    x = (lo | (x >> half)) if is_exists else (lo & (x >> half))
                acc[i] = (acc[i] | x) if is_exists else (acc[i] & x)
            if is_exists and all(x == full for x in acc):
                break
            if not is_exists and not any(acc):
                break
        return acc


def sat_set(s: KripkeStructure, f: L.Formula, opts: CheckOptions | None = None) -> StateSet:
    """States of ``s`` satisfying ``f`` under the structure semantics."""
    return Engine(s, opts).sat(f)


def check_structure(s: KripkeStructure, q: int | str, f: L.Formula,
                    opts: CheckOptions | None = None) -> bool:
    q = s.index(q)
    return q in Engine(s, opts).sat(f, focus=q)


# ------------------------------------------------------- reference oracle

BRUTE_MAX_STATES = 6
BRUTE_MAX_DEPTH = 3


def brute_force_sat(s: KripkeStructure, q: int | str, f: L.Formula) -> bool:
    """Literal evaluation of the semantic clauses (reference oracle)."""
    if len(s.states) > BRUTE_MAX_STATES:
        raise ScaleError(f"brute force supports at most {BRUTE_MAX_STATES} states")
    if L.quantifier_depth(f) > BRUTE_MAX_DEPTH:
        raise ScaleError(f"brute force supports quantifier depth at most {BRUTE_MAX_DEPTH}")
    if not L.is_qctl(f):
        raise FragmentError("brute force evaluator handles QCTL only")
    return _holds(s, s.index(q), f)


def _holds(s: KripkeStructure, q: int, f: L.Formula) -> bool:
    if isinstance(f, L.Prop):
        return f.name in s.labels[q]
    if isinstance(f, L.TrueF):
        return True
    if isinstance(f, L.FalseF):
        return False
    if isinstance(f, L.Not):
        return not _holds(s, q, f.arg)
    if isinstance(f, L.And):
        return _holds(s, q, f.left) and _holds(s, q, f.right)
    if isinstance(f, L.Or):
        return _holds(s, q, f.left) or _holds(s, q, f.right)
    if isinstance(f, L.Implies):
        return (not _holds(s, q, f.left)) or _holds(s, q, f.right)
    if isinstance(f, L.Iff):
        return _holds(s, q, f.left) == _holds(s, q, f.right)
    if isinstance(f, L.Exists):
        return any(_holds(v, q, f.body) for v in relabel_variants(s, f.props, cap=64))
    if isinstance(f, L.Forall):
        return all(_holds(v, q, f.body) for v in relabel_variants(s, f.props, cap=64))
    if isinstance(f, L.PathQuant):
        p = f.path
        sat = lambda g: (lambda r: _holds(s, r, g))
        neg = lambda g: (lambda r: not _holds(s, r, g))
        both = lambda a, b: (lambda r: a(r) and b(r))
        if isinstance(p, L.Finally):
            p = L.Until(L.TRUE, p.arg)
        elif isinstance(p, L.Globally):
            p = L.WeakUntil(p.arg, L.FALSE)
        if isinstance(p, L.Next):
            results = [_holds(s, r, p.arg) for r in s.succ[q]]
            return any(results) if f.quant == "E" else all(results)
        if isinstance(p, (L.Until, L.WeakUntil)):
            a, b = p.left, p.right
            weak = isinstance(p, L.WeakUntil)
            if f.quant == "E":
                return _path_search(s, q, sat(a), sat(b), lasso=weak)
            # a violating path keeps a & !b until it reaches !a & !b,
            # or (strong until only) loops forever in a & !b
            return not _path_search(s, q, both(sat(a), neg(b)), both(neg(a), neg(b)), lasso=not weak)
    raise FragmentError(f"unsupported formula {f!r}")


def _path_search(s: KripkeStructure, q: int, inv, goal, lasso: bool) -> bool:
    """Is there a path from q through ``inv`` states reaching ``goal``
    (or, if ``lasso``, cycling forever through ``inv`` states)?"""
    path: list[int] = []

    def dfs(r: int) -> bool:
        if goal(r):
            return True
        if not inv(r):
            return False
        path.append(r)
        for t in s.succ[r]:
            if t in path:
                if lasso:
                    path.pop()
                    return True
                continue
            if dfs(t):
                path.pop()
                return True
        path.pop()
        return False

    return dfs(q)


# ------------------------------------------------------------- MSO oracle

MSO_MAX_STATES = 8
MSO_MAX_SET_VARS = 3


def eval_mso(s: KripkeStructure, q: int | str, phi: MsoFormula,
             assignment: Mapping[str, object] | None = None) -> bool:
    """Brute-force MSO evaluation on the part of ``s`` reachable from ``q``.

    The distinguished variable ``x`` denotes ``q`` unless assigned.
    Assigned values are state names (first order) or collections of
    state names (second order).
    """
    q = s.index(q)
    sub = reachable_part(s, q)
    if len(sub.states) > MSO_MAX_STATES:
        raise ScaleError(f"MSO evaluation supports at most {MSO_MAX_STATES} reachable states")
    if len(mso_set_vars(phi)) > MSO_MAX_SET_VARS:
        raise ScaleError(f"MSO evaluation supports at most {MSO_MAX_SET_VARS} set variables")
    env: dict[str, object] = {"x": sub.initial}
    for var, val in (assignment or {}).items():
        if is_set_var(var):
            env[var] = frozenset(sub.index(v) for v in val if v in sub.states)
        else:
            if val not in sub.states:
                raise StructureError(f"{var} assigned to a state outside the reachable part")
            env[var] = sub.index(val)
    missing = mso_free_vars(phi) - set(env)
    if missing:
        raise ScaleError(f"unbound variable(s): {', '.join(sorted(missing))}")
    return _mso(sub, phi, env)


def _mso(s: KripkeStructure, f: MsoFormula, env: dict) -> bool:
    if isinstance(f, MTrue):
        return True
    if isinstance(f, MEdge):
        return env[f.dst] in s.succ[env[f.src]]
    if isinstance(f, MEq):
        return env[f.left] == env[f.right]
    if isinstance(f, MIn):
        return env[f.elem] in env[f.set]
    if isinstance(f, MLab):
        return f.prop in s.labels[env[f.var]]
    if isinstance(f, MNot):
        return not _mso(s, f.arg, env)
    if isinstance(f, MAnd):
        return _mso(s, f.left, env) and _mso(s, f.right, env)
    if isinstance(f, MOr):
        return _mso(s, f.left, env) or _mso(s, f.right, env)
    if isinstance(f, (MExists, MForall)):
        n = len(s.states)
        if is_set_var(f.var):
            domain: Sequence = [frozenset(i for i in range(n) if m >> i & 1) for m in range(1 << n)]
        else:
            domain = range(n)
        results = (_mso(s, f.body, {**env, f.var: d}) for d in domain)
        return any(results) if isinstance(f, MExists) else all(results)
    raise TypeError(f)
