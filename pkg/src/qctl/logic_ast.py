"""Formulas of QCTL* and its fragments: AST, parser, printer, measures."""

from __future__ import annotations

import itertools
import re
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping

from .errors import FormulaSyntaxError, FragmentError, QctlError


class Formula:
    """Base class of state and path formulas."""

    __slots__ = ()

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    props: tuple[str, ...]
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    props: tuple[str, ...]
    body: Formula


@dataclass(frozen=True)
class PathQuant(Formula):
    quant: str  # "E" or "A"
    path: Formula


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class WeakUntil(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Finally(Formula):
    arg: Formula


@dataclass(frozen=True)
class Globally(Formula):
    arg: Formula


TRUE = TrueF()
FALSE = FalseF()
TEMPORAL = (Next, Until, WeakUntil, Finally, Globally)
BINARY = (And, Or, Implies, Iff, Until, WeakUntil)
UNARY = (Not, Next, Finally, Globally)


# ---------------------------------------------------------------- builders

def prop(name: str) -> Prop:
    return Prop(name)


def neg(f: Formula) -> Formula:
    return Not(f)


def conj(*fs: Formula) -> Formula:
    """Left-nested conjunction; the empty conjunction is true."""
    fs = [f for f in fs if f is not None]
    if not fs:
        return TRUE
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(*fs: Formula) -> Formula:
    fs = [f for f in fs if f is not None]
    if not fs:
        return FALSE
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


def exists(props: str | Iterable[str], body: Formula) -> Formula:
    props = (props,) if isinstance(props, str) else tuple(props)
    return Exists(props, body) if props else body


def forall(props: str | Iterable[str], body: Formula) -> Formula:
    props = (props,) if isinstance(props, str) else tuple(props)
    return Forall(props, body) if props else body


def EX(f): return PathQuant("E", Next(f))
def AX(f): return PathQuant("A", Next(f))
def EF(f): return PathQuant("E", Finally(f))
def AF(f): return PathQuant("A", Finally(f))
def EG(f): return PathQuant("E", Globally(f))
def AG(f): return PathQuant("A", Globally(f))
def EU(f, g): return PathQuant("E", Until(f, g))
def AU(f, g): return PathQuant("A", Until(f, g))
def EW(f, g): return PathQuant("E", WeakUntil(f, g))
def AW(f, g): return PathQuant("A", WeakUntil(f, g))


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Prop, TrueF, FalseF)):
        return ()
    if isinstance(f, (Not, Next, Finally, Globally)):
        return (f.arg,)
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, (Exists, Forall)):
        return (f.body,)
    if isinstance(f, PathQuant):
        return (f.path,)
    raise TypeError(f"not a formula: {f!r}")


def rebuild(f: Formula, kids: tuple[Formula, ...]) -> Formula:
    """Copy of ``f`` with its children replaced by ``kids``."""
    if isinstance(f, (Prop, TrueF, FalseF)):
        return f
    if isinstance(f, (Not, Next, Finally, Globally)):
        return type(f)(kids[0])
    if isinstance(f, BINARY):
        return type(f)(kids[0], kids[1])
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.props, kids[0])
    if isinstance(f, PathQuant):
        return PathQuant(f.quant, kids[0])
    raise TypeError(f"not a formula: {f!r}")


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal (with repetitions)."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def free_props(f: Formula) -> frozenset[str]:
    if isinstance(f, Prop):
        return frozenset((f.name,))
    if isinstance(f, (Exists, Forall)):
        return free_props(f.body) - frozenset(f.props)
    out: frozenset[str] = frozenset()
    for c in children(f):
        out |= free_props(c)
    return out


def bound_props(f: Formula) -> frozenset[str]:
    out = set()
    for g in subformulas(f):
        if isinstance(g, (Exists, Forall)):
            out.update(g.props)
    return frozenset(out)


def all_props(f: Formula) -> frozenset[str]:
    out = set()
    for g in subformulas(f):
        if isinstance(g, Prop):
            out.add(g.name)
        elif isinstance(g, (Exists, Forall)):
            out.update(g.props)
    return frozenset(out)


def has_quantifier(f: Formula) -> bool:
    return any(isinstance(g, (Exists, Forall)) for g in subformulas(f))


# ------------------------------------------------------------- fresh names

RESERVED_RE = re.compile(r"__f\d")


class FreshNames:
    """Generator of names ``__f<N>[_hint]`` avoiding a given set."""

    def __init__(self, avoid: Iterable[str] = ()):
        self.avoid = set(avoid)
        self.counter = itertools.count(1)

    def __call__(self, hint: str = "") -> str:
        hint = base_name(hint).lstrip("_")
        while True:
            name = f"__f{next(self.counter)}" + (f"_{hint}" if hint else "")
            if name not in self.avoid:
                self.avoid.add(name)
                return name


def base_name(name: str) -> str:
    """Strip a fresh-name prefix, keeping the hint."""
    m = re.match(r"__f\d+_?(.*)$", name)
    return m.group(1) if m and m.group(1) else name


def tidy_names(f: Formula) -> Formula:
    """Give bound fresh names readable replacements (``z``, ``z1``, ...)."""
    used = set(all_props(f))

    def pick(name: str) -> str:
        base = base_name(name).lstrip("_") or "p"
        cand, k = base, 1
        while cand in used:
            cand, k = f"{base}{k}", k + 1
        used.add(cand)
        return cand

    def go(g: Formula, env: Mapping[str, str]) -> Formula:
        if isinstance(g, Prop):
            return Prop(env.get(g.name, g.name))
        if isinstance(g, (Exists, Forall)):
            new = tuple(pick(p) if RESERVED_RE.match(p) else p for p in g.props)
            inner = {**env, **dict(zip(g.props, new))}
            return type(g)(new, go(g.body, inner))
        kids = children(g)
        return rebuild(g, tuple(go(k, env) for k in kids)) if kids else g

    return go(f, {})


# ------------------------------------------------------------------- lexer

_TOKEN_RE = re.compile(r"\s*(?:(#[^\n]*)|(<->|->|[!&|()\[\].,])|([A-Za-z_][A-Za-z0-9_]*)|(\S))")

KEYWORDS = {"exists", "forall", "true", "false", "E", "A"}


@dataclass
class _Tok:
    kind: str  # "sym", "id", "eof"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            pass
        elif m.group(2) is not None:
            toks.append(_Tok("sym", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            toks.append(_Tok("id", m.group(3), m.start(3)))
        elif m.group(4) is not None:
            raise FormulaSyntaxError(f"unexpected character {m.group(4)!r}", m.start(4))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, allow_reserved: bool):
        self.toks = _tokenize(text)
        self.i = 0
        self.allow_reserved = allow_reserved

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str) -> FormulaSyntaxError:
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        return FormulaSyntaxError(f"{msg}, found {found}", t.pos)

    def at(self, text: str) -> bool:
        return self.tok.kind != "eof" and self.tok.text == text

    def eat(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.eat(text):
            raise self.error(f"expected {text!r}")

    def ident(self) -> str:
        t = self.tok
        if t.kind != "id" or t.text in KEYWORDS:
            raise self.error("expected a proposition name")
        if RESERVED_RE.match(t.text) and not self.allow_reserved:
            raise FormulaSyntaxError(f"reserved name {t.text!r}", t.pos)
        self.i += 1
        return t.text

    # state formulas
    def formula(self) -> Formula:
        if self.at("exists") or self.at("forall"):
            kind = self.tok.text
            self.i += 1
            names = [self.ident()]
            while self.eat(","):
                names.append(self.ident())
            self.expect(".")
            body = self.formula()
            return (Exists if kind == "exists" else Forall)(tuple(names), body)
        return self.iff()

    def iff(self) -> Formula:
        f = self.imp()
        while self.eat("<->"):
            f = Iff(f, self.imp())
        return f

    def imp(self) -> Formula:
        f = self.disj()
        if self.eat("->"):
            return Implies(f, self.imp_rhs())
        return f

    def imp_rhs(self) -> Formula:
        if self.at("exists") or self.at("forall"):
            return self.formula()
        return self.imp()

    def disj(self) -> Formula:
        f = self.conj()
        while self.eat("|"):
            f = Or(f, self.operand(self.conj))
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.eat("&"):
            f = And(f, self.operand(self.unary))
        return f

    def operand(self, rule: Callable[[], Formula]) -> Formula:
        # a trailing quantifier extends as far right as possible
        if self.at("exists") or self.at("forall"):
            return self.formula()
        return rule()

    def unary(self) -> Formula:
        t = self.tok
        if t.kind == "eof":
            raise self.error("expected a formula")
        if self.eat("!"):
            return Not(self.operand(self.unary))
        if self.at("exists") or self.at("forall"):
            return self.formula()
        if self.eat("E"):
            return PathQuant("E", self.path())
        if self.eat("A"):
            return PathQuant("A", self.path())
        if self.eat("true"):
            return TRUE
        if self.eat("false"):
            return FALSE
        if self.eat("("):
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "id":
            return Prop(self.ident())
        raise self.error("expected a formula")

    def path(self) -> Formula:
        t = self.tok
        if t.kind == "id" and t.text in ("X", "F", "G"):
            self.i += 1
            arg = self.operand(self.unary)
            return {"X": Next, "F": Finally, "G": Globally}[t.text](arg)
        if self.eat("["):
            left = self.formula()
            if self.eat("U"):
                op = Until
            elif self.eat("W"):
                op = WeakUntil
            else:
                raise self.error("expected 'U' or 'W'")
            right = self.formula()
            self.expect("]")
            return op(left, right)
        if self.eat("("):
            f = self.pformula()
            self.expect(")")
            return f
        raise self.error("expected 'X', 'F', 'G', '[' or '(' after path quantifier")

    # path formulas (full QCTL*)
    def pformula(self) -> Formula:
        if self.at("exists") or self.at("forall"):
            return self.formula()
        f = self.pimp()
        while self.eat("<->"):
            f = Iff(f, self.pimp())
        return f

    def pimp(self) -> Formula:
        f = self.pdisj()
        if self.eat("->"):
            return Implies(f, self.pimp())
        return f

    def pdisj(self) -> Formula:
        f = self.pconj()
        while self.eat("|"):
            f = Or(f, self.pconj())
        return f

    def pconj(self) -> Formula:
        f = self.puntil()
        while self.eat("&"):
            f = And(f, self.puntil())
        return f

    def puntil(self) -> Formula:
        f = self.punary()
        if self.eat("U"):
            return Until(f, self.puntil())
        if self.eat("W"):
            return WeakUntil(f, self.puntil())
        return f

    def punary(self) -> Formula:
        t = self.tok
        if self.eat("!"):
            return Not(self.punary())
        if t.kind == "id" and t.text in ("X", "F", "G"):
            self.i += 1
            return {"X": Next, "F": Finally, "G": Globally}[t.text](self.punary())
        if self.eat("("):
            f = self.pformula()
            self.expect(")")
            return f
        if self.at("exists") or self.at("forall"):
            return self.formula()
        return self.unary()


def parse_formula(text: str, allow_reserved: bool = False) -> Formula:
    """Parse a formula; duplicate binders are renamed with a warning."""
    p = _Parser(text, allow_reserved)
    f = p.formula()
    if p.tok.kind != "eof":
        raise p.error("unexpected trailing input")
    return rename_duplicate_binders(f, warn=True)


def rename_duplicate_binders(f: Formula, warn: bool = False) -> Formula:
    """Rename every binder that reuses an already bound name."""
    counts: dict[str, int] = {}
    for g in subformulas(f):
        if isinstance(g, (Exists, Forall)):
            for p in g.props:
                counts[p] = counts.get(p, 0) + 1
    if all(c == 1 for c in counts.values()) and not any(
        isinstance(g, (Exists, Forall)) and len(set(g.props)) < len(g.props) for g in subformulas(f)
    ):
        return f
    if warn:
        dup = sorted(p for p, c in counts.items() if c > 1)
        warnings.warn(f"proposition(s) quantified more than once: {', '.join(dup)}; renaming inner binders",
                      stacklevel=3)
    fresh = FreshNames(all_props(f))
    seen: set[str] = set()

    def go(g: Formula, env: Mapping[str, str]) -> Formula:
        if isinstance(g, Prop):
            return Prop(env.get(g.name, g.name))
        if isinstance(g, (Exists, Forall)):
            env2 = dict(env)
            names = []
            for p in g.props:
                if p in seen:
                    q = fresh(p)
                    env2[p] = q
                    names.append(q)
                else:
                    seen.add(p)
                    env2.pop(p, None)
                    names.append(p)
            return type(g)(tuple(names), go(g.body, env2))
        return rebuild(g, tuple(go(c, env) for c in children(g)))

    return go(f, {})


def standardize_apart(f: Formula) -> Formula:
    """Rename binders so that bound names are pairwise distinct and never free."""
    fr = free_props(f)
    fresh = FreshNames(all_props(f))
    seen: set[str] = set(fr)

    def go(g: Formula, env: Mapping[str, str]) -> Formula:
        if isinstance(g, Prop):
            return Prop(env.get(g.name, g.name))
        if isinstance(g, (Exists, Forall)):
            env2 = dict(env)
            names = []
            for p in g.props:
                q = fresh(p) if p in seen else p
                seen.add(q)
                env2[p] = q
                names.append(q)
            return type(g)(tuple(names), go(g.body, env2))
        return rebuild(g, tuple(go(c, env) for c in children(g)))

    return go(f, {})


# ----------------------------------------------------------------- printer

_LEVEL = {"formula": 0, "iff": 1, "imp": 2, "or": 3, "and": 4, "unary": 5}


def print_formula(f: Formula) -> str:
    """Render in the concrete syntax accepted by :func:`parse_formula`."""
    return _pr(f, 0)


def _wrap(s: str, need: bool) -> str:
    return f"({s})" if need else s


def _pr(f: Formula, level: int) -> str:
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Not):
        return "!" + _pr(f.arg, 5)
    if isinstance(f, And):
        return _wrap(f"{_pr(f.left, 4)} & {_pr(f.right, 5)}", level > 4)
    if isinstance(f, Or):
        return _wrap(f"{_pr(f.left, 3)} | {_pr(f.right, 4)}", level > 3)
    if isinstance(f, Implies):
        return _wrap(f"{_pr(f.left, 3)} -> {_pr(f.right, 2)}", level > 2)
    if isinstance(f, Iff):
        return _wrap(f"{_pr(f.left, 1)} <-> {_pr(f.right, 2)}", level > 1)
    if isinstance(f, (Exists, Forall)):
        kw = "exists" if isinstance(f, Exists) else "forall"
        return _wrap(f"{kw} {', '.join(f.props)}. {_pr(f.body, 0)}", level > 0)
    if isinstance(f, PathQuant):
        return f.quant + " " + _pr_path_top(f.path)
    raise QctlError(f"cannot print path formula outside a path quantifier: {f!r}")


def _pr_path_top(p: Formula) -> str:
    if isinstance(p, Next) and is_state_formula(p.arg):
        return "X " + _pr(p.arg, 5)
    if isinstance(p, Finally) and is_state_formula(p.arg):
        return "F " + _pr(p.arg, 5)
    if isinstance(p, Globally) and is_state_formula(p.arg):
        return "G " + _pr(p.arg, 5)
    if isinstance(p, (Until, WeakUntil)) and is_state_formula(p.left) and is_state_formula(p.right):
        op = "U" if isinstance(p, Until) else "W"
        return f"[{_pr(p.left, 0)} {op} {_pr(p.right, 0)}]"
    return "(" + _prp(p, 0) + ")"


def _prp(p: Formula, level: int) -> str:
    """Path-formula printer; levels: 0 iff, 1 imp, 2 or, 3 and, 4 until, 5 unary."""
    if isinstance(p, Not):
        return "!" + _prp(p.arg, 5)
    if isinstance(p, Next):
        return "X " + _prp(p.arg, 5)
    if isinstance(p, Finally):
        return "F " + _prp(p.arg, 5)
    if isinstance(p, Globally):
        return "G " + _prp(p.arg, 5)
    if isinstance(p, (Until, WeakUntil)):
        op = "U" if isinstance(p, Until) else "W"
        return _wrap(f"{_prp(p.left, 5)} {op} {_prp(p.right, 4)}", level > 4)
    if isinstance(p, And):
        return _wrap(f"{_prp(p.left, 3)} & {_prp(p.right, 4)}", level > 3)
    if isinstance(p, Or):
        return _wrap(f"{_prp(p.left, 2)} | {_prp(p.right, 3)}", level > 2)
    if isinstance(p, Implies):
        return _wrap(f"{_prp(p.left, 2)} -> {_prp(p.right, 1)}", level > 1)
    if isinstance(p, Iff):
        return _wrap(f"{_prp(p.left, 0)} <-> {_prp(p.right, 1)}", level > 0)
    if isinstance(p, (Exists, Forall)):
        return "(" + _pr(p, 0) + ")"
    return _pr(p, 5)


def is_state_formula(f: Formula) -> bool:
    """True when no temporal operator occurs outside a path quantifier."""
    if isinstance(f, TEMPORAL):
        return False
    if isinstance(f, PathQuant):
        return True
    return all(is_state_formula(c) for c in children(f))


# --------------------------------------------------------------- measures

def size_and_dag_size(f: Formula) -> tuple[int, int]:
    size = 0
    distinct: set[Formula] = set()
    for g in subformulas(f):
        size += 1
        distinct.add(g)
    return size, len(distinct)


def is_qctl(f: Formula) -> bool:
    """Every temporal operator sits immediately under a path quantifier."""
    def state(g: Formula) -> bool:
        if isinstance(g, TEMPORAL):
            return False
        if isinstance(g, PathQuant):
            p = g.path
            if not isinstance(p, TEMPORAL):
                return False
            return all(state(c) for c in children(p))
        return all(state(c) for c in children(g))
    return state(f)


def require_qctl(f: Formula) -> None:
    if not is_qctl(f):
        raise FragmentError("formula has a CTL* body; only QCTL is supported here")


@dataclass(frozen=True)
class FragmentDescriptor:
    body_kind: str          # "CTL" or "CTL*"
    quantifier_depth: int
    prenex: bool
    prefix_class: str       # "EQ<k>", "AQ<k>" or "neither"
    overall_class: str      # "Q<k>" or "Q<k>*"


def _block_depth(f: Formula, ctx: str | None) -> int:
    if isinstance(f, Not):
        flip = {"E": "A", "A": "E", None: None}[ctx]
        return _block_depth(f.arg, flip)
    if isinstance(f, (Exists, Forall)):
        t = "E" if isinstance(f, Exists) else "A"
        return _block_depth(f.body, t) + (0 if ctx == t else 1)
    return max((_block_depth(c, None) for c in children(f)), default=0)


def quantifier_depth(f: Formula) -> int:
    """Nesting depth of quantifier blocks; a block is a run of same-kind quantifiers."""
    return _block_depth(f, None)


def _prefix(f: Formula) -> tuple[list[str], Formula]:
    kinds = []
    while isinstance(f, (Exists, Forall)):
        kinds.append("E" if isinstance(f, Exists) else "A")
        f = f.body
    return kinds, f


def _alternation(f: Formula) -> tuple[int, int] | None:
    """(e, a): least k with f in EQ^k resp. AQ^k, for boolean-prenexable f."""
    if not has_quantifier(f):
        return (0, 0)
    if isinstance(f, Not):
        r = _alternation(f.arg)
        return None if r is None else (r[1], r[0])
    if isinstance(f, (And, Or, Implies)):
        l, r = _alternation(f.left), _alternation(f.right)
        if l is None or r is None:
            return None
        if isinstance(f, Implies):
            l = (l[1], l[0])
        return (max(l[0], r[0]), max(l[1], r[1]))
    if isinstance(f, Iff):
        l, r = _alternation(f.left), _alternation(f.right)
        if l is None or r is None:
            return None
        m = max(l + r)
        return (m + 1, m + 1)
    if isinstance(f, Exists):
        r = _alternation(f.body)
        if r is None:
            return None
        e = max(1, min(r[0], r[1] + 1))
        return (e, e + 1)
    if isinstance(f, Forall):
        r = _alternation(f.body)
        if r is None:
            return None
        a = max(1, min(r[1], r[0] + 1))
        return (a + 1, a)
    return None  # quantifier under a temporal operator


def classify(f: Formula) -> FragmentDescriptor:
    body = "CTL" if is_qctl(f) else "CTL*"
    k = quantifier_depth(f)
    kinds, matrix = _prefix(f)
    prenex = not has_quantifier(matrix)
    if not kinds and prenex:
        pclass = "neither"
    elif prenex:
        blocks = 1 + sum(1 for a, b in zip(kinds, kinds[1:]) if a != b)
        pclass = f"{'EQ' if kinds[0] == 'E' else 'AQ'}{blocks}"
    else:
        alt = _alternation(f)
        if alt is None:
            pclass = "neither"
        else:
            e, a = alt
            pclass = f"EQ{e}" if e <= a else f"AQ{a}"
    overall = f"Q{k}" + ("*" if body == "CTL*" else "")
    return FragmentDescriptor(body, k, prenex, pclass, overall)


# ------------------------------------------------------------ substitution

def substitute(f: Formula, bindings: Mapping[str, Formula]) -> Formula:
    """Capture-avoiding replacement of free occurrences of propositions."""
    bound = bound_props(f)
    bad = sorted(set(bindings) & bound)
    if bad:
        raise QctlError(f"cannot substitute bound proposition(s): {', '.join(bad)}")
    repl_free: set[str] = set()
    for g in bindings.values():
        repl_free |= free_props(g)
    fresh = FreshNames(all_props(f) | repl_free | set(bindings))

    def go(g: Formula, env: Mapping[str, str]) -> Formula:
        if isinstance(g, Prop):
            if g.name in env:
                return Prop(env[g.name])
            return bindings.get(g.name, g)
        if isinstance(g, (Exists, Forall)):
            env2 = dict(env)
            names = []
            for p in g.props:
                q = fresh(p) if p in repl_free else p
                env2[p] = q
                names.append(q)
            return type(g)(tuple(names), go(g.body, env2))
        return rebuild(g, tuple(go(c, env) for c in children(g)))

    return go(f, {})


def rename_free(f: Formula, mapping: Mapping[str, str]) -> Formula:
    return substitute(f, {a: Prop(b) for a, b in mapping.items()})


def alpha_normal(f: Formula) -> Formula:
    """Rename binders canonically (in order of occurrence)."""
    counter = itertools.count()

    def go(g: Formula, env: Mapping[str, str]) -> Formula:
        if isinstance(g, Prop):
            return Prop(env.get(g.name, g.name))
        if isinstance(g, (Exists, Forall)):
            env2 = dict(env)
            names = []
            for p in g.props:
                q = f"#{next(counter)}"
                env2[p] = q
                names.append(q)
            return type(g)(tuple(names), go(g.body, env2))
        return rebuild(g, tuple(go(c, env) for c in children(g)))

    return go(f, {})


def alpha_equivalent(f: Formula, g: Formula) -> bool:
    return alpha_normal(f) == alpha_normal(g)


def decompose(f: Formula, prefix_hint: str = "q") -> tuple[Formula, dict[str, Formula]]:
    """Replace maximal quantified subformulas by fresh propositions."""
    fresh = FreshNames(all_props(f))
    table: dict[Formula, str] = {}
    plugs: dict[str, Formula] = {}

    def go(g: Formula) -> Formula:
        if isinstance(g, (Exists, Forall)):
            if g not in table:
                name = fresh(prefix_hint)
                table[g] = name
                plugs[name] = g
            return Prop(table[g])
        return rebuild(g, tuple(go(c) for c in children(g)))

    return go(f), plugs


# -------------------------------------------------------------------- NNF

def expand_derived(f: Formula) -> Formula:
    """Remove Implies/Iff and F/G (F = true U, G = W false); keeps Forall."""
    if isinstance(f, Implies):
        return Or(Not(expand_derived(f.left)), expand_derived(f.right))
    if isinstance(f, Iff):
        l, r = expand_derived(f.left), expand_derived(f.right)
        return And(Or(Not(l), r), Or(Not(r), l))
    if isinstance(f, Finally):
        return Until(TRUE, expand_derived(f.arg))
    if isinstance(f, Globally):
        return WeakUntil(expand_derived(f.arg), FALSE)
    return rebuild(f, tuple(expand_derived(c) for c in children(f)))


def negation_normal_form(f: Formula) -> Formula:
    """Push negations to atoms and quantified subformulas.

    Output uses Prop, true/false, And, Or, Not on atoms or on Exists,
    Exists, and E/A over X, U and W.  Forall is rewritten as !exists !.
    """
    require_qctl(f)
    return _nnf(f, False)


def _nnf(f: Formula, negated: bool) -> Formula:
    if isinstance(f, Prop):
        return Not(f) if negated else f
    if isinstance(f, TrueF):
        return FALSE if negated else TRUE
    if isinstance(f, FalseF):
        return TRUE if negated else FALSE
    if isinstance(f, Not):
        return _nnf(f.arg, not negated)
    if isinstance(f, And):
        op = Or if negated else And
        return op(_nnf(f.left, negated), _nnf(f.right, negated))
    if isinstance(f, Or):
        op = And if negated else Or
        return op(_nnf(f.left, negated), _nnf(f.right, negated))
    if isinstance(f, Implies):
        return _nnf(Or(Not(f.left), f.right), negated)
    if isinstance(f, Iff):
        if negated:
            return Or(And(_nnf(f.left, False), _nnf(f.right, True)),
                      And(_nnf(f.left, True), _nnf(f.right, False)))
        return And(Or(_nnf(f.left, True), _nnf(f.right, False)),
                   Or(_nnf(f.left, False), _nnf(f.right, True)))
    if isinstance(f, Exists):
        inner = Exists(f.props, _nnf(f.body, False))
        return Not(inner) if negated else inner
    if isinstance(f, Forall):
        inner = Exists(f.props, _nnf(f.body, True))
        return inner if negated else Not(inner)
    if isinstance(f, PathQuant):
        q = f.quant
        if negated:
            q = "A" if q == "E" else "E"
        p = f.path
        if isinstance(p, Next):
            return PathQuant(q, Next(_nnf(p.arg, negated)))
        if isinstance(p, Finally):
            p = Until(TRUE, p.arg)
        elif isinstance(p, Globally):
            p = WeakUntil(p.arg, FALSE)
        if isinstance(p, (Until, WeakUntil)):
            if not negated:
                return PathQuant(q, type(p)(_nnf(p.left, False), _nnf(p.right, False)))
            nl, nr = _nnf(p.left, True), _nnf(p.right, True)
            # not (a U b) == (not b) W (not b and not a), and dually
            op = WeakUntil if isinstance(p, Until) else Until
            return PathQuant(q, op(nr, _simplify_and(nr, nl)))
    raise FragmentError(f"not a QCTL state formula: {f!r}")


def _simplify_and(a: Formula, b: Formula) -> Formula:
    if isinstance(a, TrueF):
        return b
    if isinstance(b, TrueF):
        return a
    if isinstance(a, FalseF) or isinstance(b, FalseF):
        return FALSE
    return And(a, b)


def is_nnf(f: Formula) -> bool:
    if isinstance(f, (Prop, TrueF, FalseF)):
        return True
    if isinstance(f, Not):
        return isinstance(f.arg, Prop) or (isinstance(f.arg, Exists) and is_nnf(f.arg))
    if isinstance(f, (And, Or)):
        return is_nnf(f.left) and is_nnf(f.right)
    if isinstance(f, Exists):
        return is_nnf(f.body)
    if isinstance(f, PathQuant):
        p = f.path
        if isinstance(p, Next):
            return is_nnf(p.arg)
        if isinstance(p, (Until, WeakUntil)):
            return is_nnf(p.left) and is_nnf(p.right)
    return False
