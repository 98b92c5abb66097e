"""Monadic second-order formulas over graphs: AST, parser, printer."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import FormulaSyntaxError


class MsoFormula:
    __slots__ = ()

    def __str__(self) -> str:
        return print_mso(self)


@dataclass(frozen=True)
class MTrue(MsoFormula):
    pass


@dataclass(frozen=True)
class MEdge(MsoFormula):
    src: str
    dst: str


@dataclass(frozen=True)
class MEq(MsoFormula):
    left: str
    right: str


@dataclass(frozen=True)
class MIn(MsoFormula):
    elem: str
    set: str


@dataclass(frozen=True)
class MLab(MsoFormula):
    prop: str
    var: str


@dataclass(frozen=True)
class MNot(MsoFormula):
    arg: MsoFormula


@dataclass(frozen=True)
class MAnd(MsoFormula):
    left: MsoFormula
    right: MsoFormula


@dataclass(frozen=True)
class MOr(MsoFormula):
    left: MsoFormula
    right: MsoFormula


@dataclass(frozen=True)
class MExists(MsoFormula):
    var: str
    body: MsoFormula


@dataclass(frozen=True)
class MForall(MsoFormula):
    var: str
    body: MsoFormula


def is_set_var(name: str) -> bool:
    return name[:1].isupper()


def mso_children(f: MsoFormula) -> tuple[MsoFormula, ...]:
    if isinstance(f, MNot):
        return (f.arg,)
    if isinstance(f, (MAnd, MOr)):
        return (f.left, f.right)
    if isinstance(f, (MExists, MForall)):
        return (f.body,)
    return ()


def mso_free_vars(f: MsoFormula) -> frozenset[str]:
    if isinstance(f, MEdge):
        return frozenset((f.src, f.dst))
    if isinstance(f, MEq):
        return frozenset((f.left, f.right))
    if isinstance(f, MIn):
        return frozenset((f.elem, f.set))
    if isinstance(f, MLab):
        return frozenset((f.var,))
    if isinstance(f, (MExists, MForall)):
        return mso_free_vars(f.body) - {f.var}
    out: frozenset[str] = frozenset()
    for c in mso_children(f):
        out |= mso_free_vars(c)
    return out


def mso_set_vars(f: MsoFormula) -> frozenset[str]:
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (MExists, MForall)) and is_set_var(g.var):
            out.add(g.var)
        if isinstance(g, MIn):
            out.add(g.set)
        stack.extend(mso_children(g))
    return frozenset(out)


_TOK = re.compile(r"\s*(?:(#[^\n]*)|(->|[!&|().,=])|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def parse_mso(text: str) -> MsoFormula:
    """Grammar: ``E v. f`` / ``A v. f`` (also ``exists``/``forall``),
    ``!``, ``&``, ``|``, ``->``, atoms ``edg(x,y)``, ``x = y``, ``x in X``,
    ``lab(a, x)``, ``true``, ``false``.  Capitalised variables are sets."""
    toks: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TOK.match(text, pos)
        if m is None:
            break
        if m.group(2):
            toks.append(("sym", m.group(2), m.start(2)))
        elif m.group(3):
            toks.append(("id", m.group(3), m.start(3)))
        elif m.group(4):
            raise FormulaSyntaxError(f"unexpected character {m.group(4)!r}", m.start(4))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    i = 0

    def peek(k=0):
        return toks[min(i + k, len(toks) - 1)]

    def err(msg):
        t = peek()
        return FormulaSyntaxError(f"{msg}, found {t[1] or 'end of input'!r}", t[2])

    def eat(s):
        nonlocal i
        if peek()[1] == s and peek()[0] != "eof":
            i += 1
            return True
        return False

    def expect(s):
        if not eat(s):
            raise err(f"expected {s!r}")

    def ident():
        nonlocal i
        t = peek()
        if t[0] != "id":
            raise err("expected an identifier")
        i += 1
        return t[1]

    def formula():
        nonlocal i
        t = peek()
        if t[0] == "id" and t[1] in ("E", "A", "exists", "forall") and peek(1)[0] == "id":
            i += 1
            var = ident()
            expect(".")
            body = formula()
            return (MExists if t[1] in ("E", "exists") else MForall)(var, body)
        return imp()

    def imp():
        f = disj()
        if eat("->"):
            return MOr(MNot(f), formula())
        return f

    def disj():
        f = conj()
        while eat("|"):
            f = MOr(f, conj())
        return f

    def conj():
        f = unary()
        while eat("&"):
            f = MAnd(f, unary())
        return f

    def unary():
        t = peek()
        if eat("!"):
            return MNot(unary())
        if t[0] == "id" and t[1] in ("E", "A", "exists", "forall") and peek(1)[0] == "id":
            return formula()
        if eat("("):
            f = formula()
            expect(")")
            return f
        if eat("true"):
            return MTrue()
        if eat("false"):
            return MNot(MTrue())
        if t[0] == "id" and t[1] in ("edg", "lab") and peek(1)[1] == "(":
            name = ident()
            expect("(")
            a = ident()
            expect(",")
            b = ident()
            expect(")")
            return MEdge(a, b) if name == "edg" else MLab(a, b)
        if t[0] == "id":
            a = ident()
            if eat("="):
                return MEq(a, ident())
            if eat("in"):
                return MIn(a, ident())
            raise err("expected '=' or 'in'")
        raise err("expected an MSO formula")

    f = formula()
    if peek()[0] != "eof":
        raise err("unexpected trailing input")
    return f


def print_mso(f: MsoFormula) -> str:
    return _pm(f, 0)


def _pm(f: MsoFormula, level: int) -> str:
    if isinstance(f, MTrue):
        return "true"
    if isinstance(f, MEdge):
        return f"edg({f.src}, {f.dst})"
    if isinstance(f, MEq):
        return f"{f.left} = {f.right}"
    if isinstance(f, MIn):
        return f"{f.elem} in {f.set}"
    if isinstance(f, MLab):
        return f"lab({f.prop}, {f.var})"
    if isinstance(f, MNot):
        return "!" + _pm(f.arg, 3)
    if isinstance(f, MAnd):
        s = f"{_pm(f.left, 2)} & {_pm(f.right, 3)}"
        return f"({s})" if level > 2 else s
    if isinstance(f, MOr):
        s = f"{_pm(f.left, 1)} | {_pm(f.right, 2)}"
        return f"({s})" if level > 1 else s
    if isinstance(f, (MExists, MForall)):
        q = "E" if isinstance(f, MExists) else "A"
        s = f"{q} {f.var}. {_pm(f.body, 0)}"
        return f"({s})" if level > 0 else s
    raise TypeError(f)
