"""Formula translations: prenex normal form, until flattening, least
fixpoints, the binary-branching transform and MSO to QCTL."""

from __future__ import annotations

from . import logic_ast as L
from .corpus import uniq
from .errors import FragmentError, QctlError, StructureError
from .kripke import P_INT
from .logic_ast import AG, EG, EU, EX, And, Iff, Implies, Not, Or, Prop
from .mso import (MAnd, MEdge, MEq, MExists, MForall, MIn, MLab, MNot, MOr, MTrue, MsoFormula,
                  is_set_var, mso_free_vars)


# ----------------------------------------------------------- flatten / lfp

def flatten_until(phi1: L.Formula, phi2: L.Formula, names: tuple[str, str] | None = None) -> L.Formula:
    """E phi1 U phi2 with the arguments moved under AG via two markers."""
    if names is None:
        fresh = L.FreshNames(L.all_props(phi1) | L.all_props(phi2))
        names = (fresh("z1"), fresh("z2"))
    z1, z2 = Prop(names[0]), Prop(names[1])
    return L.tidy_names(L.exists(names, And(EU(z1, z2), AG(And(Implies(z1, phi1), Implies(z2, phi2))))))


def _polarity_ok(f: L.Formula, hole: str, positive: bool = True) -> bool:
    if isinstance(f, Prop):
        return positive or f.name != hole
    if isinstance(f, Not):
        return _polarity_ok(f.arg, hole, not positive)
    if isinstance(f, Implies):
        return _polarity_ok(f.left, hole, not positive) and _polarity_ok(f.right, hole, positive)
    if isinstance(f, Iff):
        return hole not in L.free_props(f)
    if isinstance(f, (L.Exists, L.Forall)) and hole in f.props:
        return True
    return all(_polarity_ok(c, hole, positive) for c in L.children(f))


def lfp_encode(body: L.Formula, hole: str = "T", at_state: bool = True) -> L.Formula:
    """Least fixpoint of ``hole -> body`` expressed with quantifiers.

    The result states that some fixpoint is below every fixpoint; with
    ``at_state`` it also requires the current state to be in it, which
    makes the formula equivalent to the fixpoint itself.
    """
    if not _polarity_ok(body, hole):
        raise FragmentError(f"{hole} occurs negatively in the fixpoint body")
    fresh = L.FreshNames(L.all_props(body) - {hole})
    t = hole if hole not in L.bound_props(body) else fresh("T")
    u = fresh("U")
    phi_t = L.substitute(body, {hole: Prop(t)}) if t != hole else body
    phi_u = L.substitute(body, {hole: Prop(u)})
    T, U = Prop(t), Prop(u)
    least = And(AG(Iff(T, phi_t)), L.forall(u, Implies(AG(Iff(U, phi_u)), AG(Implies(T, U)))))
    if at_state:
        least = And(T, least)
    return L.tidy_names(L.exists(t, least))


# ------------------------------------------------------------------ prenex

def is_prenex(f: L.Formula) -> bool:
    while isinstance(f, (L.Exists, L.Forall)):
        f = f.body
    return not L.has_quantifier(f)


def _expand_quantified(f: L.Formula) -> L.Formula:
    """Remove Implies/Iff above quantifiers and give every binder its own name."""
    def go(g: L.Formula) -> L.Formula:
        if not L.has_quantifier(g):
            return g
        if isinstance(g, Implies):
            return Or(Not(go(g.left)), go(g.right))
        if isinstance(g, Iff):
            a, b = go(g.left), go(g.right)
            return And(Or(Not(a), b), Or(Not(b), a))
        return L.rebuild(g, tuple(go(c) for c in L.children(g)))

    return L.standardize_apart(go(f))


class _Prenexer:
    def __init__(self, f: L.Formula):
        self.fresh = L.FreshNames(L.all_props(f))

    def run(self, g: L.Formula) -> tuple[list[tuple[str, tuple[str, ...]]], L.Formula]:
        """Return (prefix, matrix); prefix entries are ("E"|"A", props)."""
        if not L.has_quantifier(g):
            return [], g
        if isinstance(g, Not):
            pre, m = self.run(g.arg)
            return [("A" if k == "E" else "E", ps) for k, ps in pre], Not(m)
        if isinstance(g, (And, Or)):
            p1, m1 = self.run(g.left)
            p2, m2 = self.run(g.right)
            return p1 + p2, type(g)(m1, m2)
        if isinstance(g, Implies):
            return self.run(Or(Not(g.left), g.right))
        if isinstance(g, Iff):
            return self.run(_expand_quantified(g))
        if isinstance(g, (L.Exists, L.Forall)):
            # rename so that copies of a subformula never share binders
            new = tuple(self.fresh(p.lstrip("_").split("_")[-1] or "p") for p in g.props)
            body = L.substitute(g.body, {p: Prop(n) for p, n in zip(g.props, new)})
            pre, m = self.run(body)
            return [("E" if isinstance(g, L.Exists) else "A", new)] + pre, m
        if isinstance(g, L.PathQuant):
            return self.temporal(g)
        raise FragmentError(f"cannot prenex {g!r}")

    def temporal(self, g: L.PathQuant):
        p = g.path
        if isinstance(p, L.Next):
            if g.quant == "A":
                return self.run(Not(EX(Not(p.arg))))
            pre, m = self.run(p.arg)
            z = self.fresh("z")
            zp = self.fresh("z")
            rest_pre, rest = self.run(And(uniq(Prop(z), zp), EX(And(Prop(z), m))))
            return [("E", (z,))] + pre + rest_pre, rest
        if isinstance(p, L.Finally):
            return self.temporal(L.PathQuant(g.quant, L.Until(L.TRUE, p.arg)))
        if isinstance(p, L.Globally):
            if g.quant == "A":
                pre, m = self.run(p.arg)
                y = self.fresh("y")
                yp = self.fresh("y")
                rest_pre, rest = self.run(Implies(uniq(Prop(y), yp), AG(Implies(Prop(y), m))))
                return [("A", (y,))] + pre + rest_pre, rest
            z = self.fresh("z")
            Z = Prop(z)
            return self.run(L.exists(z, And(EG(Z), AG(Implies(Z, p.arg)))))
        if isinstance(p, (L.Until, L.WeakUntil)):
            # the path operator is monotone, so quantified arguments can be
            # replaced by markers that imply them
            if g.quant == "E" and isinstance(p, L.Until) and all(map(L.has_quantifier, (p.left, p.right))):
                return self.run(flatten_until(p.left, p.right, (self.fresh("z1"), self.fresh("z2"))))
            args, names, side = [], [], []
            for k, arg in enumerate((p.left, p.right), 1):
                if L.has_quantifier(arg):
                    z = self.fresh(f"z{k}")
                    names.append(z)
                    side.append(Implies(Prop(z), arg))
                    arg = Prop(z)
                args.append(arg)
            flat = L.PathQuant(g.quant, type(p)(*args))
            return self.run(L.exists(tuple(names), And(flat, AG(L.conj(*side)))))
        raise FragmentError("CTL* path formula")


def prenex(f: L.Formula) -> L.Formula:
    """Equivalent formula with all quantifiers in a single outer prefix."""
    L.require_qctl(f)
    if not L.has_quantifier(f):
        return f
    g = _expand_quantified(f)
    pre, m = _Prenexer(g).run(g)
    merged: list[tuple[str, list[str]]] = []
    for kind, props in pre:
        if merged and merged[-1][0] == kind:
            merged[-1][1].extend(props)
        else:
            merged.append((kind, list(props)))
    out = m
    for kind, props in reversed(merged):
        out = (L.Exists if kind == "E" else L.Forall)(tuple(props), out)
    return L.tidy_names(out)


# --------------------------------------------------------------- hat

def hat_transform(f: L.Formula, p_int: str = P_INT) -> L.Formula:
    """Rewrite ``f`` for structures whose branching goes through internal
    ``p_int`` states (see :func:`qctl.kripke.binary_encode`)."""
    L.require_qctl(f)
    if p_int in L.all_props(f):
        raise StructureError(f"formula already uses {p_int!r}")
    I = Prop(p_int)
    return _hat(L.expand_derived(f), I)


def _hat(f: L.Formula, I: Prop) -> L.Formula:
    if isinstance(f, (Prop, L.TrueF, L.FalseF)):
        return f
    if isinstance(f, Not):
        return Not(_hat(f.arg, I))
    if isinstance(f, (And, Or)):
        return type(f)(_hat(f.left, I), _hat(f.right, I))
    if isinstance(f, (L.Exists, L.Forall)):
        return type(f)(f.props, _hat(f.body, I))
    if isinstance(f, L.PathQuant):
        p = f.path
        if isinstance(p, L.Next):
            inner = EU(I, And(Not(I), _hat(p.arg, I)))
            if f.quant == "E":
                return EX(inner)
            return Not(EX(EU(I, And(Not(I), Not(_hat(p.arg, I))))))
        if isinstance(p, (L.Until, L.WeakUntil)):
            return L.PathQuant(f.quant, type(p)(Or(I, _hat(p.left, I)), And(Not(I), _hat(p.right, I))))
    raise FragmentError(f"cannot transform {f!r}")


# ---------------------------------------------------------------- MSO

def mso_to_qctl(phi: MsoFormula, semantics: str = "structure") -> L.Formula:
    """QCTL formula equivalent to the MSO formula ``phi(x)`` at the root."""
    if semantics not in ("structure", "tree"):
        raise QctlError("semantics must be 'structure' or 'tree'")
    free = mso_free_vars(phi) - {"x"}
    if free:
        raise QctlError(f"free variable(s) other than x: {', '.join(sorted(free))}")
    names: dict[str, str] = {}
    used: set[str] = set()

    def pa(var: str) -> Prop:
        if var not in names:
            base = f"pa_{var}"
            name, k = base, 1
            while name in used:
                k += 1
                name = f"{base}_{k}"
            used.add(name)
            names[var] = name
        return Prop(names[var])

    def bind(var: str) -> str:
        names.pop(var, None)
        return pa(var).name

    def go(f: MsoFormula) -> L.Formula:
        if isinstance(f, MTrue):
            return L.TRUE
        if isinstance(f, MNot):
            return Not(go(f.arg))
        if isinstance(f, MAnd):
            return And(go(f.left), go(f.right))
        if isinstance(f, MOr):
            return Or(go(f.left), go(f.right))
        if isinstance(f, MLab):
            a = Prop(f.prop)
            return a if f.var == "x" else L.EF(And(pa(f.var), a))
        if isinstance(f, MEq):
            l, r = f.left, f.right
            if l == r:
                return L.TRUE
            if l == "x":
                return pa(r)
            if r == "x":
                return pa(l)
            return L.EF(And(pa(l), pa(r)))
        if isinstance(f, MIn):
            if f.elem == "x":
                return pa(f.set)
            return L.EF(And(pa(f.elem), pa(f.set)))
        if isinstance(f, MEdge):
            a, b = f.src, f.dst
            if a == "x" and b != "x":
                return EX(pa(b))
            if b == "x":
                if semantics == "tree":
                    return L.FALSE
                return L.EF(And(pa(a), EX(pa("x")))) if a != "x" else EX(pa("x"))
            return L.EF(And(pa(a), EX(pa(b))))
        if isinstance(f, (MExists, MForall)):
            if f.var == "x":
                raise QctlError("the distinguished variable x cannot be requantified")
            saved = names.get(f.var)
            name = bind(f.var)
            body = go(f.body)
            if saved is not None:
                names[f.var] = saved
            else:
                names.pop(f.var, None)
            if is_set_var(f.var):
                return (L.Exists if isinstance(f, MExists) else L.Forall)((name,), body)
            if isinstance(f, MExists):
                return L.exists(name, And(uniq(Prop(name)), body))
            return L.forall(name, Implies(uniq(Prop(name)), body))
        raise TypeError(f)

    used.add("pa_x")
    names["x"] = "pa_x"
    body = go(phi)
    if semantics == "tree" or "pa_x" not in L.free_props(body):
        return body
    px = Prop("pa_x")
    return L.exists("pa_x", L.conj(px, uniq(px), body))
