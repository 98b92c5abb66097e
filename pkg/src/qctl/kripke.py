"""Finite Kripke structures with ordered successors and their unwindings."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import EnumerationBudgetError, StructureError

P_INT = "p_int"
DEFAULT_ENUMERATION_CAP = 24  # max |states| * |P| bits enumerated


@dataclass(frozen=True)
class KripkeStructure:
    """States in declaration order; ``succ[i]`` is sorted by that order."""

    states: tuple[str, ...]
    succ: tuple[tuple[int, ...], ...]
    labels: tuple[frozenset[str], ...]
    initial: int | None = None

    def __post_init__(self):
        n = len(self.states)
        if n == 0:
            raise StructureError("structure has no states")
        if len(set(self.states)) != n:
            raise StructureError("duplicate state name")
        if len(self.succ) != n or len(self.labels) != n:
            raise StructureError("inconsistent structure arrays")
        for i, out in enumerate(self.succ):
            if not out:
                raise StructureError(f"relation not total: state {self.states[i]!r} has no successor")
            if list(out) != sorted(set(out)) or out[0] < 0 or out[-1] >= n:
                raise StructureError("successor lists must be sorted, duplicate-free and in range")

    @classmethod
    def build(cls, states: Sequence[str], edges: Iterable[tuple[str, str]],
              labels: Mapping[str, Iterable[str]] | None = None,
              initial: str | None = None) -> "KripkeStructure":
        index = {}
        for s in states:
            if s in index:
                raise StructureError(f"duplicate state {s!r}")
            index[s] = len(index)
        out: list[set[int]] = [set() for _ in states]
        for a, b in edges:
            if a not in index or b not in index:
                raise StructureError(f"unknown state in edge {a} -> {b}")
            out[index[a]].add(index[b])
        labels = labels or {}
        for s in labels:
            if s not in index:
                raise StructureError(f"unknown state {s!r} in labelling")
        lab = tuple(frozenset(labels.get(s, ())) for s in states)
        init = None
        if initial is not None:
            if initial not in index:
                raise StructureError(f"unknown initial state {initial!r}")
            init = index[initial]
        for i, o in enumerate(out):
            if not o:
                raise StructureError(f"relation not total: state {states[i]!r} has no successor")
        return cls(tuple(states), tuple(tuple(sorted(o)) for o in out), lab, init)

    # --- accessors
    def __len__(self) -> int:
        return len(self.states)

    def index(self, name: str | int) -> int:
        if isinstance(name, int):
            if not 0 <= name < len(self.states):
                raise StructureError(f"state index {name} out of range")
            return name
        try:
            return self.states.index(name)
        except ValueError:
            raise StructureError(f"unknown state {name!r}") from None

    def degree(self, q: int) -> int:
        return len(self.succ[q])

    def successor(self, q: int, i: int) -> int:
        return self.succ[q][i]

    def successor_word(self, q: int, word: Sequence[int]) -> int:
        """Succ(q, w): follow the directions of ``w`` from ``q``."""
        for c in word:
            if not 0 <= c < len(self.succ[q]):
                raise StructureError(f"direction {c} undefined at state {self.states[q]!r}")
            q = self.succ[q][c]
        return q

    def props(self) -> frozenset[str]:
        out: set[str] = set()
        for lab in self.labels:
            out |= lab
        return frozenset(out)

    def edges(self) -> Iterator[tuple[int, int]]:
        for q, out in enumerate(self.succ):
            for r in out:
                yield q, r

    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        pre: list[list[int]] = [[] for _ in self.states]
        for q, r in self.edges():
            pre[r].append(q)
        return tuple(tuple(p) for p in pre)

    def reachable(self, q: int) -> list[int]:
        """States reachable from ``q`` in breadth-first order."""
        seen = {q}
        order = [q]
        for s in order:
            for r in self.succ[s]:
                if r not in seen:
                    seen.add(r)
                    order.append(r)
        return order

    def degrees(self, q: int | None = None) -> frozenset[int]:
        """Degree set over the part reachable from ``q`` (whole structure if None)."""
        states = range(len(self.states)) if q is None else self.reachable(q)
        return frozenset(len(self.succ[s]) for s in states)

    def with_labels(self, labels: Sequence[Iterable[str]]) -> "KripkeStructure":
        return KripkeStructure(self.states, self.succ, tuple(frozenset(l) for l in labels), self.initial)


# ------------------------------------------------------------- file format

_LINE_STATE = re.compile(r"^state\s+(\S+)\s*(?:\{([^}]*)\})?\s*$")


def parse_structure(text: str) -> KripkeStructure:
    states: list[str] = []
    labels: dict[str, list[str]] = {}
    edges: list[tuple[str, str]] = []
    initial = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE_STATE.match(line)
        if m:
            name = m.group(1)
            if name in labels:
                raise StructureError(f"line {lineno}: duplicate state {name!r}")
            states.append(name)
            labels[name] = (m.group(2) or "").split()
            continue
        parts = line.split()
        if parts[0] == "edge" and len(parts) == 3:
            edges.append((parts[1], parts[2]))
        elif parts[0] == "init" and len(parts) == 2:
            initial = parts[1]
        else:
            raise StructureError(f"line {lineno}: cannot parse {raw.strip()!r}")
    for a, b in edges:
        for s in (a, b):
            if s not in labels:
                raise StructureError(f"unknown state {s!r} in edge {a} -> {b}")
    return KripkeStructure.build(states, edges, labels, initial)


def print_structure(s: KripkeStructure) -> str:
    lines = []
    for name, lab in zip(s.states, s.labels):
        lines.append(f"state {name} {{ {' '.join(sorted(lab))} }}".replace("{  }", "{ }"))
    for q, r in s.edges():
        lines.append(f"edge {s.states[q]} {s.states[r]}")
    if s.initial is not None:
        lines.append(f"init {s.states[s.initial]}")
    return "\n".join(lines) + "\n"


def structure_to_dot(s: KripkeStructure, name: str = "S") -> str:
    out = [f"digraph {name} {{"]
    for i, (st, lab) in enumerate(zip(s.states, s.labels)):
        shape = "doublecircle" if s.initial == i else "circle"
        text = st + ("\\n" + ",".join(sorted(lab)) if lab else "")
        out.append(f'  n{i} [label="{text}", shape={shape}];')
    for q, r in s.edges():
        out.append(f"  n{q} -> n{r};")
    out.append("}")
    return "\n".join(out) + "\n"


# ------------------------------------------------------------- operations

def p_equivalent(s1: KripkeStructure, s2: KripkeStructure, P: Iterable[str]) -> bool:
    """Same graph and labellings agreeing on ``P``."""
    if s1.states != s2.states or s1.succ != s2.succ:
        return False
    P = frozenset(P)
    return all(a & P == b & P for a, b in zip(s1.labels, s2.labels))


def relabel_variants(s: KripkeStructure, P: Iterable[str],
                     cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[KripkeStructure]:
    """All structures differing from ``s`` only on ``P``.

    Bit ``i * |P| + j`` of the counter decides whether state ``i`` carries
    the ``j``-th proposition of ``P`` (sorted).
    """
    P = sorted(set(P))
    n = len(s.states)
    bits = n * len(P)
    if bits > cap:
        raise EnumerationBudgetError(f"{bits} labelling bits exceed the enumeration cap {cap}")
    base = [lab - frozenset(P) for lab in s.labels]
    for counter in range(1 << bits):
        labels = []
        for i in range(n):
            extra = [P[j] for j in range(len(P)) if counter >> (i * len(P) + j) & 1]
            labels.append(base[i] | frozenset(extra))
        yield s.with_labels(labels)


def reachable_part(s: KripkeStructure, q: int | str) -> KripkeStructure:
    q = s.index(q)
    keep = sorted(s.reachable(q))
    pos = {old: new for new, old in enumerate(keep)}
    return KripkeStructure(
        tuple(s.states[i] for i in keep),
        tuple(tuple(pos[r] for r in s.succ[i]) for i in keep),
        tuple(s.labels[i] for i in keep),
        pos[q],
    )


def binary_encode(s: KripkeStructure, p_int: str = P_INT) -> tuple[KripkeStructure, dict[str, str]]:
    """Replace branching by binary trees of internal ``p_int`` states.

    Returns the encoded structure and a map from each internal state to
    the original state whose successors it distributes.
    """
    if p_int in s.props():
        raise StructureError(f"structure already uses {p_int!r}")
    names = list(s.states)
    labels = list(s.labels)
    edges: list[tuple[str, str]] = []
    owner: dict[str, str] = {}
    taken = set(names)

    def new_internal(q: str) -> str:
        k = 0
        while f"{q}_int{k}" in taken:
            k += 1
        name = f"{q}_int{k}"
        taken.add(name)
        names.append(name)
        labels.append(frozenset((p_int,)))
        owner[name] = q
        return name

    def build(parent: str, leaves: list[str], q: str) -> None:
        # parent distributes to leaves; left half gets the extra leaf
        if len(leaves) == 1:
            edges.append((parent, leaves[0]))
            return
        mid = (len(leaves) + 1) // 2
        for part in (leaves[:mid], leaves[mid:]):
            if len(part) == 1:
                edges.append((parent, part[0]))
            else:
                node = new_internal(q)
                edges.append((parent, node))
                build(node, part, q)

    for i, q in enumerate(s.states):
        leaves = [s.states[r] for r in s.succ[i]]
        if len(leaves) == 1:
            for r in leaves:
                edges.append((q, r))
        else:
            node = new_internal(q)
            edges.append((q, node))
            build(node, leaves, q)
    init = s.states[s.initial] if s.initial is not None else None
    return KripkeStructure.build(names, edges, dict(zip(names, labels)), init), owner


@dataclass(frozen=True)
class RegularTree:
    """The unwinding of ``structure`` from ``root``."""

    structure: KripkeStructure
    root: int

    def state(self, word: Sequence[int]) -> int:
        return self.structure.successor_word(self.root, word)

    def label(self, word: Sequence[int]) -> frozenset[str]:
        return self.structure.labels[self.state(word)]

    def children(self, word: Sequence[int]) -> list[tuple[int, ...]]:
        q = self.state(word)
        return [tuple(word) + (c,) for c in range(self.structure.degree(q))]

    def nodes(self, depth: int) -> Iterator[tuple[int, ...]]:
        """All nodes of length at most ``depth``, breadth first."""
        layer: list[tuple[int, ...]] = [()]
        for _ in range(depth + 1):
            nxt = []
            for w in layer:
                yield w
                nxt.extend(self.children(w))
            layer = nxt
