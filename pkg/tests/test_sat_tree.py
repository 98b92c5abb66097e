import random

import pytest

import randgen
from qctl import corpus as C
from qctl import logic_ast as L
from qctl.errors import UndecidableError
from qctl.kripke import P_INT, KripkeStructure, RegularTree, binary_encode
from qctl.logic_ast import parse_formula
from qctl.mc_structure import sat_set
from qctl.mc_tree import check_tree
from qctl.sat_tree import collapse_internal, emptiness, minimize_witness, sat, sat_structure
from qctl.tree_automata import accept_all, accepts, ctl_to_apta, dual, simulate

P = parse_formula


def test_contradiction_unsat():
    res = sat(P("p & A G !p"))
    assert not res
    assert res.witness is None


def test_selfloop_unsat():
    assert not sat(C.selfloop())


def test_acyclic_sat_with_verified_witness():
    res = sat(C.acyclic())
    assert res
    assert check_tree(res.witness, res.root, C.acyclic())


def test_uniq_sat():
    res = sat(C.uniq("p"))
    assert res
    assert check_tree(res.witness, res.root, C.uniq("p"))
    assert res.stats["witnessStates"] == len(res.witness.states)


def test_outer_existential_block_is_stripped():
    res = sat(P("exists z. (z & A X A G !z)"))
    assert res and res.stats["stripped"] == ["z"]


def test_branching_is_recovered():
    f = P("E X p & E X !p & A X A X false | E X p & E X !p")
    res = sat(f)
    assert res and check_tree(res.witness, res.root, f)
    assert res.witness.degree(res.root) >= 2


def test_three_distinct_successors():
    f = C.EXgeq(3, "p")
    res = sat(f)
    assert res and check_tree(res.witness, res.root, f)


def test_yardstick_witness_distance():
    f = L.conj(C.delimiters(), C.yardstick_0(3))
    res = sat(f)
    assert res
    tree = RegularTree(res.witness, res.root)
    for u in tree.nodes(3):
        if "s" in tree.label(u):
            for v in tree.nodes(len(u) + 3):
                if v[:len(u)] == u and len(v) > len(u):
                    assert ("t" in tree.label(v)) == (len(v) - len(u) == 3)


def test_structure_semantics_is_undecidable():
    with pytest.raises(UndecidableError):
        sat_structure(C.acyclic())


def test_emptiness_of_trivial_automata():
    assert not emptiness(simulate(accept_all({1, 2}))).empty
    assert emptiness(simulate(dual(accept_all({1, 2})))).empty


def test_emptiness_witness_is_accepted():
    n = simulate(ctl_to_apta(L.negation_normal_form(P("E G p & A F q")), {1, 2}, {"p", "q"}))
    res = emptiness(n)
    assert not res.empty
    assert accepts(n, res.tree.structure, res.tree.root)


def test_emptiness_one_sided_against_small_models():
    rng = random.Random(61)
    found = 0
    for _ in range(30):
        f = L.negation_normal_form(randgen.ctl(rng, rng.randint(1, 3), atoms=("p", "q")))
        n = simulate(ctl_to_apta(f, {1, 2}, {"p", "q"}))
        res = emptiness(n)
        for _ in range(40):
            s = randgen.structure(rng, rng.randint(1, 3), atoms=("p", "q"))
            if s.degrees() <= {1, 2} and sat_set(s, f):
                found += 1
                assert not res.empty
                break
        if not res.empty:
            assert accepts(n, res.tree.structure, res.tree.root)
    assert found


def test_collapse_internal_restores_branching(s0):
    b, _ = binary_encode(s0)
    c = collapse_internal(b, b.index("q0"))
    assert all(P_INT not in lab for lab in c.labels)
    assert c.degree(0) == 2
    m, root = minimize_witness(c, 0)
    assert len(m.states) == 2
    assert check_tree(m, root, C.EX1("r")) and check_tree(s0, 0, C.EX1("r"))


def test_minimize_keeps_repeated_children():
    s = KripkeStructure.build(["a", "b", "c"], [("a", "b"), ("a", "c"), ("b", "b"), ("c", "c")], {}, "a")
    m, root = minimize_witness(s, 0)
    assert m.degree(root) == 2
