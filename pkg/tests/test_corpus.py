import random

import pytest

from qctl import corpus as C
from qctl import logic_ast as L
from qctl.errors import QctlError
from qctl.kripke import KripkeStructure
from qctl.mc_structure import CheckOptions, check_structure
from qctl.mc_tree import check_tree


def test_uniq_with_renamed_proposition(s0):
    assert check_structure(s0, "q0", C.uniq("r"))
    assert not check_tree(s0, "q0", C.uniq("r"))


def test_counting_formulas(s0):
    assert check_structure(s0, "q0", C.EX1("r"))
    assert not check_structure(s0, "q0", C.EXgeq(2, "r"))
    assert check_structure(s0, "q0", C.EXgeq(1, "r"))


def test_grid1d_on_line_and_non_line(s0):
    assert check_structure(C.line(4), 0, C.grid1d())
    assert not check_structure(s0, "q0", C.grid1d())


def test_build_grid_shape():
    s, witness = C.build_grid(2, 2)
    assert len(s.states) == 4
    sink = s.index("g2_2")
    assert s.succ[sink] == (sink,)
    assert set(witness) == set(C.GRID_PROPS)


@pytest.mark.parametrize("m,n", [(2, 2), (2, 3)])
def test_grid2d_with_witness(m, n):
    s, witness = C.build_grid(m, n)
    opts = CheckOptions(witness_labels=witness, hints_only=True)
    assert check_structure(s, 0, C.grid2d(), opts)


def test_grid_sink_conjunct_under_witness():
    s, witness = C.build_grid(2, 3)
    S = L.Prop("s")
    sink = L.conj(C.uniq("s"), L.AG(L.Implies(S, L.AG(S))), L.AF(S))
    labelled = s.with_labels([set(s.labels[i]) | {p for p, xs in witness.items() if s.states[i] in xs}
                              for i in range(len(s.states))])
    assert check_structure(labelled, 0, sink)


def test_yardstick_fragments():
    assert L.classify(C.yardstick_0(3)).quantifier_depth == 0
    assert L.classify(C.yardstick_k(1, 2)).prefix_class == "EQ1"
    assert L.classify(C.yardstick_k(2, 2)).prefix_class == "EQ2"


def test_yardstick_zero_on_a_line():
    s = KripkeStructure.build(
        ["a", "b", "c", "d", "e"], [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "e")],
        {"a": ["s"], "d": ["t"]}, "a")
    assert check_structure(s, "a", C.yardstick_0(3))
    assert not check_structure(s, "a", C.yardstick_0(2))


def test_qbf_single_variable():
    inst = C.QbfInstance((("x",),), (("x",),), "cnf")
    s, f = C.qbf_to_mc(inst)
    assert check_structure(s, 0, f)
    inst = C.QbfInstance((("x",),), (("x",), ("-x",)), "cnf")
    s, f = C.qbf_to_mc(inst)
    assert not check_structure(s, 0, f)


def test_qbf_random_agrees():
    rng = random.Random(21)
    for k in (1, 2):
        for _ in range(10):
            inst = C.random_qbf(rng, k)
            s, f = C.qbf_to_mc(inst)
            assert check_structure(s, 0, f, CheckOptions(enumeration_cap=40)) == C.brute_qbf(inst)


def test_sample_circuit():
    c = C.sample_circuit()
    assert C.evaluate_circuit(c)
    s, f = C.circuit_to_mc(c)
    assert check_structure(s, c.root, f)


def test_single_gate_circuit():
    c = C.Circuit({"A": ("1",)}, "A")
    s, f = C.circuit_to_mc(c)
    assert check_structure(s, "A", f)


def test_random_circuits_agree():
    rng = random.Random(22)
    for _ in range(50):
        c = C.random_circuit(rng, rng.randint(1, 10))
        s, f = C.circuit_to_mc(c)
        assert check_structure(s, c.root, f) == C.evaluate_circuit(c)


def test_named_formula_lookup():
    assert C.named_formula("uniq", "p") == C.uniq("p")
    assert C.named_formula("yardstick_0", "2") == C.yardstick_0(2)
    with pytest.raises(QctlError):
        C.named_formula("no_such_formula")
