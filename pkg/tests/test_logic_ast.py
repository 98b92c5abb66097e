import random

import pytest

import randgen
from qctl import logic_ast as L
from qctl.errors import FormulaSyntaxError, QctlError
from qctl.logic_ast import (And, Exists, Not, Or, PathQuant, Prop, Until, classify, decompose,
                            negation_normal_form, parse_formula, print_formula, size_and_dag_size,
                            substitute)

P = parse_formula


def test_parse_quantified_disjunction():
    f = P("exists z. (!z | E X z)")
    assert f == Exists(("z",), Or(Not(Prop("z")), L.EX(Prop("z"))))


def test_parse_constants():
    assert P("true") == L.TRUE
    assert P("false") == L.FALSE


def test_parse_quantifier_inside_until():
    assert P("E [p U exists q. q]") == PathQuant("E", Until(Prop("p"), Exists(("q",), Prop("q"))))


@pytest.mark.parametrize("text", ["p &", "E [p U", "exists . p", "p q", "E p", "(p"])
def test_parse_errors(text):
    with pytest.raises(FormulaSyntaxError):
        P(text)


def test_syntax_error_reports_position():
    with pytest.raises(FormulaSyntaxError) as exc:
        P("p & & q")
    assert "4" in str(exc.value) or "col" in str(exc.value)


@pytest.mark.filterwarnings("ignore:proposition")
def test_print_parse_roundtrip_random():
    rng = random.Random(1)
    for _ in range(300):
        f = randgen.qctl(rng, rng.randint(0, 5), 3)
        # repeated binders are renamed on parsing
        assert L.alpha_equivalent(P(print_formula(f)), f)


def test_repeated_binder_warns():
    with pytest.warns(UserWarning, match="quantified more than once"):
        f = P("exists p. (p & exists p. !p)")
    assert L.alpha_equivalent(f, P("exists p. (p & exists q. !q)"))


def test_classify_prenex_existential():
    d = classify(P("exists p. A G p"))
    assert (d.body_kind, d.quantifier_depth, d.prenex, d.prefix_class, d.overall_class) == \
        ("CTL", 1, True, "EQ1", "Q1")


def test_classify_one_alternation():
    d = classify(P("exists p. forall q. E F (p & q)"))
    assert (d.quantifier_depth, d.prenex, d.prefix_class, d.overall_class) == (2, True, "EQ2", "Q2")


def test_classify_quantifier_free():
    d = classify(P("A G p"))
    assert (d.quantifier_depth, d.prenex, d.prefix_class, d.overall_class) == (0, True, "neither", "Q0")


def test_classify_universal_prefix():
    assert classify(P("forall p. exists q. E X (p & q)")).prefix_class == "AQ2"


def test_classify_not_prenex():
    assert not classify(P("E X exists p. p")).prenex


def test_size_and_dag_size():
    assert size_and_dag_size(P("forall z. (!z | E X z)")) == (7, 6)
    assert size_and_dag_size(P("p")) == (1, 1)
    assert size_and_dag_size(P("(p & p) & (p & p)")) == (7, 3)


def test_substitute():
    assert substitute(P("E F p"), {"p": P("q & r")}) == P("E F (q & r)")


def test_substitute_bound_is_error():
    with pytest.raises(QctlError):
        substitute(P("exists p. p"), {"p": P("q")})


def test_decompose_roundtrip():
    rng = random.Random(2)
    for _ in range(100):
        f = randgen.qctl(rng, rng.randint(1, 5), 3)
        skeleton, parts = decompose(f)
        assert not L.has_quantifier(skeleton)
        assert L.alpha_equivalent(substitute(skeleton, parts), f)


def test_nnf_until_duality():
    assert print_formula(negation_normal_form(P("!(E [p U q])"))) == "A [!q W !q & !p]"


def test_nnf_double_negation():
    assert negation_normal_form(P("!!p")) == Prop("p")


def test_nnf_next_duality():
    assert negation_normal_form(P("!A X p")) == P("E X !p")


def test_nnf_is_nnf_random():
    rng = random.Random(3)
    for _ in range(200):
        assert L.is_nnf(negation_normal_form(randgen.qctl(rng, rng.randint(0, 5), 2)))


def test_standardize_apart_renames_repeated_binders():
    f = And(Exists(("p",), Prop("p")), Exists(("p",), Not(Prop("p"))))
    g = L.standardize_apart(f)
    binders = [b for h in L.subformulas(g) if isinstance(h, L.Exists) for b in h.props]
    assert len(binders) == len(set(binders))


def test_tidy_names_makes_output_parseable():
    f = Exists(("__f3_z",), And(Prop("__f3_z"), Prop("z")))
    g = L.tidy_names(f)
    assert P(print_formula(g)) == g
    assert "z" in L.free_props(g)
