import json

import pytest

from qctl import corpus as C
from qctl.cli import main
from qctl.kripke import parse_structure, print_structure
from qctl.mc_tree import check_tree

S0 = """\
state q0 { r }
state q1
edge q0 q0
edge q0 q1
edge q1 q0
edge q1 q1
init q0
"""


@pytest.fixture
def s0_file(tmp_path):
    path = tmp_path / "s0.kripke"
    path.write_text(S0)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_mc_both_semantics(capsys, s0_file):
    code, out, _ = run(capsys, "mc", "--struct", s0_file, "--formula", "selfloop", "--semantics", "both")
    lines = out.split("\n")
    assert lines[0].split() == ["semantics", "result"]
    assert lines[1].split() == ["structure", "true"]
    assert lines[2].split() == ["tree", "false"]
    assert code == 1


def test_mc_structure_true(capsys, s0_file):
    code, out, _ = run(capsys, "mc", "--struct", s0_file, "--formula", "uniq(r)")
    assert (code, out.strip()) == (0, "true")


def test_mc_json(capsys, s0_file):
    code, out, _ = run(capsys, "mc", "--struct", s0_file, "--formula", "E X r", "--state", "q1",
                       "--semantics", "tree", "--json")
    data = json.loads(out)
    assert code == 0
    assert data["result"] is True and data["semantics"] == "tree"
    assert set(data["stats"]) == {"states", "automatonStates", "gamePositions", "millis"}


def test_mc_emits_dot(capsys, s0_file, tmp_path):
    aut, game = tmp_path / "a.dot", tmp_path / "g.dot"
    code, _, _ = run(capsys, "mc", "--struct", s0_file, "--formula", "E F r", "--semantics", "tree",
                     "--emit-automaton", str(aut), "--emit-game", str(game))
    assert code == 0
    assert aut.read_text().startswith("digraph") and game.read_text().startswith("digraph")


def test_mc_witness_labels(capsys, tmp_path):
    s, witness = C.build_grid(2, 2)
    sp, wp = tmp_path / "g.kripke", tmp_path / "w.json"
    sp.write_text(print_structure(s))
    wp.write_text(json.dumps(witness))
    code, out, _ = run(capsys, "mc", "--struct", str(sp), "--formula", "grid2d",
                       "--witness-labels", str(wp))
    assert (code, out.strip()) == (0, "true")


def test_sat_writes_witness(capsys, tmp_path):
    path = tmp_path / "w.kripke"
    code, out, _ = run(capsys, "sat", "--semantics", "tree", "--formula", "acyclic", "--witness", str(path))
    assert code == 0 and out.strip() == "sat"
    w = parse_structure(path.read_text())
    assert check_tree(w, w.initial, C.acyclic())


def test_sat_unsat(capsys):
    code, out, _ = run(capsys, "sat", "--formula", "p & A G !p", "--json")
    assert code == 1 and json.loads(out)["result"] == "unsat"


def test_sat_structure_semantics_is_refused(capsys):
    code, _, err = run(capsys, "sat", "--semantics", "structure", "--formula", "acyclic")
    assert code == 4 and "undecidable" in err


def test_syntax_error_exit_code(capsys):
    code, _, err = run(capsys, "parse", "--formula", "p & & q")
    assert code == 2 and err.startswith("qctl:")


def test_missing_structure_file(capsys, tmp_path):
    code, _, _ = run(capsys, "mc", "--struct", str(tmp_path / "nope"), "--formula", "p")
    assert code == 2


def test_budget_exit_code(capsys, tmp_path):
    path = tmp_path / "line.kripke"
    path.write_text(print_structure(C.line(8)))
    code, _, err = run(capsys, "mc", "--struct", str(path), "--enumeration-cap", "1",
                       "--formula", "exists a, b, c. E F (a & b & E X (!a & c))")
    assert code == 3 and "budget" in err


def test_classify_and_prenex(capsys):
    code, out, _ = run(capsys, "classify", "--formula", "exists p. forall q. E F (p & q)", "--json")
    assert code == 0 and json.loads(out)["prefix_class"] == "EQ2"
    code, out, _ = run(capsys, "prenex", "--formula", "E X exists p. p")
    assert code == 0 and out.startswith("exists")


def test_translate_mso(capsys):
    code, out, _ = run(capsys, "translate-mso", "--formula", "exists y. edg(x, y)", "--mode", "tree")
    assert code == 0 and "pa_y" in out


def test_corpus_listing(capsys):
    code, out, _ = run(capsys, "corpus", "list")
    assert code == 0 and "selfloop" in out.split()
    code, out, _ = run(capsys, "corpus", "selfloop")
    assert out.strip() == "forall z. z -> E X z"
