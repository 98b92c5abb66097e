"""Command-line front end.

Exit codes: 0 true or success, 1 false or unsatisfiable, 2 usage error,
3 budget exceeded, 4 undecidable request.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from pathlib import Path

from . import logic_ast as L
from .corpus import NAMED, named_formula
from .errors import BudgetError, QctlError, UndecidableError
from .kripke import KripkeStructure, parse_structure, print_structure
from .mc_structure import CheckOptions, check_structure
from .mc_tree import tree_game
from .mso import parse_mso
from .parity_games import EVEN, game_to_dot, solve
from .sat_tree import sat, sat_structure
from .transforms import mso_to_qctl, prenex
from .tree_automata import automaton_to_dot

EXIT_TRUE, EXIT_FALSE, EXIT_USAGE, EXIT_BUDGET, EXIT_UNDECIDABLE = 0, 1, 2, 3, 4

_CORPUS_REF = re.compile(r"^\s*([A-Za-z_]\w*)\s*(?:\((.*)\))?\s*$")


def read_formula(text: str) -> L.Formula:
    """A formula, or a corpus entry written ``name`` or ``name(arg, ...)``."""
    m = _CORPUS_REF.match(text)
    if m and m.group(1) in NAMED:
        args = [a.strip() for a in m.group(2).split(",")] if m.group(2) else []
        return named_formula(m.group(1), *args)
    return L.parse_formula(text)


def _read_structure(path: str) -> KripkeStructure:
    try:
        return parse_structure(Path(path).read_text())
    except OSError as exc:
        raise QctlError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise QctlError(f"cannot write {path}: {exc.strerror}") from None


def _emit(args, query: str, semantics: str, result, stats: dict, text: str) -> None:
    if args.json:
        print(json.dumps({"query": query, "semantics": semantics, "result": result, "stats": stats},
                         sort_keys=True))
    else:
        print(text)


# ---------------------------------------------------------------- commands

def cmd_parse(args) -> int:
    print(L.print_formula(read_formula(args.formula)))
    return EXIT_TRUE


def cmd_classify(args) -> int:
    d = L.classify(read_formula(args.formula))
    if args.json:
        print(json.dumps(d.__dict__, sort_keys=True))
    else:
        print(f"body: {d.body_kind}")
        print(f"quantifier depth: {d.quantifier_depth}")
        print(f"prenex: {'yes' if d.prenex else 'no'}")
        print(f"prefix class: {d.prefix_class}")
        print(f"class: {d.overall_class}")
    return EXIT_TRUE


def cmd_prenex(args) -> int:
    print(L.print_formula(prenex(read_formula(args.formula))))
    return EXIT_TRUE


def cmd_translate_mso(args) -> int:
    phi = parse_mso(args.formula)
    print(L.print_formula(mso_to_qctl(phi, args.mode)))
    return EXIT_TRUE


def cmd_corpus(args) -> int:
    if args.name == "list":
        for name in sorted(NAMED):
            print(f"{name} {NAMED[name][1]}".rstrip())
        return EXIT_TRUE
    print(L.print_formula(named_formula(args.name, *args.args)))
    return EXIT_TRUE


def cmd_mc(args) -> int:
    s = _read_structure(args.struct)
    f = read_formula(args.formula)
    state = args.state
    if state is None:
        if s.initial is None:
            raise QctlError("structure has no initial state; pass --state")
        state = s.states[s.initial]
    s.index(state)
    hints = None
    if args.witness_labels:
        try:
            hints = json.loads(Path(args.witness_labels).read_text())
        except (OSError, ValueError) as exc:
            raise QctlError(f"cannot read witness labels: {exc}") from None
    semantics = ["structure", "tree"] if args.semantics == "both" else [args.semantics]
    if (args.emit_automaton or args.emit_game) and "tree" not in semantics:
        raise QctlError("--emit-automaton and --emit-game need the tree semantics")
    rows = []
    for sem in semantics:
        t0 = time.perf_counter()
        stats = {"states": len(s.states), "automatonStates": 0, "gamePositions": 0}
        if sem == "structure":
            opts = CheckOptions(enumeration_cap=args.enumeration_cap, witness_labels=hints)
            result = check_structure(s, state, f, opts)
        else:
            game, start, a = tree_game(s, state, f, args.state_cap)
            sol = solve(game)
            result = sol.winner[start] == EVEN
            stats["automatonStates"] = a.size()
            stats["gamePositions"] = len(game)
            if args.emit_automaton:
                _write(args.emit_automaton, automaton_to_dot(a))
            if args.emit_game:
                _write(args.emit_game, game_to_dot(game, sol))
        stats["millis"] = round(1000 * (time.perf_counter() - t0), 1)
        rows.append((sem, result, stats))
    query = f"{L.print_formula(f)} @ {state}"
    if args.json:
        out = [{"query": query, "semantics": sem, "result": r, "stats": st} for sem, r, st in rows]
        print(json.dumps(out[0] if len(out) == 1 else out, sort_keys=True))
    elif len(rows) == 1:
        print("true" if rows[0][1] else "false")
    else:
        print(f"{'semantics':<10}  result")
        for sem, r, _ in rows:
            print(f"{sem:<10}  {'true' if r else 'false'}")
    return EXIT_TRUE if all(r for _, r, _ in rows) else EXIT_FALSE


def cmd_sat(args) -> int:
    f = read_formula(args.formula)
    if args.semantics == "structure":
        sat_structure(f)
    res = sat(f, cap=args.state_cap, verify=not args.no_verify)
    stats = {"states": len(res.witness.states) if res else 0,
             "automatonStates": res.stats.get("automatonStates", 0),
             "gamePositions": res.stats.get("gamePositions", 0),
             "millis": res.stats.get("millis", 0)}
    if res and args.witness:
        _write(args.witness, print_structure(res.witness))
    if args.json:
        _emit(args, L.print_formula(f), "tree", "sat" if res else "unsat", stats, "")
    elif res:
        print("sat")
        if not args.witness:
            print(print_structure(res.witness), end="")
    else:
        print("unsat")
    return EXIT_TRUE if res else EXIT_FALSE


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qctl", description="QCTL model checking and satisfiability.")
    sub = p.add_subparsers(dest="command", required=True)

    def formula_arg(sp):
        sp.add_argument("--formula", "-f", required=True,
                        help="formula text, or a corpus entry such as 'acyclic' or 'uniq(p)'")

    sp = sub.add_parser("parse", help="parse and pretty-print a formula")
    formula_arg(sp)
    sp.set_defaults(run=cmd_parse)

    sp = sub.add_parser("classify", help="report the fragment of a formula")
    formula_arg(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(run=cmd_classify)

    sp = sub.add_parser("prenex", help="equivalent prenex formula")
    formula_arg(sp)
    sp.set_defaults(run=cmd_prenex)

    sp = sub.add_parser("translate-mso", help="QCTL formula equivalent to an MSO formula in x")
    formula_arg(sp)
    sp.add_argument("--mode", choices=("structure", "tree"), default="structure")
    sp.set_defaults(run=cmd_translate_mso)

    sp = sub.add_parser("mc", help="model checking")
    formula_arg(sp)
    sp.add_argument("--struct", required=True, help="structure file")
    sp.add_argument("--state", help="state name (default: the initial state)")
    sp.add_argument("--semantics", choices=("structure", "tree", "both"), default="structure")
    sp.add_argument("--witness-labels", metavar="FILE",
                    help="JSON object mapping propositions to state lists tried first")
    sp.add_argument("--emit-automaton", metavar="DOT")
    sp.add_argument("--emit-game", metavar="DOT")
    sp.add_argument("--enumeration-cap", type=int, default=CheckOptions.enumeration_cap)
    sp.add_argument("--state-cap", type=int, default=1_000_000)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(run=cmd_mc)

    sp = sub.add_parser("sat", help="satisfiability")
    formula_arg(sp)
    sp.add_argument("--semantics", choices=("tree", "structure"), default="tree")
    sp.add_argument("--witness", metavar="FILE", help="write the witness structure here")
    sp.add_argument("--no-verify", action="store_true", help="skip re-checking the witness")
    sp.add_argument("--state-cap", type=int, default=1_000_000)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(run=cmd_sat)

    sp = sub.add_parser("corpus", help="print a named formula ('list' shows all)")
    sp.add_argument("name")
    sp.add_argument("args", nargs="*")
    sp.set_defaults(run=cmd_corpus)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except UndecidableError as exc:
        print(f"qctl: {exc}", file=sys.stderr)
        return EXIT_UNDECIDABLE
    except BudgetError as exc:
        print(f"qctl: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except QctlError as exc:
        print(f"qctl: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
