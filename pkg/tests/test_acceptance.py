"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import random
import time
import warnings

import pytest

import randgen
from qctl import corpus as C
from qctl import logic_ast as L
from qctl.kripke import KripkeStructure
from qctl.logic_ast import parse_formula
from qctl.mc_structure import CheckOptions, brute_force_sat, eval_mso, sat_set
from qctl.mc_tree import check_tree, tree_sat_set
from qctl.parity_games import EVEN, ODD, GameBuilder, brute_solve, solve, verify_strategy
from qctl.sat_tree import sat
from qctl.transforms import is_prenex, mso_to_qctl, prenex
from qctl.tree_automata import accepts, ctl_to_apta, dual, project, simulate

warnings.filterwarnings("ignore", message="proposition.*quantified more than once")


def _states(s):
    return range(len(s.states))


# 1 -------------------------------------------------------------------------

def test_criterion_01_engine_agrees_with_brute_force(report):
    rng = random.Random(101)
    t0 = time.perf_counter()
    bad = []
    n = 500
    for _ in range(n):
        s = randgen.structure(rng, rng.randint(1, 5))
        f = randgen.qctl(rng, rng.randint(1, 4), 2)
        fast = set(sat_set(s, f))
        slow = {q for q in _states(s) if brute_force_sat(s, q, f)}
        if fast != slow:
            bad.append((L.print_formula(f), fast, slow))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 120
    report(1, "structure engine agrees with brute force", ok,
           f"{n} instances, {len(bad)} mismatches, {dt:.1f}s")
    assert not bad, bad[:3]
    assert dt < 120


# 2 -------------------------------------------------------------------------

def test_criterion_02_prenex_is_equivalent(report):
    rng = random.Random(202)
    t0 = time.perf_counter()
    bad = []
    n = 200
    opts = CheckOptions(enumeration_cap=48)
    for _ in range(n):
        s = randgen.structure(rng, rng.randint(1, 3), atoms=("p", "q"))
        f = randgen.qctl(rng, rng.randint(1, 3), 2, atoms=("p", "q"))
        g = prenex(f)
        if not is_prenex(g):
            bad.append(("not prenex", L.print_formula(g)))
            continue
        # the input goes through the literal oracle, the output through the engine
        want = {q for q in _states(s) if brute_force_sat(s, q, f)}
        got = set(sat_set(s, g, opts))
        if want != got:
            bad.append((L.print_formula(f), want, got))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 300
    report(2, "prenex form is equivalent and prenex", ok,
           f"{n} instances, {len(bad)} failures, {dt:.1f}s")
    assert not bad, bad[:3]
    assert dt < 300


# 3 -------------------------------------------------------------------------

def test_criterion_03_ctl_agrees_across_semantics(report):
    rng = random.Random(303)
    t0 = time.perf_counter()
    bad = []
    n = 200
    for _ in range(n):
        s = randgen.structure(rng, rng.randint(1, 5))
        f = randgen.ctl(rng, rng.randint(1, 4))
        if set(tree_sat_set(s, f)) != set(sat_set(s, f)):
            bad.append((L.print_formula(f), s))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 300
    report(3, "CTL truth is the same under both semantics", ok,
           f"{n} pairs, {len(bad)} mismatches, {dt:.1f}s")
    assert not bad, bad[:3]
    assert dt < 300


# 4 -------------------------------------------------------------------------

def test_criterion_04_truth_dichotomies(report, s0):
    rng = random.Random(404)
    checks = []

    def timed(name, fn):
        t0 = time.perf_counter()
        ok = fn()
        checks.append((name, ok, time.perf_counter() - t0))

    structures = [s0] + [randgen.structure(rng, rng.randint(1, 4)) for _ in range(5)]

    def selfloop_structure():
        return all(set(sat_set(s, C.selfloop())) == {q for q in _states(s) if q in s.succ[q]}
                   for s in structures)

    def selfloop_tree():
        return all(not check_tree(s, q, C.selfloop()) for s in structures for q in _states(s))

    def acyclic_structure():
        return all(not sat_set(s, C.acyclic()) for s in structures)

    def acyclic_tree():
        return all(check_tree(s, q, C.acyclic()) for s in structures[:3] for q in _states(s))

    def example_pair():
        f1 = parse_formula("E X (forall p. (E F p -> p))")
        f2 = parse_formula("exists z. forall p. E X (z & (E F p -> p))")
        return (not brute_force_sat(s0, "q0", f1) and not sat_set(s0, f1)
                and brute_force_sat(s0, "q0", f2) and 0 in sat_set(s0, f2))

    timed("selfloop, structure semantics", selfloop_structure)
    timed("selfloop, tree semantics", selfloop_tree)
    timed("acyclic, structure semantics", acyclic_structure)
    timed("acyclic, tree semantics", acyclic_tree)
    timed("quantifier placement pair", example_pair)
    ok = all(c[1] and c[2] < 1.0 for c in checks)
    detail = ", ".join(f"{name} {'ok' if good else 'WRONG'} {dt:.2f}s" for name, good, dt in checks)
    report(4, "truth dichotomies", ok, detail)
    assert all(c[1] for c in checks), checks
    assert all(c[2] < 1.0 for c in checks), checks


# 5 -------------------------------------------------------------------------

def test_criterion_05_mso_translation(report):
    rng = random.Random(505)
    t0 = time.perf_counter()
    bad = []
    n = 100
    for _ in range(n):
        s = randgen.structure(rng, rng.randint(1, 4), atoms=("p", "q"))
        phi = randgen.mso(rng, rng.randint(2, 5))
        f = mso_to_qctl(phi, "structure")
        got = set(sat_set(s, f, CheckOptions(enumeration_cap=40)))
        want = {q for q in _states(s) if eval_mso(s, q, phi)}
        if got != want:
            bad.append((phi, got, want))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 600
    report(5, "MSO translation agrees with MSO evaluation", ok,
           f"{n} formulas, {len(bad)} mismatches, {dt:.1f}s")
    assert not bad, bad[:3]
    assert dt < 600


# 6 -------------------------------------------------------------------------

def _projection_witness(n, hidden, s, q):
    """A relabelling of ``s`` on ``hidden`` over the product with the states
    of ``n`` whose unwinding ``n`` accepts, or None if there is none."""
    variants = [frozenset(v) for v in _subsets(sorted(hidden))]
    gb = GameBuilder()
    bot, _ = gb.add(("bot",), EVEN, 1)
    gb.edge(bot, bot)
    work = []

    def pos(r, aq):
        v, new = gb.add(("s", r, aq), EVEN, n.priority(aq))
        if new:
            work.append((v, r, aq))
        return v

    start = pos(s.index(q), n.initial)
    moves = {}
    mids = []
    while work:
        v, r, aq = work.pop()
        sigma = s.labels[r] - hidden
        for var in variants:
            for tup in n.choices(aq, sigma | var, s.degree(r)):
                w, new = gb.add(("m", r, var, tup), ODD, -1)
                if new:
                    mids.append(w)
                    for c, r2 in enumerate(s.succ[r]):
                        gb.edge(w, pos(r2, tup[c]))
                gb.edge(v, w)
                moves[w] = (var, tup)
        if not gb.succ[v]:
            gb.edge(v, bot)
    top = max([p for p in gb.priority if p >= 0] + [1])
    for w in mids:
        gb.priority[w] = top
    game = gb.build()
    sol = solve(game)
    if sol.winner[start] != EVEN:
        return None
    nodes = [(s.index(q), n.initial)]
    index = {nodes[0]: 0}
    succ, labels = [], []
    for r, aq in nodes:
        var, tup = moves[sol.strategy[gb.index[("s", r, aq)]]]
        labels.append((s.labels[r] - hidden) | var)
        kids = []
        for c, r2 in enumerate(s.succ[r]):
            key = (r2, tup[c])
            if key not in index:
                index[key] = len(nodes)
                nodes.append(key)
            kids.append(index[key])
        succ.append(tuple(sorted(kids)))
    return KripkeStructure(tuple(f"m{i}" for i in range(len(nodes))), tuple(succ), tuple(labels), 0)


def _subsets(items):
    for mask in range(1 << len(items)):
        yield {x for i, x in enumerate(items) if mask >> i & 1}


def test_criterion_06_automata_pipeline(report):
    rng = random.Random(606)
    t0 = time.perf_counter()
    counts = {"simulate": 0, "project": 0, "dual": 0}
    bad = []
    while min(counts.values()) < 50:
        s = randgen.structure(rng, rng.randint(1, 4), atoms=("p", "q"))
        degrees = {s.degree(i) for i in _states(s)}
        f = L.negation_normal_form(randgen.ctl(rng, rng.randint(1, 3), atoms=("p", "q")))
        a = ctl_to_apta(f, degrees, {"p", "q"})
        q = rng.randrange(len(s.states))
        base = accepts(a, s, q)
        if accepts(dual(a), s, q) == base:
            bad.append(("dual", L.print_formula(f)))
        counts["dual"] += 1
        nd = simulate(a, 200_000)
        if accepts(nd, s, q) != base:
            bad.append(("simulate", L.print_formula(f)))
        counts["simulate"] += 1
        proj = project(nd, {"q"})
        accepted = accepts(proj, s, q)
        witness = _projection_witness(nd, {"q"}, s, q)
        if accepted != (witness is not None):
            bad.append(("project, acceptance differs from relabelling game", L.print_formula(f)))
        elif witness is not None and not accepts(nd, witness, 0):
            bad.append(("project, extracted relabelling rejected", L.print_formula(f)))
        # a relabelling of the structure itself is a relabelling of its unwinding
        for m in range(1 << len(s.states)):
            relabel = s.with_labels([(s.labels[i] - {"q"}) | ({"q"} if m >> i & 1 else set())
                                     for i in _states(s)])
            if accepts(nd, relabel, q):
                if not accepted:
                    bad.append(("project, relabelled structure rejected", L.print_formula(f)))
                break
        counts["project"] += 1
    dt = time.perf_counter() - t0
    ok = not bad and dt < 600
    report(6, "simulation, projection and dualisation preserve membership", ok,
           f"{counts['simulate']} trees each, {len(bad)} failures, {dt:.1f}s")
    assert not bad, bad[:3]
    assert dt < 600


# 7 -------------------------------------------------------------------------

def test_criterion_07_parity_solver(report):
    rng = random.Random(707)
    t0 = time.perf_counter()
    bad = []
    n = 150
    for _ in range(n):
        g = randgen.game(rng, rng.randint(1, 7), 3)
        sol = solve(g)
        if sol.winner != brute_solve(g).winner:
            bad.append(g)
        elif not (verify_strategy(g, sol, 0) and verify_strategy(g, sol, 1)):
            bad.append(("strategy", g))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 60
    report(7, "parity solver agrees with exhaustive solving", ok,
           f"{n} games, {len(bad)} mismatches, {dt:.1f}s")
    assert not bad, bad[:3]
    assert dt < 60


# 8 -------------------------------------------------------------------------

def _distance_ok(w, root, depth: int, n: int) -> bool:
    from qctl.kripke import RegularTree
    tree = RegularTree(w, root)
    nodes = list(tree.nodes(depth))
    seen_s = False
    for u in nodes:
        if "s" not in tree.label(u):
            continue
        seen_s = True
        for v in nodes:
            if len(v) > len(u) and v[:len(u)] == u and len(v) - len(u) <= n:
                is_t = "t" in tree.label(v)
                if is_t != (len(v) - len(u) == n):
                    return False
    return seen_s


def test_criterion_08_satisfiability(report):
    t0 = time.perf_counter()
    cases = [
        ("p & AG !p", parse_formula("p & A G !p"), False),
        ("selfloop", C.selfloop(), False),
        ("acyclic", C.acyclic(), True),
        ("uniq(p)", C.uniq("p"), True),
        ("delimiters & yardstick_0(3)", L.conj(C.delimiters(), C.yardstick_0(3)), True),
    ]
    bad = []
    for name, f, expected in cases:
        res = sat(f)
        if res.satisfiable != expected:
            bad.append((name, "verdict"))
            continue
        if res and not check_tree(res.witness, res.root, f):
            bad.append((name, "witness"))
        if name.startswith("delimiters") and res and not _distance_ok(res.witness, res.root, 6, 3):
            bad.append((name, "distance"))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 300
    report(8, "tree satisfiability verdicts and witnesses", ok,
           f"{len(cases)} formulas, {len(bad)} failures, {dt:.1f}s")
    assert not bad, bad
    assert dt < 300


# 9 -------------------------------------------------------------------------

def test_criterion_09_reductions(report):
    rng = random.Random(909)
    t0 = time.perf_counter()
    bad = []
    tally = {1: [0, 0], 2: [0, 0]}
    for k in (1, 2):
        for _ in range(100):
            inst = C.random_qbf(rng, k, nvars=rng.randint(2, 3), nclauses=rng.randint(1, 5 if k == 1 else 3))
            s, f = C.qbf_to_mc(inst)
            got = 0 in sat_set(s, f, CheckOptions(enumeration_cap=40))
            tally[k][got] += 1
            if got != C.brute_qbf(inst):
                bad.append(inst)
    circuits = [C.sample_circuit()] + [C.random_circuit(rng, rng.randint(2, 10)) for _ in range(60)]
    for c in circuits:
        for universal in (False, True):
            s, f = C.circuit_to_mc(c, universal)
            if (s.index(c.root) in sat_set(s, f)) != C.evaluate_circuit(c):
                bad.append(c)
    sample_ok = C.evaluate_circuit(C.sample_circuit())
    dt = time.perf_counter() - t0
    ok = not bad and sample_ok and dt < 300
    report(9, "QBF and circuit reductions agree with direct evaluation", ok,
           f"200 QBF (k=1 true/false {tally[1][1]}/{tally[1][0]}, k=2 {tally[2][1]}/{tally[2][0]}), "
           f"{len(circuits)} circuits, {len(bad)} mismatches, {dt:.1f}s")
    assert not bad, bad[:3]
    assert sample_ok
    assert dt < 300


# 10 ------------------------------------------------------------------------

def test_criterion_10_grids(report, s0):
    t0 = time.perf_counter()
    bad = []
    g2 = C.grid2d()
    for m, n in ((2, 2), (2, 3), (3, 3)):
        s, witness = C.build_grid(m, n)
        opts = CheckOptions(witness_labels=witness, hints_only=True)
        if 0 not in sat_set(s, g2, opts):
            bad.append(("grid2d", m, n))
    g1 = C.grid1d()
    for n in range(2, 6):
        if 0 not in sat_set(C.line(n), g1):
            bad.append(("line", n))
    non_lines = [
        s0,
        KripkeStructure.build(["a", "b", "c"], [("a", "b"), ("a", "c"), ("b", "b"), ("c", "c")], {}, "a"),
        KripkeStructure.build(["a", "b"], [("a", "b"), ("b", "a")], {}, "a"),
        KripkeStructure.build(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "b")], {}, "a"),
    ]
    for s in non_lines:
        if 0 in sat_set(s, g1):
            bad.append(("non-line", s.states))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 600
    report(10, "grid characterisations", ok,
           f"3 grids, 4 lines, {len(non_lines)} non-lines, {len(bad)} failures, {dt:.1f}s")
    assert not bad, bad
    assert dt < 600


# 11 ------------------------------------------------------------------------

def test_criterion_11_counting(report):
    rng = random.Random(1111)
    t0 = time.perf_counter()
    bad = []
    n = 100
    formulas = [("EX1", C.EX1("p"), lambda c: c == 1)]
    formulas += [(f"EXgeq{k}", C.EXgeq(k, "p"), (lambda k: lambda c: c >= k)(k)) for k in (1, 2, 3)]
    for _ in range(n):
        s = randgen.structure(rng, rng.randint(1, 4), atoms=("p",), density=0.5)
        count = [sum(1 for r in s.succ[q] if "p" in s.labels[r]) for q in _states(s)]
        for name, f, want in formulas:
            expected = {q for q in _states(s) if want(count[q])}
            if set(sat_set(s, f)) != expected:
                bad.append(("structure", name, s))
            if set(tree_sat_set(s, f)) != expected:
                bad.append(("tree", name, s))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 120
    report(11, "counting formulas match successor counts", ok,
           f"{n} structures, both semantics, {len(bad)} mismatches, {dt:.1f}s")
    assert not bad, bad[:3]
    assert dt < 120


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
