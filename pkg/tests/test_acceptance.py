"""Acceptance criteria, one check per criterion.

Each ``criterion_*`` function returns ``(ok, detail)``; the pytest wrappers print
one PASS/FAIL line per criterion and assert.  Run this file directly for the
summary table alone: ``python3 tests/test_acceptance.py``.
"""

import contextlib
import io
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from testcalc import behaviors as bh  # noqa: E402
from testcalc import graph_core as gc  # noqa: E402
from testcalc import minilang as ml  # noqa: E402
from testcalc import proplogic as pl  # noqa: E402
from testcalc import statechart as sc  # noqa: E402
from testcalc.cli import main  # noqa: E402

import oracles  # noqa: E402
from generators import random_expr_with_n_vars, random_goto_free_program, random_structured_graph  # noqa: E402
from goto_fixtures import GOTO_INTO_LOOP  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
FIVE_VAR = "((a & c) | (b & ~e)) ==> ((c | m) <==> (m & e))"


def _random_model(rng, max_size=64):
    universe = rng.sample(range(1000), rng.randint(0, max_size))

    def subset():
        return [x for x in universe if rng.random() < 0.5]

    return bh.SptModel.build(universe, subset(), subset(), subset())


def criterion_1():
    g = gc.parse_graph_text((FIXTURES / "forest.graph").read_text())
    p = gc.component_count(g)
    rank = gc.circuit_rank(g)
    oracle_p = oracles.component_count_oracle(g.nodes, g.edges)
    oracle_rank = oracles.circuit_rank_oracle(g.nodes, g.edges)
    sources = set(gc.source_nodes(g))
    ok = (p, rank, oracle_p, oracle_rank, len(g.edges), len(g.nodes)) == (2, 1, 2, 1, 6, 7)
    ok = ok and sources == {"n1", "n7"}
    return ok, f"p={p} circuit_rank={rank} oracle=({oracle_p},{oracle_rank}) sources={sorted(sources)}"


def criterion_2():
    rng = random.Random(2)
    bad = []
    for i in range(200):
        n = rng.randint(1, 10)
        t = pl.truth_table(random_expr_with_n_vars(rng, n))
        rows = t.rows
        if len(t.variables) != n or len(rows) != 2**n or any(len(a) + 1 != n + 1 for a, _ in rows):
            bad.append(i)
    return not bad, f"200 expressions, failures={bad[:5]}"


def criterion_3():
    e = pl.parse_expr(FIVE_VAR)
    d = pl.decompose(e)
    back = d.recompose()
    table, back_table = pl.truth_table(e), pl.truth_table(back)
    ok = d.is_bijective() and len(d.correspondence) == 5 and len(table) == 32 and table == back_table
    return ok, f"elements={','.join(d.elements)} rows={len(table)} identical={table == back_table}"


def criterion_4():
    bad = []
    for seed in range(100):
        g, _ = random_structured_graph(seed, max_depth=5)
        paths = gc.basis_paths(g)
        want = gc.mccabe_complexity(g)
        rows = [oracles.incidence(g.edges, p.nodes) for p in paths]
        if len(paths) != want or oracles.rank(rows) != want:
            bad.append(seed)
    return not bad, f"100 graphs, failing seeds={bad[:5]}"


def criterion_5():
    bad = []
    for seed in range(100):
        p = random_goto_free_program(seed)
        g = ml.build_program_graph(p)
        counts = ml.count_statements(p)
        if not gc.is_structured(g).structured or gc.mccabe_complexity(g) != 1 + counts["if"] + counts["while"]:
            bad.append(seed)
    flips = sum(
        1
        for base, jumpy in GOTO_INTO_LOOP
        if ml.analyze_source(base).structured is True and ml.analyze_source(jumpy).structured is False
    )
    return not bad and flips == 10, f"law failures={bad[:5]} goto flips={flips}/10"


def criterion_6():
    rng = random.Random(6)
    bad = 0
    for _ in range(500):
        m = _random_model(rng)
        r = bh.classify(m)
        regions = {k: set(r[k]) for k in range(1, 9)}
        disjoint = sum(len(s) for s in regions.values()) == len(m.universe)
        covers = set().union(*regions.values()) == set(m.universe)
        brute = regions == oracles.brute_regions(m.universe, m.S, m.P, m.T)
        sentences = (
            m.S - m.T == r.union(2, 5) and m.P - m.T == r.union(2, 6) and m.T - m.S == r.union(3, 7)
        )
        bad += not (disjoint and covers and brute and sentences)
    return bad == 0, f"500 draws, failures={bad}"


def criterion_7():
    rng = random.Random(7)
    bad = 0
    for _ in range(200):
        m = _random_model(rng, max_size=24)
        tests = {f"t{i}": [x] for i, x in enumerate(m.ordered(m.T))}
        f = bh.validate_method(bh.MethodProfile("f", bh.FUNCTIONAL, tests), m)
        s = bh.validate_method(bh.MethodProfile("s", bh.STRUCTURAL, tests), m)
        bad += f.passed != (m.T <= m.S) or s.passed != (m.T <= m.P)
    worked = bh.SptModel.build(range(1, 7), [1, 2, 3], [2, 3, 4], [3, 4, 5])
    omission, commission = bh.faults_of_omission(worked), bh.faults_of_commission(worked)
    correct = bh.correct_portion(worked)
    ok = bad == 0 and (omission, commission, correct) == ({1}, {4}, {2, 3})
    return ok, f"200 models, failures={bad}; omission={sorted(omission)} commission={sorted(commission)} correct={sorted(correct)}"


def criterion_8():
    rng = random.Random(8)
    bad = 0
    for _ in range(300):
        pairs = [(rng.randint(0, 8), rng.randint(0, 8)) for _ in range(rng.randint(0, 10))]
        clash = any(a1 == a2 and b1 != b2 for a1, b1 in pairs for a2, b2 in pairs)
        bad += bh.is_well_defined(bh.FunctionSpec.of(pairs)).ok == clash
        mapping = {a: rng.randint(0, 5) for a in rng.sample(range(20), rng.randint(0, 12))}
        f = bh.FunctionSpec.of(mapping.items())
        keys = list(mapping)
        x = {k for k in keys if rng.random() < 0.5}
        y = {k for k in keys if rng.random() < 0.5}
        bad += bh.image(f, x | y) != bh.image(f, x) | bh.image(f, y)
    return bad == 0, f"300 draws each, failures={bad}"


def criterion_9():
    chart = sc.Statechart.build(
        {"root": ["A", "B"], "A": ["A1", "A2"]}, "root", [(None, "A"), (None, "A1"), ("A", "B", "go")]
    )
    fsm = sc.flatten(chart)
    trace = sc.run(fsm, ["go"])
    ok = len(fsm.states) == 3 and len(fsm.transitions) == 2 and fsm.initial == "A1" and trace == ["A1", "B"]
    return ok, f"states={len(fsm.states)} transitions={len(fsm.transitions)} initial={fsm.initial} trace={trace}"


def _commands():
    """Every CLI invocation over every fixture, including the failing ones."""
    f = {p.name: str(p) for p in FIXTURES.iterdir()}
    cmds = []
    for name in sorted(f):
        path = f[name]
        formats = ["text", "json"]
        if name.endswith(".graph"):
            cmds += [["graph", path, "--format", fmt] for fmt in formats + ["dot"]]
        elif name.endswith(".ml"):
            cmds += [["src", path, "--format", fmt] for fmt in formats + ["dot"]]
        elif name.startswith("spt_"):
            cmds += [["regions", path, "--format", fmt] for fmt in formats]
        elif name == "chart.json":
            cmds += [["statechart", path, "--format", fmt] for fmt in formats + ["dot"]]
            cmds += [["statechart", path, "--run", "go"], ["statechart", path, "--run", "nosuchlabel"]]
        elif name == "five_var.txt":
            for mode in ("--table", "--decompose", "--check"):
                cmds += [["logic", "--file", path, mode, "--format", fmt] for fmt in formats]
        elif name == "modus_ponens.txt":
            cmds += [["logic", "q", "--entails", path, "--format", fmt] for fmt in formats]
    return cmds


def _capture(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue().encode(), err.getvalue().encode()


def criterion_10():
    cmds = _commands()
    differing = [" ".join(c[:2]) for c in cmds if _capture(c) != _capture(c)]
    return not differing and len(cmds) > 0, f"{len(cmds)} invocations, differing={differing[:3]}"


CRITERIA = [
    (1, "component count and circuit rank of the isolated-node fixture", criterion_1),
    (2, "truth table has 2^n rows of n+1 entries", criterion_2),
    (3, "five-variable decomposition is bijective and table-preserving", criterion_3),
    (4, "basis paths: count equals mccabe, full rank", criterion_4),
    (5, "structuredness law and goto-into-loop flips", criterion_5),
    (6, "eight regions partition the universe", criterion_6),
    (7, "method containment and worked fault sets", criterion_7),
    (8, "well-definedness and image over union", criterion_8),
    (9, "statechart flattening and run", criterion_9),
    (10, "CLI output is byte-deterministic", criterion_10),
]


@pytest.mark.parametrize("number, title, check", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})")
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for number, title, check in CRITERIA:
        ok, detail = check()
        failures += not ok
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})")
    sys.exit(1 if failures else 0)
