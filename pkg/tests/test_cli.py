import json
import subprocess
import sys

import pytest

from testcalc import graph_core as gc
from testcalc.cli import main

FIVE_VAR = "((a & c) | (b & ~e)) ==> ((c | m) <==> (m & e))"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def fields(text):
    out = {}
    for line in text.splitlines():
        key, sep, value = line.partition(": ")
        if sep:
            out[key] = value
    return out


class TestGraph:
    def test_forest(self, capsys, fixtures):
        code, out, _ = run(capsys, "graph", fixtures / "forest.graph")
        f = fields(out)
        assert code == 0
        assert (f["n"], f["e"], f["p"], f["circuit_rank"]) == ("7", "6", "2", "1")
        assert f["sources"] == "n1 n7"
        assert f["single_entry_single_exit"] == "false"
        assert f["basis_paths"] == "n/a"

    def test_diamond(self, capsys, fixtures):
        code, out, _ = run(capsys, "graph", fixtures / "diamond.graph")
        f = fields(out)
        assert code == 0 and f["mccabe"] == "2" and f["basis_paths"] == "2"
        assert f["structured"] == "true"
        assert sum(line.startswith("path ") for line in out.splitlines()) == 2

    def test_malformed(self, capsys, fixtures):
        code, out, err = run(capsys, "graph", fixtures / "malformed.graph")
        assert code == 2 and out == ""
        assert "line 3" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "graph", tmp_path / "absent.graph")
        assert code == 2

    def test_spaghetti_residual(self, capsys, fixtures):
        _, out, _ = run(capsys, "graph", fixtures / "spaghetti.graph")
        f = fields(out)
        assert f["structured"] == "false" and f["residual_nodes"]

    def test_json_matches_text(self, capsys, fixtures):
        for name in ("forest.graph", "diamond.graph", "while.graph", "spaghetti.graph"):
            _, text, _ = run(capsys, "graph", fixtures / name)
            _, js, _ = run(capsys, "graph", fixtures / name, "--format", "json")
            report, f = json.loads(js), fields(text)
            for key in ("n", "e", "p", "circuit_rank", "mccabe"):
                assert str(report[key]) == f[key]
            assert " ".join(report["sources"]) == f["sources"]
            if report["basis_paths"] is not None:
                assert str(len(report["basis_paths"])) == f["basis_paths"]

    def test_dot(self, capsys, fixtures):
        _, out, _ = run(capsys, "--format", "dot", "graph", fixtures / "diamond.graph")
        assert out.startswith("digraph G {") and out.count("->") == 4

    def test_out_file(self, capsys, fixtures, tmp_path):
        target = tmp_path / "report.txt"
        code, out, _ = run(capsys, "graph", fixtures / "diamond.graph", "--out", target)
        assert code == 0 and out == ""
        assert "mccabe: 2" in target.read_text()


class TestSrc:
    def test_goto_into_loop(self, capsys, fixtures):
        code, out, _ = run(capsys, "src", fixtures / "goto_into_loop.ml")
        assert code == 0 and "structured: false" in out.splitlines()

    def test_empty(self, capsys, fixtures):
        _, out, _ = run(capsys, "src", fixtures / "empty.ml")
        assert fields(out)["mccabe"] == "1"

    def test_two_ifs_one_while(self, capsys, fixtures):
        _, out, _ = run(capsys, "src", fixtures / "two_ifs_one_while.ml")
        f = fields(out)
        assert f["mccabe"] == "4" and f["structured"] == "true"
        assert "if=2" in f["statements"] and "while=1" in f["statements"]

    def test_syntax_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.ml"
        bad.write_text("if (c) {\n  x = 1;\n")
        code, _, err = run(capsys, "src", bad)
        assert code == 2 and "line" in err

    def test_emit_graph_and_dot(self, capsys, fixtures, tmp_path):
        graph_file, dot_file = tmp_path / "cfg.graph", tmp_path / "cfg.dot"
        code, _, _ = run(capsys, "src", fixtures / "loop_in_if.ml", "--emit-graph", graph_file, "--dot", dot_file)
        assert code == 0
        g = gc.parse_graph_text(graph_file.read_text())
        assert gc.mccabe_complexity(g) == 3
        assert dot_file.read_text() == gc.to_dot(g)
        # the emitted graph feeds back into the graph command
        _, out, _ = run(capsys, "graph", graph_file)
        assert fields(out)["mccabe"] == "3"

    def test_json(self, capsys, fixtures):
        _, out, _ = run(capsys, "src", fixtures / "two_ifs_one_while.ml", "--format", "json")
        report = json.loads(out)
        assert report["statements"]["if"] == 2 and report["mccabe"] == 4
        assert report["labels"]


class TestLogic:
    def test_five_var_table(self, capsys):
        code, out, _ = run(capsys, "logic", FIVE_VAR, "--table")
        lines = out.splitlines()
        assert code == 0
        assert lines[0] == "a c b e m result"
        assert len(lines) == 33
        assert all(len(l.split()) == 6 for l in lines)

    def test_file_input(self, capsys, fixtures):
        _, from_file, _ = run(capsys, "logic", "--file", fixtures / "five_var.txt")
        _, inline, _ = run(capsys, "logic", FIVE_VAR)
        assert from_file == inline

    def test_both_inputs_rejected(self, capsys, fixtures):
        code, _, _ = run(capsys, "logic", "a", "--file", fixtures / "five_var.txt")
        assert code == 2

    def test_entails(self, capsys, fixtures):
        code, out, _ = run(capsys, "logic", "q", "--entails", fixtures / "modus_ponens.txt")
        assert code == 0 and "ENTAILED" in out.splitlines()

    def test_not_entailed(self, capsys, fixtures):
        _, out, _ = run(capsys, "logic", "~q", "--entails", fixtures / "modus_ponens.txt")
        assert "NOT ENTAILED" in out and "counterexample: p=T q=T" in out

    def test_decompose(self, capsys):
        _, out, _ = run(capsys, "logic", FIVE_VAR, "--decompose")
        f = fields(out)
        assert f["elements"] == "{a, c, b, e, m}"
        assert f["correspondence"] == "{(a, x1), (c, x2), (b, x3), (e, x4), (m, x5)}"

    def test_check(self, capsys):
        _, out, _ = run(capsys, "logic", "a | ~a", "--check")
        assert fields(out)["tautology"] == "true"

    def test_cap(self, capsys):
        expr = " & ".join(f"v{i}" for i in range(30))
        code, out, err = run(capsys, "logic", expr, "--table")
        assert code == 3 and out == "" and "30" in err

    def test_syntax_error(self, capsys):
        code, _, err = run(capsys, "logic", "a & | b")
        assert code == 2 and "position 4" in err

    def test_dot_rejected(self, capsys):
        code, _, _ = run(capsys, "logic", "a", "--format", "dot")
        assert code == 2

    def test_json_table(self, capsys):
        _, out, _ = run(capsys, "logic", "p & ~q", "--format", "json")
        report = json.loads(out)
        assert report["variables"] == ["p", "q"]
        assert len(report["rows"]) == 4


class TestRegions:
    def test_worked(self, capsys, fixtures):
        code, out, _ = run(capsys, "regions", fixtures / "spt_worked.json")
        f = fields(out)
        assert code == 0
        expected = {1: "{3}", 2: "{2}", 3: "{4}", 4: "{}", 5: "{1}", 6: "{}", 7: "{5}", 8: "{6}"}
        assert {k: f[f"region{k}"] for k in range(1, 9)} == expected
        assert (f["omission"], f["commission"], f["correct"]) == ("{1}", "{4}", "{2, 3}")
        assert f["redundant"] == "{3}"
        assert f["functional"] == "FAIL violations={4, 5} gaps={1, 2}"

    def test_equal_sets(self, capsys, fixtures):
        _, out, _ = run(capsys, "regions", fixtures / "spt_equal.json")
        f = fields(out)
        nonempty = {k for k in range(1, 9) if f[f"region{k}"] != "{}"}
        assert nonempty == {1, 8}

    def test_outside_universe(self, capsys, fixtures):
        code, _, err = run(capsys, "regions", fixtures / "spt_outside.json")
        assert code == 2 and "9" in err

    def test_invalid_json(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        assert run(capsys, "regions", bad)[0] == 2

    def test_json(self, capsys, fixtures):
        _, out, _ = run(capsys, "regions", fixtures / "spt_worked.json", "--format", "json")
        report = json.loads(out)
        assert report["regions"]["1"] == [3] and report["omission"] == [1]
        assert report["methods"]["structural"]["passed"] is False


class TestStatechart:
    def test_flatten(self, capsys, fixtures):
        code, out, _ = run(capsys, "statechart", fixtures / "chart.json", "--flatten")
        f = fields(out)
        assert code == 0
        assert f["states"] == "A1 A2 B" and f["initial"] == "A1" and f["transitions"] == "2"
        assert "A1 --go--> B" in out and "A2 --go--> B" in out

    def test_run(self, capsys, fixtures):
        _, out, _ = run(capsys, "statechart", fixtures / "chart.json", "--run", "go")
        assert out == "trace: A1 B\n"

    def test_no_transition(self, capsys, fixtures):
        code, _, _ = run(capsys, "statechart", fixtures / "chart.json", "--run", "nosuchlabel")
        assert code == 1

    def test_invalid_chart(self, capsys, tmp_path):
        bad = tmp_path / "chart.json"
        bad.write_text(json.dumps({"blobs": {"root": ["A"]}, "root": "root", "transitions": []}))
        code, _, err = run(capsys, "statechart", bad)
        assert code == 2 and "initial" in err

    def test_dot(self, capsys, fixtures):
        _, out, _ = run(capsys, "statechart", fixtures / "chart.json", "--format", "dot")
        assert '"A1" -> "B" [label="go"];' in out


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as info:
        main(["nosuchcommand"])
    assert info.value.code == 2
    capsys.readouterr()


def test_module_entry_point(fixtures):
    proc = subprocess.run(
        [sys.executable, "-m", "testcalc", "statechart", str(fixtures / "chart.json"), "--run", "go"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and proc.stdout == "trace: A1 B\n"
