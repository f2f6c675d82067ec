"""Command-line front end: ``testcalc {graph,src,logic,regions,statechart}``.

Exit codes: 0 success, 1 analysis/domain error, 2 input or parse error,
3 resource cap exceeded.  Every command can print text (default), JSON, and
for graph-producing commands DOT.  Report field names are stable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, behaviors, graph_core, minilang, proplogic, statechart
from .errors import AnalysisError, InputError, ResourceLimitError, TestcalcError

FORMATS = ("text", "json", "dot")
DOT_COMMANDS = {"graph", "src", "statechart"}


class UsageError(InputError):
    pass


# -- shared helpers -----------------------------------------------------------


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise UsageError(f"{path} is not valid UTF-8") from None


def _read_json(path):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None


def _words(items) -> str:
    return " ".join(str(x) for x in items)


def _bool(value) -> str:
    return "n/a" if value is None else str(bool(value)).lower()


def _dump_json(report) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def _text_lines(report: dict, keys) -> list[str]:
    lines = []
    for key in keys:
        value = report[key]
        if isinstance(value, list):
            value = _words(value)
        elif isinstance(value, bool) or value is None:
            value = _bool(value)
        lines.append(f"{key}: {value}")
    return lines


# -- graph / src --------------------------------------------------------------


def graph_report(g: graph_core.ProgramGraph) -> dict:
    m = graph_core.metrics(g)
    sese = graph_core.is_single_entry_single_exit(g)
    report = {
        "n": m.n,
        "e": m.e,
        "p": m.p,
        "circuit_rank": m.circuit_rank,
        "mccabe": m.mccabe,
        "sources": list(graph_core.source_nodes(g)),
        "sinks": list(graph_core.sink_nodes(g)),
        "components": [list(c) for c in graph_core.connected_components(g)],
        "single_entry_single_exit": sese.ok,
        "entry": sese.entry,
        "exit": sese.exit,
        "structured": None,
        "reduction": [],
        "residual_nodes": [],
        "residual_edges": [],
        "basis_paths": None,
    }
    if sese.ok:
        structure = graph_core.is_structured(g)
        report["structured"] = structure.structured
        report["reduction"] = [{"kind": c.kind, "nodes": list(c.nodes)} for c in structure.trace]
        if not structure.structured:
            report["residual_nodes"] = list(structure.residual.nodes)
            report["residual_edges"] = [list(e) for e in structure.residual.edges]
        report["basis_paths"] = [list(p.nodes) for p in graph_core.basis_paths(g)]
    return report


_GRAPH_KEYS = ("n", "e", "p", "circuit_rank", "mccabe", "sources", "sinks")


def render_graph_text(report: dict, extra_keys=()) -> str:
    lines = _text_lines(report, _GRAPH_KEYS)
    lines.append(f"components: {' | '.join(_words(c) for c in report['components'])}")
    lines.extend(_text_lines(report, extra_keys))
    lines.append(f"single_entry_single_exit: {_bool(report['single_entry_single_exit'])}")
    if report["single_entry_single_exit"]:
        lines.append(f"entry: {report['entry']}")
        lines.append(f"exit: {report['exit']}")
    lines.append(f"structured: {_bool(report['structured'])}")
    if report["reduction"]:
        steps = (f"{c['kind']}({','.join(map(str, c['nodes']))})" for c in report["reduction"])
        lines.append(f"reduction: {' '.join(steps)}")
    if report["structured"] is False:
        lines.append(f"residual_nodes: {_words(report['residual_nodes'])}")
        lines.append(f"residual_edges: {_words(f'{a}->{b}' for a, b in report['residual_edges'])}")
    paths = report["basis_paths"]
    if paths is None:
        lines.append("basis_paths: n/a")
    else:
        lines.append(f"basis_paths: {len(paths)}")
        lines.extend(f"path {i}: {_words(p)}" for i, p in enumerate(paths, start=1))
    return "\n".join(lines) + "\n"


def cmd_graph(args) -> str:
    g = graph_core.parse_graph_text(_read(args.path))
    if args.figure:
        from .plotting import plot_program_graph

        plot_program_graph(g, args.figure, title=Path(args.path).name)
    if args.format == "dot":
        return graph_core.to_dot(g)
    report = graph_report(g)
    if args.format == "json":
        return _dump_json(report)
    return render_graph_text(report)


def cmd_src(args) -> str:
    analysis = minilang.analyze_source(_read(args.path))
    g = analysis.graph
    if args.emit_graph:
        Path(args.emit_graph).write_text(graph_core.format_graph_text(g), encoding="utf-8")
    if args.dot:
        Path(args.dot).write_text(graph_core.to_dot(g), encoding="utf-8")
    if args.figure:
        from .plotting import plot_program_graph

        plot_program_graph(g, args.figure, title=Path(args.path).name)
    if args.format == "dot":
        return graph_core.to_dot(g)
    report = {"statements": minilang.count_statements(analysis.program)}
    report.update(graph_report(g))
    report["labels"] = dict(g.labels)
    if args.format == "json":
        return _dump_json(report)
    counts = report["statements"]
    text = render_graph_text(report)
    head = "statements: " + " ".join(f"{k}={v}" for k, v in counts.items())
    return head + "\n" + text


# -- logic --------------------------------------------------------------------


def _tf(value: bool) -> str:
    return "T" if value else "F"


def _logic_source(args) -> str:
    if args.expr is not None and args.file is not None:
        raise UsageError("give the expression inline or with --file, not both")
    if args.file is not None:
        return _read(args.file).strip()
    if args.expr is None:
        raise UsageError("no expression given")
    return args.expr


def _read_premises(path) -> list:
    premises = []
    for raw in _read(path).splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            premises.append(proplogic.parse_expr(line))
    return premises


def cmd_logic(args) -> str:
    if args.format == "dot":
        raise UsageError("--format dot is only valid for graph, src and statechart")
    source = _logic_source(args)
    expr = proplogic.parse_expr(source)
    cap = args.cap

    if args.entails is not None:
        premises = _read_premises(args.entails)
        verdict = proplogic.entails(premises, expr, cap=cap)
        witness = None if verdict else proplogic.counterexample(premises, expr, cap=cap)
        report = {
            "premises": [proplogic.format_expr(p) for p in premises],
            "conclusion": proplogic.format_expr(expr),
            "variables": list(proplogic.joint_variables(premises + [expr])),
            "entailed": verdict,
            "counterexample": witness,
        }
        if args.format == "json":
            return _dump_json(report)
        lines = [f"premise: {p}" for p in report["premises"]]
        lines.append(f"conclusion: {report['conclusion']}")
        lines.append("ENTAILED" if verdict else "NOT ENTAILED")
        if witness is not None:
            lines.append("counterexample: " + " ".join(f"{k}={_tf(v)}" for k, v in witness.items()))
        return "\n".join(lines) + "\n"

    if args.decompose:
        d = proplogic.decompose(expr)
        report = {
            "expression": proplogic.format_expr(expr),
            "elements": list(d.elements),
            "truth_function": proplogic.format_expr(d.truth_function),
            "correspondence": [[name, proplogic.placeholder(k)] for name, k in d.correspondence],
            "bijective": d.is_bijective(),
        }
        if args.format == "json":
            return _dump_json(report)
        params = ", ".join(d.placeholders)
        lines = [
            f"expression: {report['expression']}",
            f"elements: {{{', '.join(d.elements)}}}",
            f"truth_function: f({params}) = {report['truth_function']}",
            "correspondence: {" + ", ".join(f"({n}, {x})" for n, x in report["correspondence"]) + "}",
        ]
        return "\n".join(lines) + "\n"

    if args.check:
        report = {
            "expression": proplogic.format_expr(expr),
            "variables": list(proplogic.variables(expr)),
            "tautology": proplogic.is_tautology(expr, cap=cap),
            "satisfiable": proplogic.is_satisfiable(expr, cap=cap),
        }
        if args.format == "json":
            return _dump_json(report)
        return "\n".join(_text_lines(report, report)) + "\n"

    table = proplogic.truth_table(expr, cap=cap)
    if args.format == "json":
        report = {"expression": proplogic.format_expr(expr)}
        report.update(table.to_dict())
        return _dump_json(report)
    lines = [" ".join(table.variables + ("result",))]
    for assignment, result in table.iter_rows():
        lines.append(" ".join(_tf(v) for v in assignment + (result,)))
    return "\n".join(lines) + "\n"


# -- regions ------------------------------------------------------------------


def regions_report(model: behaviors.SptModel) -> dict:
    report = behaviors.classify(model)
    out = {
        "universe": list(model.universe),
        "S": model.ordered(model.S),
        "P": model.ordered(model.P),
        "T": model.ordered(model.T),
        "regions": {str(k): model.ordered(report[k]) for k in range(1, 9)},
        "omission": model.ordered(behaviors.faults_of_omission(model)),
        "commission": model.ordered(behaviors.faults_of_commission(model)),
        "correct": model.ordered(behaviors.correct_portion(model)),
        "methods": None,
    }
    if model.tests is not None:
        methods = {}
        for kind in (behaviors.FUNCTIONAL, behaviors.STRUCTURAL):
            profile = behaviors.MethodProfile("tests", kind, model.tests)
            v = behaviors.validate_method(profile, model)
            methods[kind] = {
                "passed": v.passed,
                "violations": model.ordered(v.violations),
                "gaps": model.ordered(v.gaps),
            }
        out["methods"] = {
            "test_cases": len(model.tests),
            "tests": {name: model.ordered(ids) for name, ids in model.tests.items()},
            "redundant": model.ordered(behaviors.redundant_behaviors(model.tests)),
            **methods,
        }
    return out


def _set(items) -> str:
    return "{" + ", ".join(str(x) for x in items) + "}"


def render_regions_text(report: dict) -> str:
    lines = [f"{key}: {_set(report[key])}" for key in ("universe", "S", "P", "T")]
    for k in range(1, 9):
        lines.append(f"region{k}: {_set(report['regions'][str(k)])}")
    for key in ("omission", "commission", "correct"):
        lines.append(f"{key}: {_set(report[key])}")
    methods = report["methods"]
    if methods is not None:
        lines.append(f"test_cases: {methods['test_cases']}")
        lines.append(f"redundant: {_set(methods['redundant'])}")
        for kind in (behaviors.FUNCTIONAL, behaviors.STRUCTURAL):
            v = methods[kind]
            verdict = "PASS" if v["passed"] else "FAIL"
            lines.append(f"{kind}: {verdict} violations={_set(v['violations'])} gaps={_set(v['gaps'])}")
    return "\n".join(lines) + "\n"


def cmd_regions(args) -> str:
    if args.format == "dot":
        raise UsageError("--format dot is only valid for graph, src and statechart")
    model = behaviors.SptModel.from_json(_read_json(args.path))
    if args.figure:
        from .plotting import plot_regions

        plot_regions(model, behaviors.classify(model), args.figure)
    report = regions_report(model)
    if args.format == "json":
        return _dump_json(report)
    return render_regions_text(report)


# -- statechart ---------------------------------------------------------------


def cmd_statechart(args) -> str:
    chart = statechart.Statechart.from_json(_read_json(args.path))
    fsm = statechart.flatten(chart)
    if args.run is not None:
        if args.format == "dot":
            raise UsageError("--format dot cannot render a run trace")
        trace = statechart.run(fsm, args.run)
        if args.format == "json":
            return _dump_json({"labels": list(args.run), "trace": trace})
        return f"trace: {_words(trace)}\n"
    if args.format == "dot":
        return graph_core.to_dot(statechart.fsm_to_graph(fsm))
    report = statechart.fsm_to_dict(fsm)
    if args.format == "json":
        return _dump_json(report)
    lines = [
        f"states: {_words(fsm.states)}",
        f"initial: {fsm.initial}",
        f"transitions: {len(fsm.transitions)}",
    ]
    lines.extend(f"{s} --{l}--> {d}" for s, l, d in fsm.transitions)
    return "\n".join(lines) + "\n"


# -- entry point --------------------------------------------------------------


def _common(parser, suppress=False):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--format", choices=FORMATS, default=default, help="output format (default: text)")
    parser.add_argument("--out", metavar="PATH", default=default, help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="testcalc", description="Discrete-math toolkit for software testing.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _common(parser)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("graph", help="metrics, structuredness and basis paths of a graph file")
    p.add_argument("path")
    p.add_argument("--figure", metavar="FILE", help="also draw the graph to an image file")
    _common(p, suppress=True)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("src", help="analyze a minilang source file")
    p.add_argument("path")
    p.add_argument("--emit-graph", metavar="FILE", help="write the CFG in graph text format")
    p.add_argument("--dot", metavar="FILE", help="write the CFG as DOT")
    p.add_argument("--figure", metavar="FILE", help="also draw the CFG to an image file")
    _common(p, suppress=True)
    p.set_defaults(func=cmd_src)

    p = sub.add_parser("logic", help="truth tables, decomposition and entailment")
    p.add_argument("expr", nargs="?", help="expression (quote it for the shell)")
    p.add_argument("--file", metavar="PATH", help="read the expression from a file")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--table", action="store_true", help="print the truth table (default)")
    mode.add_argument("--decompose", action="store_true", help="print elements, truth function, correspondence")
    mode.add_argument("--entails", metavar="PREMISES", help="file of premises, one per line; EXPR is the conclusion")
    mode.add_argument("--check", action="store_true", help="report tautology and satisfiability")
    p.add_argument("--cap", type=int, default=proplogic.DEFAULT_VARIABLE_CAP, help="maximum variable count")
    _common(p, suppress=True)
    p.set_defaults(func=cmd_logic)

    p = sub.add_parser("regions", help="classify an S/P/T JSON model into its eight regions")
    p.add_argument("path")
    p.add_argument("--figure", metavar="FILE", help="also draw the region diagram to an image file")
    _common(p, suppress=True)
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("statechart", help="flatten or run a statechart JSON file")
    p.add_argument("path")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--flatten", action="store_true", help="print the flat FSM (default)")
    mode.add_argument("--run", nargs="*", metavar="LABEL", help="run the flat FSM over these labels")
    _common(p, suppress=True)
    p.set_defaults(func=cmd_statechart)
    return parser


def exit_code(exc: TestcalcError) -> int:
    if isinstance(exc, ResourceLimitError):
        return 3
    if isinstance(exc, InputError):
        return 2
    if isinstance(exc, AnalysisError):
        return 1
    return 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.format = args.format or "text"
    if args.format == "dot" and args.command not in DOT_COMMANDS:
        print(f"testcalc: error: --format dot is not valid for {args.command}", file=sys.stderr)
        return 2
    try:
        output = args.func(args)
    except TestcalcError as exc:
        print(f"testcalc: error: {exc}", file=sys.stderr)
        return exit_code(exc)
    except OSError as exc:
        print(f"testcalc: error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        Path(args.out).write_text(output, encoding="utf-8")
    else:
        sys.stdout.write(output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
