"""A tiny imperative language used to manufacture program graphs.

Grammar::

    program := stmt*
    stmt    := NAME '=' TEXT ';'
             | 'if' '(' COND ')' block ('else' block)?
             | 'while' '(' COND ')' block
             | 'goto' NAME ';'
             | NAME ':'
    block   := '{' stmt* '}'

Assignment right-hand sides and conditions are opaque text.  ``//`` starts a
comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from . import graph_core
from .errors import InputError
from .graph_core import GraphMetrics, ProgramGraph, Sese, StructureResult

KEYWORDS = frozenset({"if", "else", "while", "goto"})
ENTRY = "ENTRY"
EXIT = "EXIT"

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class LangSyntaxError(InputError):
    def __init__(self, line, col, expected):
        self.line, self.col, self.expected = line, col, expected
        super().__init__(f"line {line}, col {col}: expected {expected}")


class DuplicateLabel(InputError):
    def __init__(self, name, line, col):
        self.name, self.line, self.col = name, line, col
        super().__init__(f"line {line}, col {col}: label {name!r} defined twice")


class UndefinedGotoTarget(InputError):
    def __init__(self, name, line, col):
        self.name, self.line, self.col = name, line, col
        super().__init__(f"line {line}, col {col}: goto target {name!r} is not defined")


class GotoCycle(InputError):
    def __init__(self, names):
        self.names = tuple(names)
        super().__init__("gotos form a cycle with no statement in it: " + " -> ".join(self.names))


# -- AST ----------------------------------------------------------------------

_pos = dict(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Assign:
    target: str
    value: str
    line: int = field(**_pos)
    col: int = field(**_pos)

    @property
    def text(self) -> str:
        return f"{self.target} = {self.value}"


@dataclass(frozen=True)
class If:
    cond: str
    then: tuple
    orelse: Optional[tuple] = None
    line: int = field(**_pos)
    col: int = field(**_pos)


@dataclass(frozen=True)
class While:
    cond: str
    body: tuple
    line: int = field(**_pos)
    col: int = field(**_pos)


@dataclass(frozen=True)
class Goto:
    label: str
    line: int = field(**_pos)
    col: int = field(**_pos)


@dataclass(frozen=True)
class Label:
    name: str
    line: int = field(**_pos)
    col: int = field(**_pos)


Stmt = Union[Assign, If, While, Goto, Label]
EXECUTABLE = (Assign, If, While)


@dataclass(frozen=True)
class Program:
    stmts: tuple

    def walk(self):
        """Yield every statement in textual (pre-)order."""
        yield from _walk(self.stmts)


def _walk(stmts):
    for s in stmts:
        yield s
        if isinstance(s, If):
            yield from _walk(s.then)
            if s.orelse is not None:
                yield from _walk(s.orelse)
        elif isinstance(s, While):
            yield from _walk(s.body)


# -- parser -------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def where(self, pos=None):
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def fail(self, expected, pos=None):
        raise LangSyntaxError(*self.where(pos), expected)

    def skip(self):
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch.isspace():
                self.pos += 1
            elif text.startswith("//", self.pos):
                end = text.find("\n", self.pos)
                self.pos = len(text) if end < 0 else end
            else:
                break

    def peek(self, literal):
        self.skip()
        return self.text.startswith(literal, self.pos)

    def expect(self, literal):
        if not self.peek(literal):
            self.fail(repr(literal))
        self.pos += len(literal)

    def name(self):
        self.skip()
        m = _NAME.match(self.text, self.pos)
        if not m:
            self.fail("a name")
        self.pos = m.end()
        return m.group()

    def program(self) -> Program:
        stmts = self.stmts(top=True)
        return Program(tuple(stmts))

    def stmts(self, top=False):
        out = []
        while True:
            self.skip()
            if self.pos >= len(self.text):
                if not top:
                    self.fail("'}'")
                return out
            if self.text[self.pos] == "}":
                if top:
                    self.fail("a statement")
                return out
            out.append(self.stmt())

    def block(self):
        self.expect("{")
        body = self.stmts()
        self.expect("}")
        return tuple(body)

    def cond(self):
        self.expect("(")
        start = depth = self.pos
        depth = 1
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    text = self.text[start:self.pos].strip()
                    self.pos += 1
                    if not text:
                        self.fail("a condition", start)
                    return text
            self.pos += 1
        self.fail("')'")

    def stmt(self) -> Stmt:
        self.skip()
        start = self.pos
        line, col = self.where()
        word = self.name()
        if word == "if":
            cond = self.cond()
            then = self.block()
            orelse = None
            if self._keyword("else"):
                orelse = self.block()
            return If(cond, then, orelse, line=line, col=col)
        if word == "while":
            cond = self.cond()
            return While(cond, self.block(), line=line, col=col)
        if word == "goto":
            target = self.name()
            if target in KEYWORDS:
                self.fail("a label name", self.pos - len(target))
            self.expect(";")
            return Goto(target, line=line, col=col)
        if word in KEYWORDS:
            self.fail("a statement", start)
        if self.peek(":"):
            self.pos += 1
            return Label(word, line=line, col=col)
        self.expect("=")
        end = self.pos
        while end < len(self.text) and self.text[end] not in ";\n":
            end += 1
        if end >= len(self.text) or self.text[end] != ";":
            self.fail("';'", end)
        value = self.text[self.pos:end].strip()
        if not value:
            self.fail("an expression", self.pos)
        self.pos = end + 1
        return Assign(word, value, line=line, col=col)

    def _keyword(self, word):
        self.skip()
        m = _NAME.match(self.text, self.pos)
        if m and m.group() == word:
            self.pos = m.end()
            return True
        return False


def parse_program(text: str) -> Program:
    """Parse source text, then check labels and goto targets."""
    program = _Parser(text).program()
    labels = {}
    for stmt in program.walk():
        if isinstance(stmt, Label):
            if stmt.name in labels:
                raise DuplicateLabel(stmt.name, stmt.line, stmt.col)
            labels[stmt.name] = stmt
    for stmt in program.walk():
        if isinstance(stmt, Goto) and stmt.label not in labels:
            raise UndefinedGotoTarget(stmt.label, stmt.line, stmt.col)
    _GraphBuilder(program).build()  # rejects statement-free goto cycles
    return program


def pretty_print(program: Program, indent: str = "    ") -> str:
    lines: list[str] = []

    def emit(stmts, depth):
        pad = indent * depth
        for s in stmts:
            if isinstance(s, Assign):
                lines.append(f"{pad}{s.text};")
            elif isinstance(s, Goto):
                lines.append(f"{pad}goto {s.label};")
            elif isinstance(s, Label):
                lines.append(f"{pad}{s.name}:")
            elif isinstance(s, While):
                lines.append(f"{pad}while ({s.cond}) {{")
                emit(s.body, depth + 1)
                lines.append(f"{pad}}}")
            else:
                lines.append(f"{pad}if ({s.cond}) {{")
                emit(s.then, depth + 1)
                if s.orelse is not None:
                    lines.append(f"{pad}}} else {{")
                    emit(s.orelse, depth + 1)
                lines.append(f"{pad}}}")

    emit(program.stmts, 0)
    return "\n".join(lines) + ("\n" if lines else "")


# -- program graph ------------------------------------------------------------


@dataclass(frozen=True)
class _Ref:
    """Placeholder for the statement a label resolves to."""

    label: str


class _GraphBuilder:
    def __init__(self, program: Program):
        self.program = program
        self.ids: dict[int, str] = {}
        self.labels: dict[str, str] = {}
        self.order: list = [ENTRY]
        for stmt in program.walk():
            if isinstance(stmt, EXECUTABLE):
                node = f"s{len(self.ids) + 1}"
                self.ids[id(stmt)] = node
                self.order.append(node)
                if isinstance(stmt, Assign):
                    self.labels[node] = stmt.text
                elif isinstance(stmt, If):
                    self.labels[node] = f"if ({stmt.cond})"
                else:
                    self.labels[node] = f"while ({stmt.cond})"
        self.order.append(EXIT)
        self.rank = {node: i for i, node in enumerate(self.order)}
        self.label_target: dict = {}
        self.pending: list = []  # (src, branch, target-or-ref)

    def block(self, stmts, cont):
        nxt = cont
        for stmt in reversed(stmts):
            nxt = self.stmt(stmt, nxt)
        return nxt

    def stmt(self, s, nxt):
        if isinstance(s, Label):
            self.label_target[s.name] = nxt
            return nxt
        if isinstance(s, Goto):
            return _Ref(s.label)
        node = self.ids[id(s)]
        if isinstance(s, Assign):
            self.pending.append((node, 0, nxt))
        elif isinstance(s, If):
            orelse = self.block(s.orelse, nxt) if s.orelse is not None else nxt
            then = self.block(s.then, nxt)
            self.pending.append((node, 0, then))
            self.pending.append((node, 1, orelse))
        else:
            body = self.block(s.body, node)
            self.pending.append((node, 0, body))
            self.pending.append((node, 1, nxt))
        return node

    def resolve(self, target):
        chain = []
        while isinstance(target, _Ref):
            if target.label in chain:
                raise GotoCycle(chain[chain.index(target.label):] + [target.label])
            chain.append(target.label)
            target = self.label_target[target.label]
        return target

    def build(self) -> ProgramGraph:
        first = self.block(self.program.stmts, EXIT)
        self.pending.append((ENTRY, 0, first))
        edges = {}
        for src, branch, target in sorted(self.pending, key=lambda p: (self.rank[p[0]], p[1])):
            edges.setdefault((src, self.resolve(target)), None)
        return ProgramGraph(self.order, list(edges), self.labels)


def build_program_graph(program: Program) -> ProgramGraph:
    """Translate a program into its control-flow graph.

    Every Assign, If test and While test becomes a node ``s1, s2, ...`` in
    textual order, bracketed by synthetic ``ENTRY`` and ``EXIT`` nodes.  Gotos
    and labels produce no nodes; a goto redirects the edge that would have
    entered it.  Branches that resolve to the same successor share one edge.
    """
    return _GraphBuilder(program).build()


@dataclass(frozen=True)
class SourceAnalysis:
    program: Program
    graph: ProgramGraph
    metrics: GraphMetrics
    sese: Sese
    structure: Optional[StructureResult]

    @property
    def structured(self) -> Optional[bool]:
        return None if self.structure is None else self.structure.structured

    @property
    def residual(self) -> Optional[ProgramGraph]:
        if self.structure is None or self.structure.structured:
            return None
        return self.structure.residual


def count_statements(program: Program) -> dict[str, int]:
    counts = {"assign": 0, "if": 0, "while": 0, "goto": 0, "label": 0}
    names = {Assign: "assign", If: "if", While: "while", Goto: "goto", Label: "label"}
    for stmt in program.walk():
        counts[names[type(stmt)]] += 1
    return counts


def analyze_source(text: str) -> SourceAnalysis:
    program = parse_program(text)
    graph = build_program_graph(program)
    sese = graph_core.is_single_entry_single_exit(graph)
    structure = graph_core.is_structured(graph) if sese.ok else None
    return SourceAnalysis(program, graph, graph_core.metrics(graph), sese, structure)
