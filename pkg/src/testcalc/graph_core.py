"""Program graphs and their structural metrics.

A :class:`ProgramGraph` is an immutable directed graph whose nodes stand for
statements and whose edges mean "may execute immediately after".  The module
computes connected components, circuit rank (``e - n + p``), McCabe
complexity (``e - n + 2p``), source/sink sets, a basis-path set and a
structuredness verdict obtained by collapsing sequence/if/loop patterns.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Hashable, Iterable, Mapping, NamedTuple, Sequence

from .errors import AnalysisError, InputError

NodeId = Hashable
Edge = tuple  # (src, dst)


class GraphError(InputError):
    """Raised when a graph violates its construction invariants."""


class DuplicateEdge(GraphError):
    def __init__(self, edge):
        self.edge = edge
        super().__init__(f"duplicate edge {edge[0]!r} -> {edge[1]!r}")


class UnknownNode(GraphError):
    def __init__(self, node):
        self.node = node
        super().__init__(f"edge endpoint {node!r} is not a node of the graph")


class GraphFormatError(GraphError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class NotSingleEntryExit(AnalysisError):
    """The graph lacks a unique entry/exit pair that every node lies between."""


class ProgramGraph:
    """Immutable directed graph with ordered nodes and edges.

    Node and edge order is insertion order and is significant: it drives the
    deterministic choices made by :func:`basis_paths` and :func:`to_dot`.
    Self-loops are allowed; duplicate edges are rejected.
    """

    __slots__ = ("_nodes", "_edges", "_labels", "_edge_labels", "_succ", "_pred", "_index")

    def __init__(
        self,
        nodes: Iterable[NodeId] = (),
        edges: Iterable[Edge] = (),
        labels: Mapping[NodeId, str] | None = None,
        edge_labels: Mapping[Edge, str] | None = None,
    ):
        nodes = tuple(nodes)
        index = {}
        for node in nodes:
            if node in index:
                raise GraphError(f"duplicate node {node!r}")
            index[node] = len(index)
        succ = {n: [] for n in nodes}
        pred = {n: [] for n in nodes}
        seen = set()
        ordered = []
        for src, dst in edges:
            for end in (src, dst):
                if end not in index:
                    raise UnknownNode(end)
            if (src, dst) in seen:
                raise DuplicateEdge((src, dst))
            seen.add((src, dst))
            ordered.append((src, dst))
            succ[src].append(dst)
            pred[dst].append(src)
        labels = dict(labels or {})
        for node in labels:
            if node not in index:
                raise UnknownNode(node)
        edge_labels = dict(edge_labels or {})
        for edge in edge_labels:
            if edge not in seen:
                raise GraphError(f"edge label for missing edge {edge!r}")

        self._nodes = nodes
        self._edges = tuple(ordered)
        self._labels = MappingProxyType(labels)
        self._edge_labels = MappingProxyType(edge_labels)
        self._succ = {n: tuple(v) for n, v in succ.items()}
        self._pred = {n: tuple(v) for n, v in pred.items()}
        self._index = index

    @classmethod
    def from_edges(cls, edges: Iterable[Edge], nodes: Iterable[NodeId] = (), **kwargs) -> "ProgramGraph":
        """Build a graph whose nodes are ``nodes`` followed by any new edge endpoints."""
        edges = list(edges)
        order = dict.fromkeys(nodes)
        for src, dst in edges:
            order.setdefault(src)
            order.setdefault(dst)
        return cls(order, edges, **kwargs)

    @property
    def nodes(self) -> tuple:
        return self._nodes

    @property
    def edges(self) -> tuple:
        return self._edges

    @property
    def labels(self) -> Mapping[NodeId, str]:
        return self._labels

    @property
    def edge_labels(self) -> Mapping[Edge, str]:
        return self._edge_labels

    def successors(self, node) -> tuple:
        return self._succ[node]

    def predecessors(self, node) -> tuple:
        return self._pred[node]

    def out_degree(self, node) -> int:
        return len(self._succ[node])

    def in_degree(self, node) -> int:
        return len(self._pred[node])

    def has_edge(self, src, dst) -> bool:
        return dst in self._succ.get(src, ())

    def __contains__(self, node) -> bool:
        return node in self._index

    def __len__(self) -> int:
        return len(self._nodes)

    def __eq__(self, other):
        if not isinstance(other, ProgramGraph):
            return NotImplemented
        return (
            self._nodes == other._nodes
            and self._edges == other._edges
            and dict(self._labels) == dict(other._labels)
            and dict(self._edge_labels) == dict(other._edge_labels)
        )

    def __hash__(self):
        return hash((self._nodes, self._edges))

    def __repr__(self):
        return f"ProgramGraph(nodes={len(self._nodes)}, edges={len(self._edges)})"


@dataclass(frozen=True)
class Path:
    nodes: tuple

    def __post_init__(self):
        if not self.nodes:
            raise ValueError("a path needs at least one node")

    @property
    def edges(self) -> tuple:
        return tuple(zip(self.nodes, self.nodes[1:]))

    def __iter__(self):
        return iter(self.nodes)

    def __len__(self):
        return len(self.nodes)


@dataclass(frozen=True)
class GraphMetrics:
    n: int
    e: int
    p: int
    circuit_rank: int
    mccabe: int


class Sese(NamedTuple):
    ok: bool
    entry: NodeId | None = None
    exit: NodeId | None = None


# -- components and counting ------------------------------------------------


def connected_components(g: ProgramGraph) -> list[tuple]:
    """Partition nodes into weakly connected components.

    Components are ordered by their first node and list nodes in graph order.
    """
    parent = {n: n for n in g.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for src, dst in g.edges:
        a, b = find(src), find(dst)
        if a != b:
            parent[b] = a
    groups: dict = {}
    for node in g.nodes:
        groups.setdefault(find(node), []).append(node)
    return [tuple(members) for members in groups.values()]


def component_count(g: ProgramGraph) -> int:
    return len(connected_components(g))


def circuit_rank(g: ProgramGraph) -> int:
    return len(g.edges) - len(g.nodes) + component_count(g)


def mccabe_complexity(g: ProgramGraph) -> int:
    return len(g.edges) - len(g.nodes) + 2 * component_count(g)


def metrics(g: ProgramGraph) -> GraphMetrics:
    n, e, p = len(g.nodes), len(g.edges), component_count(g)
    return GraphMetrics(n=n, e=e, p=p, circuit_rank=e - n + p, mccabe=e - n + 2 * p)


def source_nodes(g: ProgramGraph) -> tuple:
    return tuple(n for n in g.nodes if g.in_degree(n) == 0)


def sink_nodes(g: ProgramGraph) -> tuple:
    return tuple(n for n in g.nodes if g.out_degree(n) == 0)


def _reach(start, step) -> set:
    seen = {start}
    todo = [start]
    while todo:
        for nxt in step(todo.pop()):
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return seen


def is_single_entry_single_exit(g: ProgramGraph) -> Sese:
    sources, sinks = source_nodes(g), sink_nodes(g)
    if len(sources) != 1 or len(sinks) != 1:
        return Sese(False)
    entry, exit_ = sources[0], sinks[0]
    if entry == exit_ and len(g.nodes) != 1:
        return Sese(False)
    forward = _reach(entry, g.successors)
    backward = _reach(exit_, g.predecessors)
    if len(forward) != len(g.nodes) or len(backward) != len(g.nodes):
        return Sese(False)
    return Sese(True, entry, exit_)


def _require_sese(g: ProgramGraph) -> Sese:
    sese = is_single_entry_single_exit(g)
    if not sese.ok:
        raise NotSingleEntryExit("graph must have one entry, one exit, and every node between them")
    return sese


# -- basis paths ------------------------------------------------------------


class _RowSpace:
    """Incremental exact row reduction over the rationals."""

    def __init__(self):
        self._rows: list[tuple[int, dict]] = []  # (pivot column, sparse row)

    def __len__(self):
        return len(self._rows)

    def add(self, vector: Mapping[int, int]) -> bool:
        row = {k: Fraction(v) for k, v in vector.items() if v}
        for pivot, basis in self._rows:
            factor = row.get(pivot)
            if factor:
                for col, val in basis.items():
                    updated = row.get(col, 0) - factor * val
                    if updated:
                        row[col] = updated
                    else:
                        row.pop(col, None)
        if not row:
            return False
        pivot = min(row)
        lead = row[pivot]
        row = {k: v / lead for k, v in row.items()}
        # keep the stored rows fully reduced on the new pivot
        for i, (p, basis) in enumerate(self._rows):
            factor = basis.get(pivot)
            if factor:
                for col, val in row.items():
                    updated = basis.get(col, 0) - factor * val
                    if updated:
                        basis[col] = updated
                    else:
                        basis.pop(col, None)
        self._rows.append((pivot, row))
        return True


def _first_simple_path(g: ProgramGraph, start, is_goal) -> list:
    """Depth-first search preferring earlier edges; returns the first simple path to a goal."""
    path = [start]
    on_path = {start}
    iters = [iter(g.successors(start))]
    if is_goal(start):
        return path
    while iters:
        for nxt in iters[-1]:
            if nxt in on_path:
                continue
            path.append(nxt)
            on_path.add(nxt)
            if is_goal(nxt):
                return path
            iters.append(iter(g.successors(nxt)))
            break
        else:
            iters.pop()
            on_path.discard(path.pop())
    raise NotSingleEntryExit(f"no path from {start!r} reaches the exit")


def basis_paths(g: ProgramGraph) -> list[Path]:
    """Return ``mccabe_complexity(g)`` entry-to-exit paths with independent edge vectors.

    The first path is the baseline: the first simple entry-to-exit path found
    by depth-first search over edges in insertion order.  Further candidates
    take the path to a node, flip to a different outgoing edge and then finish
    along a fixed completion tree that contains the baseline.  Candidates are
    tried in discovery order and kept only when they raise the rank.
    """
    _, entry, exit_ = _require_sese(g)
    baseline = _first_simple_path(g, entry, lambda n: n == exit_)
    completion = {node: tuple(baseline[i:]) for i, node in enumerate(baseline)}

    def complete(node) -> tuple:
        if node not in completion:
            head = _first_simple_path(g, node, lambda n: n in completion)
            tail = completion[head[-1]]
            for i in range(len(head) - 1, -1, -1):
                completion[head[i]] = tuple(head[i:-1]) + tail
        return completion[node]

    edge_col = {edge: i for i, edge in enumerate(g.edges)}

    def vector(nodes) -> dict:
        counts: dict = {}
        for edge in zip(nodes, nodes[1:]):
            col = edge_col[edge]
            counts[col] = counts.get(col, 0) + 1
        return counts

    target = mccabe_complexity(g)
    space = _RowSpace()
    space.add(vector(baseline))
    found = [tuple(baseline)]
    queue = deque(found)
    seen = {tuple(baseline)}
    while queue and len(found) < target:
        walk = queue.popleft()
        visited = set()
        for i, node in enumerate(walk):
            if node in visited:
                continue
            visited.add(node)
            taken = walk[i + 1] if i + 1 < len(walk) else None
            for nxt in g.successors(node):
                if nxt == taken:
                    continue
                candidate = walk[: i + 1] + complete(nxt)
                if candidate in seen:
                    continue
                seen.add(candidate)
                queue.append(candidate)
                if space.add(vector(candidate)):
                    found.append(candidate)
                    if len(found) == target:
                        break
            if len(found) == target:
                break
    return [Path(p) for p in found]


# -- structuredness ---------------------------------------------------------


PREDICATE_COLLAPSES = frozenset({"if-then-else", "if-then", "while", "self-loop"})


@dataclass(frozen=True)
class Collapse:
    kind: str
    nodes: tuple  # (kept node, *removed nodes)


@dataclass(frozen=True)
class StructureResult:
    structured: bool
    trace: tuple
    residual: ProgramGraph

    @property
    def predicate_collapses(self) -> int:
        return sum(1 for c in self.trace if c.kind in PREDICATE_COLLAPSES)

    def __bool__(self):
        return self.structured


class _Reducer:
    def __init__(self, g: ProgramGraph):
        self.order = list(g.nodes)
        self.succ = {n: list(g.successors(n)) for n in g.nodes}
        self.pred = {n: list(g.predecessors(n)) for n in g.nodes}
        self.labels = dict(g.labels)

    def remove_edge(self, a, b):
        self.succ[a].remove(b)
        self.pred[b].remove(a)

    def add_edge(self, a, b):
        self.succ[a].append(b)
        self.pred[b].append(a)

    def remove_node(self, n):
        for s in list(self.succ[n]):
            self.remove_edge(n, s)
        for p in list(self.pred[n]):
            self.remove_edge(p, n)
        del self.succ[n], self.pred[n]
        self.order.remove(n)

    def graph(self) -> ProgramGraph:
        edges = [(a, b) for a in self.order for b in self.succ[a]]
        return ProgramGraph(self.order, edges, {n: t for n, t in self.labels.items() if n in self.succ})

    def _arm(self, a, t):
        """True if ``a`` is a single-statement arm hanging off ``t``."""
        return a != t and self.pred[a] == [t] and len(self.succ[a]) == 1 and self.succ[a][0] != a

    def step(self):
        for t in self.order:
            out = self.succ[t]
            # sequence: t -> b, t has one successor and b one predecessor
            if len(out) == 1:
                b = out[0]
                if b != t and self.pred[b] == [t]:
                    moved = list(self.succ[b])
                    self.remove_node(b)
                    for s in moved:
                        self.add_edge(t, t if s == b else s)
                    return Collapse("sequence", (t, b))
                continue
            if len(out) != 2:
                continue
            a, b = out
            if t in out:
                self.remove_edge(t, t)
                return Collapse("self-loop", (t,))
            for body, other in ((a, b), (b, a)):
                if self._arm(body, t) and self.succ[body][0] == t:
                    self.remove_node(body)
                    return Collapse("while", (t, body))
            if self._arm(a, t) and self._arm(b, t):
                join = self.succ[a][0]
                if join == self.succ[b][0] and join != t:
                    self.remove_node(a)
                    self.remove_node(b)
                    self.add_edge(t, join)
                    return Collapse("if-then-else", (t, a, b))
            for arm, join in ((a, b), (b, a)):
                if self._arm(arm, t) and self.succ[arm][0] == join and join != t:
                    self.remove_node(arm)
                    return Collapse("if-then", (t, arm))
        return None


def is_structured(g: ProgramGraph) -> StructureResult:
    """Collapse structured patterns until a fixpoint; structured iff one node remains."""
    _require_sese(g)
    reducer = _Reducer(g)
    trace = []
    while (collapse := reducer.step()) is not None:
        trace.append(collapse)
    residual = reducer.graph()
    done = len(residual.nodes) == 1 and not residual.edges
    return StructureResult(done, tuple(trace), residual)


# -- text formats -----------------------------------------------------------


def _quote(value) -> str:
    text = str(value).replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{text}"'


def to_dot(g: ProgramGraph, name: str = "G") -> str:
    lines = [f"digraph {name} {{"]
    for node in g.nodes:
        if node in g.labels:
            lines.append(f"  {_quote(node)} [label={_quote(g.labels[node])}];")
        else:
            lines.append(f"  {_quote(node)};")
    for src, dst in g.edges:
        if (src, dst) in g.edge_labels:
            lines.append(f"  {_quote(src)} -> {_quote(dst)} [label={_quote(g.edge_labels[(src, dst)])}];")
        else:
            lines.append(f"  {_quote(src)} -> {_quote(dst)};")
    return "\n".join(lines) + "\n}\n"


def parse_graph_text(text: str) -> ProgramGraph:
    """Read the line-oriented ``node``/``edge`` graph format."""
    nodes: list = []
    labels: dict = {}
    edges: list = []
    declared: set = set()
    seen_edges: set = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, *rest = line.split(None, 1)
        args = rest[0] if rest else ""
        if keyword == "node":
            if not args:
                raise GraphFormatError(lineno, "node needs an id")
            node_id, *label = args.split(None, 1)
            if node_id in declared:
                raise GraphFormatError(lineno, f"node {node_id!r} declared twice")
            declared.add(node_id)
            nodes.append(node_id)
            if label:
                labels[node_id] = label[0]
        elif keyword == "edge":
            parts = args.split()
            if len(parts) != 2:
                raise GraphFormatError(lineno, "edge needs exactly two node ids")
            for end in parts:
                if end not in declared:
                    raise GraphFormatError(lineno, f"edge endpoint {end!r} is not a declared node")
            if tuple(parts) in seen_edges:
                raise GraphFormatError(lineno, f"duplicate edge {parts[0]} -> {parts[1]}")
            seen_edges.add(tuple(parts))
            edges.append(tuple(parts))
        else:
            raise GraphFormatError(lineno, f"unknown keyword {keyword!r}")
    return ProgramGraph(nodes, edges, labels)


def format_graph_text(g: ProgramGraph) -> str:
    lines = []
    for node in g.nodes:
        label = g.labels.get(node)
        lines.append(f"node {node} {label}" if label else f"node {node}")
    lines.extend(f"edge {src} {dst}" for src, dst in g.edges)
    return "\n".join(lines) + "\n"


def edge_vector(g: ProgramGraph, nodes: Sequence) -> list[int]:
    """Edge-incidence count vector of a walk, indexed by ``g.edges`` order."""
    col = {edge: i for i, edge in enumerate(g.edges)}
    vec = [0] * len(g.edges)
    for edge in zip(nodes, nodes[1:]):
        vec[col[edge]] += 1
    return vec
