"""Hierarchical statecharts (blobs within blobs) and their flattening.

Only OR-hierarchy is modelled: a blob is either a leaf state or a composite
holding child blobs.  A transition without a source is an initial marker for
the blob that contains its destination.  Flattening keeps the leaves as
states, fans a composite source out to all of its leaves, and sends a
composite destination down its chain of initial markers to a leaf.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .errors import AnalysisError, InputError
from .graph_core import ProgramGraph


class StatechartError(InputError):
    """A statechart diagnostic; ``validate`` returns these instead of raising."""


class MultipleParents(StatechartError):
    def __init__(self, blob, parents):
        self.blob, self.parents = blob, tuple(parents)
        super().__init__(f"blob {blob!r} is contained in more than one blob: {list(self.parents)}")


class ContainmentCycle(StatechartError):
    def __init__(self, blobs):
        self.blobs = tuple(blobs)
        super().__init__("containment cycle through " + " -> ".join(map(str, self.blobs)))


class MissingInitial(StatechartError):
    def __init__(self, blob):
        self.blob = blob
        super().__init__(f"composite blob {blob!r} needs exactly one initial marker, found none")


class ExtraInitial(StatechartError):
    def __init__(self, blob, count=None):
        self.blob, self.count = blob, count
        detail = f", found {count}" if count is not None else ""
        super().__init__(f"blob {blob!r} has an initial marker it cannot take{detail}")


class UnknownBlob(StatechartError):
    def __init__(self, blob, where):
        self.blob = blob
        super().__init__(f"{where} refers to unknown blob {blob!r}")


class DetachedBlob(StatechartError):
    def __init__(self, blob):
        self.blob = blob
        super().__init__(f"blob {blob!r} is not inside the root")


class MalformedTransition(StatechartError):
    pass


class NondeterministicTransition(StatechartError):
    def __init__(self, state, label, targets):
        self.state, self.label, self.targets = state, label, tuple(targets)
        super().__init__(f"state {state!r} has several {label!r} transitions: {list(self.targets)}")


class InvalidStatechart(StatechartError):
    def __init__(self, diagnostics):
        self.diagnostics = tuple(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class NoTransition(AnalysisError):
    def __init__(self, state, label):
        self.state, self.label = state, label
        super().__init__(f"no {label!r} transition from state {state!r}")


@dataclass(frozen=True)
class Transition:
    src: Optional[str]
    dst: str
    label: Optional[str] = None

    @property
    def is_initial(self) -> bool:
        return self.src is None


@dataclass(frozen=True)
class Statechart:
    blobs: Mapping[str, tuple]  # blob id -> child ids, in declaration order
    root: str
    transitions: tuple

    @classmethod
    def build(cls, blobs: Mapping[str, Sequence[str]], root: str, transitions) -> "Statechart":
        table: dict = {}
        for blob, children in blobs.items():
            table[blob] = tuple(children)
        for children in list(table.values()):
            for child in children:
                table.setdefault(child, ())
        trans = tuple(t if isinstance(t, Transition) else Transition(*t) for t in transitions)
        return cls(table, root, trans)

    @classmethod
    def from_json(cls, doc) -> "Statechart":
        if not isinstance(doc, Mapping):
            raise InputError("statechart document must be a JSON object")
        for key in ("blobs", "root", "transitions"):
            if key not in doc:
                raise InputError(f"statechart document is missing {key!r}")
        blobs = doc["blobs"]
        if not isinstance(blobs, Mapping) or not all(isinstance(v, list) for v in blobs.values()):
            raise InputError("'blobs' must map blob ids to lists of child ids")
        if not isinstance(doc["transitions"], list):
            raise InputError("'transitions' must be a list")
        transitions = []
        for item in doc["transitions"]:
            if not isinstance(item, Mapping) or "dst" not in item:
                raise InputError(f"malformed transition {item!r}")
            transitions.append(Transition(item.get("src"), item["dst"], item.get("label")))
        return cls.build(blobs, doc["root"], transitions)

    def children(self, blob) -> tuple:
        return self.blobs.get(blob, ())

    def is_leaf(self, blob) -> bool:
        return not self.blobs.get(blob)

    def parents(self) -> dict:
        parents: dict = {}
        for blob, children in self.blobs.items():
            for child in children:
                parents.setdefault(child, []).append(blob)
        return parents

    def leaves(self, blob=None) -> tuple:
        """Leaf descendants of ``blob`` (default: root) in depth-first declaration order."""
        start = self.root if blob is None else blob
        out, stack, seen = [], [start], set()
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            if self.is_leaf(node):
                out.append(node)
            else:
                stack.extend(reversed(self.children(node)))
        return tuple(out)

    def initial_child(self, blob) -> Optional[str]:
        parents = self.parents()
        for t in self.transitions:
            if t.is_initial and blob in parents.get(t.dst, ()):
                return t.dst
        return None


def validate(chart: Statechart) -> list[StatechartError]:
    """Return every diagnostic found; an empty list means the chart is valid."""
    diags: list[StatechartError] = []
    parents = chart.parents()
    if chart.root not in chart.blobs:
        diags.append(UnknownBlob(chart.root, "root"))
        return diags
    for blob, owners in parents.items():
        if len(owners) > 1:
            diags.append(MultipleParents(blob, owners))

    # cycles: walk parent links upward from every blob
    reported = set()
    for blob in chart.blobs:
        path, node = [], blob
        while node in parents and node not in path:
            path.append(node)
            node = parents[node][0]
        if node in path:
            cycle = path[path.index(node):]
            key = frozenset(cycle)
            if key not in reported:
                reported.add(key)
                diags.append(ContainmentCycle(cycle + [node]))
    if chart.root in parents:
        diags.append(MultipleParents(chart.root, parents[chart.root]))
    for blob in chart.blobs:
        if blob != chart.root and blob not in parents:
            diags.append(DetachedBlob(blob))
    if diags:
        return diags

    initials: dict = {}
    targets = {chart.root}
    for t in chart.transitions:
        for end, where in ((t.src, "transition source"), (t.dst, "transition destination")):
            if end is not None and end not in chart.blobs:
                diags.append(UnknownBlob(end, where))
        if t.is_initial:
            if t.label is not None:
                diags.append(MalformedTransition(f"initial marker to {t.dst!r} carries a label"))
            if t.dst == chart.root:
                diags.append(ExtraInitial(t.dst))
            elif t.dst in parents:
                initials.setdefault(parents[t.dst][0], []).append(t.dst)
        elif t.label is None:
            diags.append(MalformedTransition(f"transition {t.src!r} -> {t.dst!r} has no label"))
        targets.add(t.dst)
    if diags:
        return diags

    for blob in chart.blobs:
        found = initials.get(blob, [])
        if chart.is_leaf(blob):
            continue
        if len(found) > 1:
            diags.append(ExtraInitial(blob, len(found)))
        elif not found and blob in targets:
            diags.append(MissingInitial(blob))
    return diags


@dataclass(frozen=True)
class FlatFsm:
    states: tuple
    initial: str
    transitions: tuple  # (src, label, dst)
    provenance: tuple = ()  # index into the chart's transitions, per flat transition

    def __post_init__(self):
        states = set(self.states)
        if self.initial not in states:
            raise InputError(f"initial state {self.initial!r} is not a state")
        table: dict = {}
        for src, label, dst in self.transitions:
            if src not in states or dst not in states:
                raise InputError(f"transition {src!r} -> {dst!r} leaves the state set")
            if table.setdefault((src, label), dst) != dst:
                raise NondeterministicTransition(src, label, (table[(src, label)], dst))
        object.__setattr__(self, "_table", table)

    def step(self, state, label) -> str:
        try:
            return self._table[(state, label)]
        except KeyError:
            raise NoTransition(state, label) from None


def _descend(chart: Statechart, blob) -> str:
    seen = []
    while not chart.is_leaf(blob):
        if blob in seen:
            raise ContainmentCycle(seen + [blob])
        seen.append(blob)
        nxt = chart.initial_child(blob)
        if nxt is None:
            raise MissingInitial(blob)
        blob = nxt
    return blob


def flatten(chart: Statechart) -> FlatFsm:
    diags = validate(chart)
    if diags:
        raise InvalidStatechart(diags)
    flat: dict = {}
    for index, t in enumerate(chart.transitions):
        if t.is_initial:
            continue
        dst = _descend(chart, t.dst)
        for src in chart.leaves(t.src):
            flat.setdefault((src, t.label, dst), index)
    return FlatFsm(
        states=chart.leaves(),
        initial=_descend(chart, chart.root),
        transitions=tuple(flat),
        provenance=tuple(flat.values()),
    )


def run(fsm: FlatFsm, labels: Sequence[str]) -> list[str]:
    trace = [fsm.initial]
    for label in labels:
        trace.append(fsm.step(trace[-1], label))
    return trace


def fsm_to_graph(fsm: FlatFsm) -> ProgramGraph:
    """States become nodes; parallel transitions between two states share one labelled edge."""
    labels: dict = {}
    for src, label, dst in fsm.transitions:
        labels.setdefault((src, dst), []).append(label)
    return ProgramGraph(
        fsm.states,
        list(labels),
        edge_labels={edge: ",".join(names) for edge, names in labels.items()},
    )


def fsm_to_dict(fsm: FlatFsm) -> dict:
    return {
        "states": list(fsm.states),
        "initial": fsm.initial,
        "transitions": [{"src": s, "label": l, "dst": d} for s, l, d in fsm.transitions],
    }
