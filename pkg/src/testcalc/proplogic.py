"""Propositional expressions, truth tables and truth-table entailment.

Syntax, loosest binding last::

    ~  &  |  ==>  <==>

``&`` and ``|`` associate to the left, ``==>`` and ``<==>`` to the right.
Variables are ordered by first occurrence in the text; truth-table rows
count in binary with the first variable most significant and false first.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence, Union

import numpy as np

from .errors import InputError, ResourceLimitError

DEFAULT_VARIABLE_CAP = 24
_CHUNK = 1 << 16


class ExprSyntaxError(InputError):
    def __init__(self, position, expected):
        self.position, self.expected = position, expected
        super().__init__(f"position {position}: expected {expected}")


class UnboundVariable(InputError, KeyError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"no value for variable {name!r}")

    def __str__(self):
        return self.args[0]


class VariableLimitExceeded(ResourceLimitError):
    def __init__(self, count, cap):
        self.count, self.cap = count, cap
        super().__init__(f"{count} variables exceed the cap of {cap}")


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    operand: "BoolExpr"


@dataclass(frozen=True)
class And:
    left: "BoolExpr"
    right: "BoolExpr"


@dataclass(frozen=True)
class Or:
    left: "BoolExpr"
    right: "BoolExpr"


@dataclass(frozen=True)
class Implies:
    left: "BoolExpr"
    right: "BoolExpr"


@dataclass(frozen=True)
class Iff:
    left: "BoolExpr"
    right: "BoolExpr"


BoolExpr = Union[Var, Not, And, Or, Implies, Iff]
BINARY = (And, Or, Implies, Iff)

_SYMBOL = {And: "&", Or: "|", Implies: "==>", Iff: "<==>"}
_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5, Var: 6}
_RIGHT_ASSOC = (Implies, Iff)

_TOKEN = re.compile(r"\s*(?:(<==>|==>|[~&|()])|([A-Za-z_][A-Za-z0-9_]*))")


# -- parsing ------------------------------------------------------------------


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExprSyntaxError(pos, "an operator, parenthesis or variable")
        start = m.start(1) if m.group(1) else m.start(2)
        if m.group(1):
            tokens.append(("op", m.group(1), start))
        else:
            tokens.append(("name", m.group(2), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _ExprParser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, value):
        kind, val, _ = self.peek()
        if kind == "op" and val == value:
            self.i += 1
            return True
        return False

    def parse(self):
        expr = self.iff()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(pos, "an operator or end of input")
        return expr

    def iff(self):
        left = self.implies()
        if self.take("<==>"):
            return Iff(left, self.iff())
        return left

    def implies(self):
        left = self.disjunction()
        if self.take("==>"):
            return Implies(left, self.implies())
        return left

    def disjunction(self):
        expr = self.conjunction()
        while self.take("|"):
            expr = Or(expr, self.conjunction())
        return expr

    def conjunction(self):
        expr = self.unary()
        while self.take("&"):
            expr = And(expr, self.unary())
        return expr

    def unary(self):
        if self.take("~"):
            return Not(self.unary())
        kind, val, pos = self.peek()
        if kind == "name":
            self.i += 1
            return Var(val)
        if self.take("("):
            inner = self.iff()
            if not self.take(")"):
                raise ExprSyntaxError(self.peek()[2], "')'")
            return inner
        raise ExprSyntaxError(pos, "a variable, '~' or '('")


def parse_expr(text: str) -> BoolExpr:
    return _ExprParser(text).parse()


def format_expr(e: BoolExpr) -> str:
    """Render with the fewest parentheses that re-parse to the same tree."""
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Not):
        inner = format_expr(e.operand)
        return "~" + (f"({inner})" if isinstance(e.operand, BINARY) else inner)
    op = type(e)
    prec = _PREC[op]
    left, right = format_expr(e.left), format_expr(e.right)
    lp, rp = _PREC[type(e.left)], _PREC[type(e.right)]
    if op in _RIGHT_ASSOC:
        wrap_left, wrap_right = lp <= prec, rp < prec
    else:
        wrap_left, wrap_right = lp < prec, rp <= prec
    if wrap_left:
        left = f"({left})"
    if wrap_right:
        right = f"({right})"
    return f"{left} {_SYMBOL[op]} {right}"


def variables(e: BoolExpr) -> tuple[str, ...]:
    """Variable names in first-occurrence (left-to-right) order."""
    seen: dict[str, None] = {}
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            seen.setdefault(node.name)
        elif isinstance(node, Not):
            stack.append(node.operand)
        else:
            stack.append(node.right)
            stack.append(node.left)
    return tuple(seen)


# -- evaluation ---------------------------------------------------------------


def evaluate(e: BoolExpr, assignment: Mapping[str, bool]) -> bool:
    if isinstance(e, Var):
        try:
            return bool(assignment[e.name])
        except KeyError:
            raise UnboundVariable(e.name) from None
    if isinstance(e, Not):
        return not evaluate(e.operand, assignment)
    left = evaluate(e.left, assignment)
    right = evaluate(e.right, assignment)
    if isinstance(e, And):
        return left and right
    if isinstance(e, Or):
        return left or right
    if isinstance(e, Implies):
        return (not left) or right
    return left == right


def _evaluate_columns(e: BoolExpr, columns: Mapping[str, np.ndarray]) -> np.ndarray:
    if isinstance(e, Var):
        return columns[e.name]
    if isinstance(e, Not):
        return ~_evaluate_columns(e.operand, columns)
    left = _evaluate_columns(e.left, columns)
    right = _evaluate_columns(e.right, columns)
    if isinstance(e, And):
        return left & right
    if isinstance(e, Or):
        return left | right
    if isinstance(e, Implies):
        return ~left | right
    return left == right


def _check_cap(count: int, cap: int) -> None:
    if count > cap:
        raise VariableLimitExceeded(count, cap)


def _result_chunks(exprs: Sequence[BoolExpr], names: Sequence[str]) -> Iterator[list[np.ndarray]]:
    """Yield, per block of consecutive rows, one result array per expression."""
    n = len(names)
    total = 1 << n
    for start in range(0, total, _CHUNK):
        index = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        columns = {name: ((index >> (n - 1 - k)) & 1).astype(bool) for k, name in enumerate(names)}
        yield [np.broadcast_to(_evaluate_columns(e, columns), index.shape) for e in exprs]


@dataclass(frozen=True, eq=False)
class TruthTable:
    variables: tuple[str, ...]
    results: np.ndarray  # bool, one entry per row

    @property
    def columns(self) -> int:
        return len(self.variables) + 1

    def __len__(self) -> int:
        return len(self.results)

    def assignment(self, row: int) -> tuple[bool, ...]:
        n = len(self.variables)
        return tuple(bool((row >> (n - 1 - k)) & 1) for k in range(n))

    def iter_rows(self) -> Iterator[tuple[tuple[bool, ...], bool]]:
        for i, value in enumerate(self.results):
            yield self.assignment(i), bool(value)

    @property
    def rows(self) -> list[tuple[tuple[bool, ...], bool]]:
        return list(self.iter_rows())

    def __eq__(self, other):
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.variables == other.variables and np.array_equal(self.results, other.results)

    def to_dict(self) -> dict:
        return {
            "variables": list(self.variables),
            "rows": [{"assignment": list(a), "result": r} for a, r in self.iter_rows()],
        }


def truth_table(e: BoolExpr, cap: int = DEFAULT_VARIABLE_CAP, order: Sequence[str] | None = None) -> TruthTable:
    """Tabulate ``e`` over its variables (or over ``order`` when given)."""
    names = tuple(order) if order is not None else variables(e)
    missing = set(variables(e)) - set(names)
    if missing:
        raise UnboundVariable(sorted(missing)[0])
    _check_cap(len(names), cap)
    parts = [chunk[0] for chunk in _result_chunks([e], names)]
    results = np.concatenate(parts) if parts else np.zeros(0, dtype=bool)
    return TruthTable(names, results.astype(bool))


def is_tautology(e: BoolExpr, cap: int = DEFAULT_VARIABLE_CAP) -> bool:
    names = variables(e)
    _check_cap(len(names), cap)
    return all(chunk[0].all() for chunk in _result_chunks([e], names))


def is_satisfiable(e: BoolExpr, cap: int = DEFAULT_VARIABLE_CAP) -> bool:
    names = variables(e)
    _check_cap(len(names), cap)
    return any(chunk[0].any() for chunk in _result_chunks([e], names))


def joint_variables(exprs: Sequence[BoolExpr]) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for e in exprs:
        for name in variables(e):
            seen.setdefault(name)
    return tuple(seen)


def entails(premises: Sequence[BoolExpr], conclusion: BoolExpr, cap: int = DEFAULT_VARIABLE_CAP) -> bool:
    """True iff every row satisfying all premises also satisfies the conclusion."""
    exprs = list(premises) + [conclusion]
    names = joint_variables(exprs)
    _check_cap(len(names), cap)
    for results in _result_chunks(exprs, names):
        *prem, concl = results
        holds = np.logical_and.reduce(prem) if prem else np.ones_like(concl)
        if (holds & ~concl).any():
            return False
    return True


def counterexample(premises: Sequence[BoolExpr], conclusion: BoolExpr, cap: int = DEFAULT_VARIABLE_CAP):
    """First row (as a name->bool dict) that satisfies the premises but not the conclusion."""
    exprs = list(premises) + [conclusion]
    names = joint_variables(exprs)
    _check_cap(len(names), cap)
    offset = 0
    for results in _result_chunks(exprs, names):
        *prem, concl = results
        holds = np.logical_and.reduce(prem) if prem else np.ones_like(concl)
        bad = np.flatnonzero(holds & ~concl)
        if bad.size:
            row = offset + int(bad[0])
            n = len(names)
            return {name: bool((row >> (n - 1 - k)) & 1) for k, name in enumerate(names)}
        offset += len(concl)
    return None


# -- decomposition ------------------------------------------------------------


def substitute(e: BoolExpr, mapping: Mapping[str, str]) -> BoolExpr:
    """Rename variables simultaneously; names absent from ``mapping`` stay put."""
    if isinstance(e, Var):
        return Var(mapping.get(e.name, e.name))
    if isinstance(e, Not):
        return Not(substitute(e.operand, mapping))
    return type(e)(substitute(e.left, mapping), substitute(e.right, mapping))


@dataclass(frozen=True)
class Decomposition:
    elements: tuple[str, ...]
    truth_function: BoolExpr
    correspondence: tuple[tuple[str, int], ...]  # (name, placeholder index), 1-based

    @property
    def placeholders(self) -> tuple[str, ...]:
        return tuple(placeholder(k) for _, k in self.correspondence)

    def mapping(self) -> dict[str, str]:
        return {name: placeholder(k) for name, k in self.correspondence}

    def recompose(self) -> BoolExpr:
        """Substitute the correspondence back into the truth function."""
        inverse = {placeholder(k): name for name, k in self.correspondence}
        return substitute(self.truth_function, inverse)

    def is_bijective(self) -> bool:
        names = [n for n, _ in self.correspondence]
        indices = sorted(k for _, k in self.correspondence)
        return len(set(names)) == len(names) and indices == list(range(1, len(names) + 1))


def placeholder(k: int) -> str:
    return f"x{k}"


def decompose(e: BoolExpr) -> Decomposition:
    elements = variables(e)
    correspondence = tuple((name, k) for k, name in enumerate(elements, start=1))
    function = substitute(e, {name: placeholder(k) for name, k in correspondence})
    return Decomposition(elements, function, correspondence)
