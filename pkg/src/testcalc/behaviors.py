"""Specified / programmed / tested behavior sets and their eight regions.

Given a universe of behaviors and three subsets S (specified), P
(programmed) and T (tested), every behavior falls in exactly one region:

    1  S & P & T        5  S only
    2  S & P, untested  6  P only
    3  P & T, not S     7  T only
    4  S & T, not P     8  outside all three

The module also covers faults of omission/commission, validation and
comparison of functional and structural test methods, and finite functions
given as sets of ordered pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, NamedTuple, Optional

from .errors import AnalysisError, InputError

BehaviorId = Hashable

REGION_NAMES = {
    1: "S&P&T",
    2: "S&P-T",
    3: "P&T-S",
    4: "S&T-P",
    5: "S-P-T",
    6: "P-S-T",
    7: "T-S-P",
    8: "U-S-P-T",
}


class UniverseViolation(InputError):
    def __init__(self, which, ids):
        self.which, self.ids = which, tuple(ids)
        super().__init__(f"{which} contains ids outside the universe: {list(self.ids)!r}")


class InconsistentTestMap(InputError):
    __test__ = False


class DuplicateBehavior(InputError):
    def __init__(self, which, item):
        self.which, self.item = which, item
        super().__init__(f"{which} lists {item!r} more than once")


class NotAFunction(AnalysisError):
    pass


class OutOfDomain(AnalysisError):
    pass


def _unique(items: Iterable, which: str) -> tuple:
    out: dict = {}
    for item in items:
        if item in out:
            raise DuplicateBehavior(which, item)
        out[item] = None
    return tuple(out)


def sort_key(item):
    """Total order over mixed int/str ids: numbers first, then text."""
    if isinstance(item, bool):
        return (2, str(item))
    if isinstance(item, (int, float)):
        return (0, item)
    return (1, str(item))


@dataclass(frozen=True)
class SptModel:
    """Explicit universe with S, P, T subsets and an optional test-case map."""

    universe: tuple
    S: frozenset
    P: frozenset
    T: frozenset
    tests: Optional[Mapping[str, frozenset]] = field(default=None, compare=False)

    def __post_init__(self):
        universe = set(self.universe)
        for which in ("S", "P", "T"):
            outside = getattr(self, which) - universe
            if outside:
                raise UniverseViolation(which, sorted(outside, key=sort_key))
        if self.tests is not None:
            covered = frozenset().union(*self.tests.values())
            if covered != self.T:
                raise InconsistentTestMap("union of test-case behaviors differs from T")

    @classmethod
    def build(cls, universe, S, P, T=None, tests=None) -> "SptModel":
        universe = _unique(universe, "universe")
        test_map = None
        if tests is not None:
            test_map = {name: frozenset(_unique(ids, f"tests[{name}]")) for name, ids in tests.items()}
            if T is None:
                T = frozenset().union(*test_map.values())
        return cls(
            universe,
            frozenset(_unique(S, "S")),
            frozenset(_unique(P, "P")),
            frozenset(_unique(T or (), "T")),
            test_map,
        )

    @classmethod
    def from_json(cls, doc: Mapping) -> "SptModel":
        if not isinstance(doc, Mapping):
            raise InputError("SPT document must be a JSON object")
        for key in ("universe", "S", "P"):
            if key not in doc:
                raise InputError(f"SPT document is missing {key!r}")
        unknown = set(doc) - {"universe", "S", "P", "T", "tests"}
        if unknown:
            raise InputError(f"unknown SPT keys: {sorted(unknown)}")
        tests = doc.get("tests")
        if "T" not in doc and tests is None:
            raise InputError("SPT document needs 'T' or 'tests'")
        for key in ("universe", "S", "P", "T"):
            if key in doc and not isinstance(doc[key], list):
                raise InputError(f"{key!r} must be a list")
        if tests is not None:
            if not isinstance(tests, Mapping) or not all(isinstance(v, list) for v in tests.values()):
                raise InputError("'tests' must map test names to lists")
        return cls.build(doc["universe"], doc["S"], doc["P"], doc.get("T"), tests)

    def ordered(self, ids: Iterable) -> list:
        """``ids`` listed in universe order."""
        ids = set(ids)
        return [x for x in self.universe if x in ids]

    def with_tests(self, tests: Mapping[str, Iterable]) -> "SptModel":
        test_map = {name: frozenset(ids) for name, ids in tests.items()}
        return SptModel(self.universe, self.S, self.P, frozenset().union(*test_map.values()), test_map)


@dataclass(frozen=True)
class RegionReport:
    regions: tuple  # eight frozensets, index 0 is region 1

    def __getitem__(self, k: int) -> frozenset:
        if not 1 <= k <= 8:
            raise IndexError(f"regions are numbered 1..8, got {k}")
        return self.regions[k - 1]

    def union(self, *ks: int) -> frozenset:
        return frozenset().union(*(self[k] for k in ks))


def region_of(in_s: bool, in_p: bool, in_t: bool) -> int:
    table = {
        (True, True, True): 1,
        (True, True, False): 2,
        (False, True, True): 3,
        (True, False, True): 4,
        (True, False, False): 5,
        (False, True, False): 6,
        (False, False, True): 7,
        (False, False, False): 8,
    }
    return table[(in_s, in_p, in_t)]


def classify(m: SptModel) -> RegionReport:
    S, P, T = m.S, m.P, m.T
    U = frozenset(m.universe)
    return RegionReport(
        (
            S & P & T,
            (S & P) - T,
            (P & T) - S,
            (S & T) - P,
            S - (P | T),
            P - (S | T),
            T - (S | P),
            U - (S | P | T),
        )
    )


def faults_of_omission(m: SptModel) -> frozenset:
    """Specified but never programmed."""
    return m.S - m.P


def faults_of_commission(m: SptModel) -> frozenset:
    """Programmed but never specified."""
    return m.P - m.S


def correct_portion(m: SptModel) -> frozenset:
    return m.S & m.P


# -- test methods -------------------------------------------------------------

FUNCTIONAL = "functional"
STRUCTURAL = "structural"


@dataclass(frozen=True)
class MethodProfile:
    name: str
    kind: str
    tests: Mapping[str, frozenset]

    def __post_init__(self):
        if self.kind not in (FUNCTIONAL, STRUCTURAL):
            raise InputError(f"method kind must be {FUNCTIONAL!r} or {STRUCTURAL!r}, got {self.kind!r}")
        object.__setattr__(self, "tests", {k: frozenset(v) for k, v in self.tests.items()})

    @property
    def covered(self) -> frozenset:
        return frozenset().union(*self.tests.values())


@dataclass(frozen=True)
class MethodValidation:
    method: str
    kind: str
    passed: bool
    violations: frozenset
    gaps: frozenset
    redundancy: frozenset
    test_cases: int


def redundant_behaviors(tests: Mapping[str, Iterable]) -> frozenset:
    """Behaviors exercised by two or more test cases."""
    seen, twice = set(), set()
    for ids in tests.values():
        for item in set(ids):
            (twice if item in seen else seen).add(item)
    return frozenset(twice)


def validate_method(profile: MethodProfile, m: SptModel) -> MethodValidation:
    """Functional tests must stay inside S, structural tests inside P."""
    covered = profile.covered
    if covered != m.T:
        raise InconsistentTestMap(f"tests of method {profile.name!r} do not cover exactly T")
    bound = m.S if profile.kind == FUNCTIONAL else m.P
    violations = covered - bound
    return MethodValidation(
        method=profile.name,
        kind=profile.kind,
        passed=not violations,
        violations=violations,
        gaps=bound - covered,
        redundancy=redundant_behaviors(profile.tests),
        test_cases=len(profile.tests),
    )


@dataclass(frozen=True)
class MethodComparison:
    a: MethodValidation
    b: MethodValidation
    size_a: int
    size_b: int
    only_a: frozenset
    only_b: frozenset
    both: frozenset
    region1_a: frozenset
    region1_b: frozenset


def compare_methods(a: MethodProfile, b: MethodProfile, m: SptModel) -> MethodComparison:
    """Compare two methods over the same S and P; each supplies its own T."""
    ta, tb = a.covered, b.covered
    va = validate_method(a, m.with_tests(a.tests))
    vb = validate_method(b, m.with_tests(b.tests))
    correct = correct_portion(m)
    return MethodComparison(
        a=va,
        b=vb,
        size_a=len(ta),
        size_b=len(tb),
        only_a=ta - tb,
        only_b=tb - ta,
        both=ta & tb,
        region1_a=ta & correct,
        region1_b=tb & correct,
    )


# -- functions as ordered pairs ----------------------------------------------


class WellDefined(NamedTuple):
    ok: bool
    witness: Optional[tuple] = None  # (input, output1, output2)


@dataclass(frozen=True)
class FunctionSpec:
    pairs: frozenset
    domain: frozenset
    codomain: frozenset

    def __post_init__(self):
        for a, b in self.pairs:
            if a not in self.domain:
                raise InputError(f"pair input {a!r} is not in the domain")
            if b not in self.codomain:
                raise InputError(f"pair output {b!r} is not in the codomain")

    @classmethod
    def of(cls, pairs: Iterable[tuple], domain: Iterable = None, codomain: Iterable = None) -> "FunctionSpec":
        pairs = frozenset((a, b) for a, b in pairs)
        dom = frozenset(domain) if domain is not None else frozenset(a for a, _ in pairs)
        cod = frozenset(codomain) if codomain is not None else frozenset(b for _, b in pairs)
        return cls(pairs, dom, cod)


def is_well_defined(f: FunctionSpec) -> WellDefined:
    outputs: dict = {}
    for a, b in sorted(f.pairs, key=lambda p: (sort_key(p[0]), sort_key(p[1]))):
        if a in outputs and outputs[a] != b:
            return WellDefined(False, (a, outputs[a], b))
        outputs.setdefault(a, b)
    return WellDefined(True)


def image(f: FunctionSpec, subset: Iterable) -> frozenset:
    verdict = is_well_defined(f)
    if not verdict.ok:
        a, b1, b2 = verdict.witness
        raise NotAFunction(f"input {a!r} maps to both {b1!r} and {b2!r}")
    subset = frozenset(subset)
    outside = subset - f.domain
    if outside:
        raise OutOfDomain(f"not in the domain: {sorted(outside, key=sort_key)!r}")
    return frozenset(b for a, b in f.pairs if a in subset)
