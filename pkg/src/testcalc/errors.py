"""Exception hierarchy shared by every testcalc module.

The CLI maps these families onto exit codes: ``InputError`` is 2,
``AnalysisError`` is 1 and ``ResourceLimitError`` is 3.
"""


class TestcalcError(Exception):
    """Base class for all errors raised by testcalc."""

    __test__ = False  # keep pytest from collecting this as a test class


class InputError(TestcalcError, ValueError):
    """Malformed input: bad syntax, schema violations, broken invariants."""


class AnalysisError(TestcalcError):
    """Well-formed input that does not satisfy an operation's precondition."""


class ResourceLimitError(TestcalcError):
    """A configured size cap was exceeded."""
