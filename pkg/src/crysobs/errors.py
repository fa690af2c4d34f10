"""Exception hierarchy shared by every stage of the pipeline.

Each exception carries the process exit code the command line tool uses
when it escapes a run.
"""


class CrysobsError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class BadInput(CrysobsError):
    exit_code = 2


class SchemaError(BadInput):
    pass


class InvariantViolation(BadInput):
    pass


class DegreeMismatch(BadInput):
    pass


class SearchExhausted(BadInput):
    pass


class SingularReduction(CrysobsError):
    exit_code = 3


class PrecisionExhausted(CrysobsError):
    exit_code = 4


class TruncationInsufficient(PrecisionExhausted):
    pass


class InconsistentLift(CrysobsError):
    exit_code = 5
