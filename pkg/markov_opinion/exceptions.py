class OpinionModelError(Exception):
    """ Base class of all errors raised by the library. Carries the process exit code. """

    exit_code = 1


class ParseError(OpinionModelError):
    exit_code = 2


class ValidationError(OpinionModelError):
    exit_code = 3

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class CapacityExceeded(OpinionModelError):
    exit_code = 4


class ToleranceNotMet(OpinionModelError):
    exit_code = 5


class ComparisonFailed(OpinionModelError):
    exit_code = 5


class SingularSystem(OpinionModelError):
    exit_code = 5


class UnknownAgent(OpinionModelError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class SelfTransition(OpinionModelError, ValueError):
    pass


class IndexOutOfRange(OpinionModelError, IndexError):
    pass


class DimensionMismatch(OpinionModelError, ValueError):
    pass


class InvalidTimeGrid(OpinionModelError, ValueError):
    pass


class InvalidSimConfig(OpinionModelError, ValueError):
    pass
