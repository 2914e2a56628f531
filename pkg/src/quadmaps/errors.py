"""Exception hierarchy shared by every module.

Validation problems derive from ``InputError`` (CLI exit code 1); broken
internal invariants derive from ``InternalInvariantViolated`` (exit code 2).
"""


class QuadMapsError(Exception):
    pass


class InputError(QuadMapsError):
    pass


class MatchingInvalid(InputError):
    pass


class IndexOutOfRange(InputError):
    pass


class NotQuadrangulation(InputError):
    pass


class NotBipartite(InputError):
    pass


class LabelsNotDistances(InputError):
    pass


class NotWellLabeled(InputError):
    pass


class LabelTooSmall(InputError):
    pass


class SourcesInvalid(InputError):
    pass


class SizeTooLarge(InputError):
    pass


class UnsupportedSurface(InputError):
    pass


class InsufficientData(InputError):
    pass


class RejectionBudgetExceeded(QuadMapsError):
    pass


class MismatchReport(QuadMapsError):
    def __init__(self, message, first=None):
        super().__init__(message)
        self.first = first


class InternalInvariantViolated(QuadMapsError):
    def __init__(self, message, dump=None):
        super().__init__(message)
        self.dump = dump
