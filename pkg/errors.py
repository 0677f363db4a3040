"""
Exception hierarchy for the moment-angle ring toolkit.
Every error carries the exit code the command line reports for it.
"""


class MomentAngleError(Exception):
    """Base class for all toolkit errors"""
    exit_code = 2


class InputError(MomentAngleError):
    """Malformed or inconsistent input"""
    exit_code = 2


class ComplexFormatError(InputError):
    pass


class DimensionError(InputError):
    pass


class OverlapError(InputError):
    pass


class PreconditionError(InputError):
    pass


class UnsupportedFamilyError(InputError):
    pass


class RingPresentationError(InputError):
    pass


class BudgetExceededError(MomentAngleError):
    """A triangulated model outgrew the configured size budget"""
    exit_code = 3

    def __init__(self, message: str, size: int = 0, budget: int = 0):
        super().__init__(message)
        self.size = size
        self.budget = budget


class VerificationFailure(MomentAngleError):
    """An identity checked against the geometric model did not hold"""
    exit_code = 1

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
