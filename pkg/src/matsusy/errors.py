"""Exception hierarchy shared by all modules."""


class MatsusyError(Exception):
    """Base class; the CLI maps subclasses to exit status 3 (or 1 for config errors)."""


class DomainError(MatsusyError, ValueError):
    pass


class ConvergenceError(MatsusyError):
    pass


class ParamError(MatsusyError, ValueError):
    pass


class BranchError(MatsusyError):
    pass


class NonConstantResidual(MatsusyError):
    pass


class GridError(MatsusyError):
    pass


class SolverError(MatsusyError):
    pass


class NormalizationError(MatsusyError):
    pass


class StiffnessError(MatsusyError):
    pass


class LevelError(MatsusyError):
    pass
