"""Exception taxonomy for the solver.

Every failure the library raises deliberately derives from LeechError, so
callers (and the CLI) can map classes of failure to stable exit codes:
input problems, infeasible data, and free-parameter contract violations.
"""


class LeechError(Exception):
    """Base class for all structured solver errors."""


class DimensionError(LeechError):
    """Matrix shapes do not conform."""


class DefinitenessError(LeechError):
    """A matrix expected to be (semi)definite is not."""


class StabilityError(LeechError):
    """A matrix expected to be Schur stable is not."""


class ObservabilityError(LeechError):
    """An observability precondition failed."""


class RankDefectError(LeechError):
    """A factor does not have the rank the theory requires."""


class RiccatiError(LeechError):
    """No stabilizing Riccati solution was found (divergence or breakdown)."""


class InfeasibleError(LeechError):
    """The data lies outside the strictly suboptimal regime."""


class ParameterError(LeechError):
    """A free parameter violates its contract (shape or norm bound)."""


class EvaluationError(LeechError):
    """A transfer function could not be evaluated (singular resolvent)."""


class NotInvertibleError(LeechError):
    """A rational matrix function is not invertible at the origin."""


class ValidationError(LeechError):
    """Input data failed validation; carries the full report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class FileFormatError(LeechError):
    """A problem/realization file could not be parsed; message pinpoints the field."""
