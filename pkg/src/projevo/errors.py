"""Exception hierarchy shared by all projevo modules."""


class ProjEvoError(Exception):
    """Base class for every error raised by projevo."""


class DomainError(ProjEvoError, ValueError):
    """An argument lies outside the domain of the operation."""


class StructuralError(ProjEvoError, ValueError):
    """Operands have incompatible shapes or dimensions."""


class InvalidStateError(ProjEvoError, ValueError):
    """A matrix fails the density-state, projector or family invariants."""


class NonUnitaryError(ProjEvoError, ValueError):
    pass


class ZeroProbabilityBranchError(ProjEvoError):
    """The requested outcome has probability below the selection floor."""


class UnsupportedRepresentationError(ProjEvoError, TypeError):
    pass


class ConfigError(ProjEvoError):
    """Invalid run configuration (maps to CLI exit code 2)."""


class ConvergenceError(ProjEvoError, ArithmeticError):
    """Quadrature did not reach tolerance within the subdivision budget.

    The best available estimate and its error bound are kept on the
    exception so callers can decide whether to use them anyway.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class TrajectoryStepError(ProjEvoError):
    """Failure inside a trajectory, annotated with the failing step index."""

    def __init__(self, step_index, cause):
        super().__init__(f"step {step_index}: {cause}")
        self.step_index = step_index
        self.cause = cause
