"""Exception types shared across the package."""


class SingularityError(ValueError):
    """Kernel or Green's function evaluated at a coincident point pair."""


class GeometryMismatchError(ValueError):
    """Sampling region and geometry are inconsistent (rejection rate too low)."""


class OracleFailure(RuntimeError):
    """A reference solve is singular or too ill-conditioned to trust."""


class TrainingDiverged(RuntimeError):
    """Training loss became non-finite. Carries the loss trace so far."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace if trace is not None else []
