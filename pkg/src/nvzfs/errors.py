"""Exception types shared across the package."""


class DimensionMismatchError(ValueError):
    """Operands live on spaces of different dimension."""


class NonHermitianError(ValueError):
    """A matrix required to be Hermitian is not, beyond tolerance."""


class StepTooCoarseError(ValueError):
    """The requested time step cannot resolve the fastest frequency."""


class NumericalInvariantError(RuntimeError):
    """A runtime numerical invariant (trace, unitarity, positivity) failed."""


class NoResonanceError(RuntimeError):
    """A sweep contains no interior minimum to locate."""


class ConfigError(ValueError):
    """Invalid experiment configuration; `field` names the offending key."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field
