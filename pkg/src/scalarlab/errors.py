"""Exception types shared across the package."""


class ResolutionError(ValueError):
    """A grid operation was requested below the resolvable scale.

    Raised when tiling cells fall under the 4x4-samples-per-cell contract or
    when a cell boundary does not align with the sample lattice.
    """


class NumericalBlowupError(RuntimeError):
    """NaN or Inf detected during time stepping; carries step diagnostics."""

    def __init__(self, message: str, *, time: float | None = None, step: int | None = None):
        super().__init__(message)
        self.time = time
        self.step = step
