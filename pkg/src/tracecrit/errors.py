"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a type invariant or an operation precondition."""


class DimensionError(ValidationError):
    """Operands live on sample spaces (or Hilbert spaces) of different size."""


class ConvergenceError(ArithmeticError):
    """An iterative numerical routine did not reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
