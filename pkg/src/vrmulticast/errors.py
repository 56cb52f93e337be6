"""Exception types raised by the solvers."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class NoRootError(RuntimeError):
    """No sign change of ``f - target`` was found while expanding the bracket."""


class ContractViolation(RuntimeError):
    """A function passed to a root finder was observed to be non-monotone."""


class ConvergenceError(RuntimeError):
    """An iterative solve stopped before reaching its tolerance."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


class RateOverflowError(OverflowError):
    """The spectral efficiency a group needs exceeds the representable range."""
