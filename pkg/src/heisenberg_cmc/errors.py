"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input lies outside the mathematical domain of an operation."""


class ContractError(ValueError):
    """Input violates a documented precondition (e.g. a non-unit normal)."""


class NumericsError(RuntimeError):
    """An iterative numerical procedure failed to converge."""
