"""Exception types shared by the geometry, tropical and sandpile layers."""


class DomainError(ValueError):
    """An argument lies outside the set where the operation is defined."""


class ContractError(ValueError):
    """A documented precondition on an input object does not hold."""


class BudgetExceeded(RuntimeError):
    """An iterative procedure hit its configured step budget.

    ``partial`` carries whatever the procedure had computed so far, which
    is useful for diagnosing runs that do not settle.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class PatternNotFound(RuntimeError):
    """A measurement could not locate the pattern it was asked to track."""
