"""Exception types raised by monwalk."""


class MonwalkError(Exception):
    """Base class for all library errors."""


class DimensionError(MonwalkError, ValueError):
    pass


class ShapeError(MonwalkError, ValueError):
    pass


class IndexRangeError(MonwalkError, IndexError):
    pass


class DomainError(MonwalkError, ValueError):
    """Argument outside the domain of a closed-form expression."""


class BasisError(MonwalkError, ValueError):
    """Weights matrix failed the orthonormality check."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConsistencyError(MonwalkError, ValueError):
    pass


class PreconditionError(MonwalkError, ValueError):
    pass


class BudgetExceededError(MonwalkError, RuntimeError):
    """The path-sum oracle would need more terms than allowed."""

    def __init__(self, required, budget):
        super().__init__(
            f"path sum needs {required} terms, budget is {budget}"
        )
        self.required = required
        self.budget = budget


class NumericalError(MonwalkError, RuntimeError):
    def __init__(self, message, matrix=None):
        super().__init__(message)
        self.matrix = matrix
