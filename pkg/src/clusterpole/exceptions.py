"""Exception types shared across the package."""


class EvaluationError(RuntimeError):
    """A function evaluation produced a non-finite value.

    Attributes:
        x: the offending evaluation point.
    """

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class PoleEvaluationError(EvaluationError):
    """An evaluation point collided with a pole (or a quadrature node).

    Attributes:
        x: the offending evaluation point.
        pole_index: index of the pole that was hit.
    """

    def __init__(self, message, x=None, pole_index=None):
        super().__init__(message, x=x)
        self.pole_index = pole_index


class IllPosedError(RuntimeError):
    """A linear system was numerically rank deficient.

    Attributes:
        effective_rank: rank reported by the factorization.
    """

    def __init__(self, message, effective_rank=None):
        super().__init__(message)
        self.effective_rank = effective_rank


class BranchCutError(ValueError):
    """Evaluation requested on a branch cut."""


class BasisConstructionError(RuntimeError):
    """A basis pole landed inside the domain.

    Attributes:
        corner_index: index of the corner whose pole ray failed.
    """

    def __init__(self, message, corner_index=None):
        super().__init__(message)
        self.corner_index = corner_index


class OutsideDomainError(ValueError):
    """Evaluation point lies outside the solution domain."""
