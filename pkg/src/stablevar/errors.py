class DomainError(ValueError):
    """Parameters outside the domain where a formula or algorithm is defined."""


class InfeasibleError(RuntimeError):
    """No requested small-ball level can be resolved with the replicate budget."""

    def __init__(self, message, smallest_feasible=None):
        super().__init__(message)
        self.smallest_feasible = smallest_feasible
