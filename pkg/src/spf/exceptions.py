"""Typed errors raised by the library."""


class DegenerateInputError(ValueError):
    """An input that is identically zero (or otherwise carries no usable
    signal) was passed where a nonzero quantity is required."""


class DegenerateIterateError(RuntimeError):
    """An alternating-minimization iterate collapsed to zero.

    Carries the trace accumulated so far so the caller can inspect it or
    retry with a perturbed starting vector.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class CombinatorialBudgetError(ValueError):
    """An exhaustive support search would exceed the configured budget."""

    def __init__(self, count, budget):
        super().__init__(
            f"exhaustive search over {count} support candidates exceeds "
            f"the budget of {budget}"
        )
        self.count = count
        self.budget = budget
