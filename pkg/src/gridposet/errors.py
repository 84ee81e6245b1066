"""Exception types shared across the package.

Domain errors (bad or out-of-contract inputs) are distinct from budget
errors (the instance is too large for the exact search the caller asked
for) and from construction failures (an algorithm could not meet its own
verified postcondition and refuses to return a wrong answer).
"""


class GridPosetError(Exception):
    """Base class for all package-specific errors."""


class DomainError(GridPosetError):
    """Input violates a precondition of the operation."""


class CycleError(DomainError):
    """The given relation is not a strict order (closure creates a cycle)."""


class ShapeMismatch(DomainError):
    """Two grid points or subsets belong to different shapes."""


class SizeMismatch(DomainError):
    """A realizer and a poset have different element counts."""


class DimensionMismatch(DomainError):
    """Two patterns have different dimension."""


class InvalidRealizer(DomainError):
    """The supplied realizer does not realize the poset."""


class NotAntichain(DomainError):
    """Operation requires an antichain."""


class NotPFree(DomainError):
    """Operation requires a subset without an induced copy of the poset."""


class InfeasibleCut(DomainError):
    """A chain cannot be split into pieces within the requested window."""


class BudgetExceeded(GridPosetError):
    """Exact search would exceed the configured budget."""


class ConstructionFailed(GridPosetError):
    """No construction route produced a verified result for this instance."""
