"""Exception types shared across the package."""


class InfeasibleError(RuntimeError):
    """An exact computation was requested beyond what can be enumerated."""


class BudgetExceededError(InfeasibleError):
    """The enumeration budget would be exceeded."""


class GridLineError(ValueError):
    """An atom sits exactly on a grid line i/k."""
