"""Exception types raised across the toolkit."""


class NdtlabError(Exception):
    """Base class for every library error."""


class InfeasibleCachePoint(NdtlabError, ValueError):
    """The cache point lies outside the feasible polygon."""


class NothingToDeliver(NdtlabError, ValueError):
    """The integer point caches every bit at all receivers; no DoF applies."""


class ConstraintViolation(NdtlabError, ValueError):
    """Splitting ratios break a file-size or cache-budget constraint.

    ``index`` is 1 for the total-size row, 2 for the receiver budget and
    3 for the transmitter budget.
    """

    def __init__(self, index, message):
        super().__init__(message)
        self.index = index


class BudgetExceeded(NdtlabError, ValueError):
    """A node stores more bits than its cache allows."""

    def __init__(self, node, used, budget):
        super().__init__(f"{node} uses {used} bits, budget {budget}")
        self.node = node
        self.used = used
        self.budget = budget


class MissingSubfile(NdtlabError, RuntimeError):
    """A needed subfile is not cached at any transmitter."""


class DimensionMismatch(NdtlabError, ValueError):
    """Antenna counts do not fit the requested scheme."""


class RankDeficient(NdtlabError, RuntimeError):
    """A null space or effective channel has an unexpected rank."""
