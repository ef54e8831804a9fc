"""Storage-latency tradeoff toolkit for the 3x3 cache-aided MIMO interference network."""

from .bounds_gap import gap, is_optimal_point, lower_bound, ndt_report
from .closed_form import case_of, closed_form_ndt
from .dof_tables import dof_per_user, dof_table
from .errors import (
    BudgetExceeded,
    ConstraintViolation,
    DimensionMismatch,
    InfeasibleCachePoint,
    MissingSubfile,
    NdtlabError,
    NothingToDeliver,
    RankDeficient,
)
from .model import (
    LEGITIMATE_POINTS,
    AntennaConfig,
    CachePoint,
    IntegerPoint,
    MemorySharing,
    NdtReport,
    is_feasible,
    legitimate_points,
)
from .ndt_program import NdtSolver, ndt_from_splitting, solve_ndt_lp

__version__ = "0.1.0"
