"""Cut-set lower bounds, multiplicative gaps and optimality regions."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping

from .closed_form import case_of, closed_form_ndt
from .dof_tables import dof_table
from .model import LEGITIMATE_POINTS, AntennaConfig, CachePoint, IntegerPoint, NdtReport
from .ndt_program import NdtSolver

__all__ = [
    "GapReport",
    "RHO_TABLE",
    "RHO_TABLE_INTERVALS",
    "lower_bound",
    "relaxed_lower_bound",
    "relaxed_lower_bound_mu",
    "per_point_rho",
    "gap",
    "is_optimal_point",
    "rho_table_violations",
    "ndt_report",
]

_ZERO = Fraction(0)


@dataclass(frozen=True)
class GapReport:
    """``rho`` is a Fraction, or ``math.inf`` when only the lower bound vanishes."""

    rho: Fraction | float
    per_point_rho: Mapping[IntegerPoint, Fraction]
    optimal_flag: bool
    tau_upper: Fraction
    tau_lower: Fraction


def lower_bound(p: CachePoint, cfg: AntennaConfig) -> Fraction:
    """Cut-set bound ``max{(1-mu_r)/N, max_s s(1 - s mu_r)/(3M)}``, at least 0."""
    r = p.mu_r
    best = (1 - r) / cfg.N
    for s in (1, 2, 3):
        best = max(best, Fraction(s, 3 * cfg.M) * (1 - s * r))
    return max(best, _ZERO)


def relaxed_lower_bound_mu(mu_r: Fraction, cfg: AntennaConfig) -> Fraction:
    if cfg.N <= 3 * cfg.M:
        return (1 - mu_r) / cfg.N
    return (1 - mu_r) / (3 * cfg.M)


def relaxed_lower_bound(p: CachePoint, cfg: AntennaConfig) -> Fraction:
    """The single cut-set term that dominates near ``mu_r = 0``."""
    return relaxed_lower_bound_mu(p.mu_r, cfg)


def per_point_rho(cfg: AntennaConfig) -> dict[IntegerPoint, Fraction]:
    """Ratio of each pure integer-point NDT to the relaxed bound at that point.

    Points with ``m = 3`` have both quantities zero; their ratio is 1.
    """
    d = dof_table(cfg)
    out = {}
    for pt in LEGITIMATE_POINTS:
        if pt.m == 3:
            out[pt] = Fraction(1)
            continue
        tau = Fraction(3 - pt.m, 3) / d[pt]
        out[pt] = tau / relaxed_lower_bound_mu(Fraction(pt.m, 3), cfg)
    return out


def _ratio(upper: Fraction, lower: Fraction):
    if lower > 0:
        return upper / lower
    return Fraction(1) if upper == 0 else math.inf


def is_optimal_point(p: CachePoint, cfg: AntennaConfig) -> bool:
    """Whether ``(p, cfg)`` lies in a region where the achievable NDT is tight."""
    r = cfg.ratio()
    mr, mt = p.mu_r, p.mu_t
    if r <= Fraction(1, 3):
        return True
    if mr + mt < 1:
        return False
    if r <= 1:
        return True
    if r <= 2 and 2 * mr + mt >= Fraction(5, 3):
        return True
    return mr >= Fraction(2, 3)


def gap(p: CachePoint, cfg: AntennaConfig, solver: NdtSolver | None = None) -> GapReport:
    """Ratio of the achievable NDT to the cut-set bound at ``p``.

    Raises AssertionError if an optimality region disagrees with the bounds.
    """
    p.require_feasible()
    solver = solver or NdtSolver(cfg)
    upper = solver.optimum(p)
    lower = lower_bound(p, cfg)
    flag = is_optimal_point(p, cfg)
    if flag and upper != lower:
        raise AssertionError(f"bounds differ at claimed optimal point {p}, {cfg}")
    return GapReport(
        rho=_ratio(upper, lower),
        per_point_rho=per_point_rho(cfg),
        optimal_flag=flag,
        tau_upper=upper,
        tau_lower=lower,
    )


# Upper bounds on per-point ratios over seven ratio intervals. Column k
# covers (RHO_TABLE_INTERVALS[k], RHO_TABLE_INTERVALS[k+1]].
RHO_TABLE_INTERVALS: tuple[Fraction | float, ...] = (
    Fraction(0),
    Fraction(1, 3),
    Fraction(2, 3),
    Fraction(1),
    Fraction(3, 2),
    Fraction(2),
    Fraction(3),
    math.inf,
)

_F = Fraction
RHO_TABLE: dict[IntegerPoint, tuple[Fraction, ...]] = {
    IntegerPoint(0, 1): (_F(1), _F(3), _F(3), _F(3), _F(3), _F(3), _F(3)),
    IntegerPoint(0, 2): (_F(1), _F(1), _F(5, 2), _F(5, 2), _F(5, 2), _F(3), _F(3)),
    IntegerPoint(0, 3): (_F(1), _F(1), _F(1), _F(1), _F(1), _F(1), _F(3)),
    IntegerPoint(1, 1): (_F(7, 6), _F(7, 6), _F(7, 6), _F(3, 2), _F(3, 2), _F(3, 2), _F(3, 2)),
    IntegerPoint(1, 2): (_F(1), _F(1), _F(1), _F(3, 2), _F(3, 2), _F(3, 2), _F(3, 2)),
    IntegerPoint(1, 3): (_F(1), _F(1), _F(1), _F(1), _F(1), _F(3, 2), _F(3, 2)),
}
for _m in (2, 3):
    for _n in range(4):
        if _m + 3 * _n >= 3:
            RHO_TABLE[IntegerPoint(_m, _n)] = (_F(1),) * 7


def rho_table_violations(ratios) -> list[tuple[IntegerPoint, int, Fraction, Fraction, Fraction]]:
    """Check :data:`RHO_TABLE` against computed per-point ratios.

    ``ratios`` is an iterable of ``N/M`` values; each is checked against the
    column whose interval contains it (the ratios depend on ``N/M`` only).
    Returns ``(point, column, ratio, computed, bound)`` for each excess.
    """
    out = []
    for r in ratios:
        r = Fraction(r)
        col = next(
            k for k in range(7) if RHO_TABLE_INTERVALS[k] < r <= RHO_TABLE_INTERVALS[k + 1]
        )
        cfg = AntennaConfig(r.denominator, r.numerator)
        rho = per_point_rho(cfg)
        for pt, bounds in RHO_TABLE.items():
            if rho[pt] > bounds[col]:
                out.append((pt, col, r, rho[pt], bounds[col]))
    return out


def ndt_report(p: CachePoint, cfg: AntennaConfig, solver: NdtSolver | None = None) -> NdtReport:
    """LP optimum with its sharing, the cut-set bound, the gap and the active piece."""
    p.require_feasible()
    solver = solver or NdtSolver(cfg)
    rep = solver.solve(p)
    lower = lower_bound(p, cfg)
    _, region = closed_form_ndt(p, cfg)
    return replace(
        rep,
        tau_lower=lower,
        gap=_ratio(rep.tau_upper, lower),
        active_piece=region,
        case=case_of(cfg),
        extra={"optimal": is_optimal_point(p, cfg)},
    )
