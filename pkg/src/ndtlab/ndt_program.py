"""Exact memory-sharing linear program for the achievable NDT.

The program picks convex weights ``beta`` over the 13 legitimate integer
points so that the averaged receiver and transmitter cache loads fit the
budgets, minimizing the averaged delivery time. It has three rows, so a
dense tableau over :class:`~fractions.Fraction` with Bland's rule is both
exact and fast enough for grid sweeps.

Among several optimal sharings the lexicographically smallest ``beta`` (in
canonical point order) is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .dof_tables import dof_table
from .errors import ConstraintViolation
from .model import (
    LEGITIMATE_POINTS,
    AntennaConfig,
    CachePoint,
    IntegerPoint,
    MemorySharing,
    NdtReport,
)

__all__ = [
    "LpInstance",
    "NdtSolver",
    "build_lp",
    "solve_ndt_lp",
    "sharing_to_splitting",
    "ndt_from_splitting",
    "point_costs",
    "NDT_WEIGHTS",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)

# per-user multiplicity of each group in the delivery-time sum
NDT_WEIGHTS: dict[IntegerPoint, int] = {
    IntegerPoint(0, 1): 3,
    IntegerPoint(0, 2): 3,
    IntegerPoint(0, 3): 1,
    IntegerPoint(1, 1): 6,
    IntegerPoint(1, 2): 6,
    IntegerPoint(1, 3): 2,
    IntegerPoint(2, 1): 3,
    IntegerPoint(2, 2): 3,
    IntegerPoint(2, 3): 1,
}


def point_costs(cfg: AntennaConfig) -> dict[IntegerPoint, Fraction]:
    """Delivery time ``(1 - m/3) / d_mn`` of each pure integer-point strategy."""
    d = dof_table(cfg)
    return {
        pt: (_ZERO if pt.m == 3 else Fraction(3 - pt.m, 3) / d[pt])
        for pt in LEGITIMATE_POINTS
    }


@dataclass(frozen=True)
class LpInstance:
    """``min c.beta  s.t.  sum(beta) = 1,  A_r.beta <= mu_r,  A_t.beta <= mu_t``."""

    point: CachePoint
    cfg: AntennaConfig
    objective_coeffs: Mapping[IntegerPoint, Fraction]
    budget_rows: tuple[tuple[tuple[Fraction, ...], Fraction], ...]
    simplex_row: tuple[tuple[Fraction, ...], Fraction]

    @property
    def num_vars(self) -> int:
        return len(self.objective_coeffs)


def build_lp(p: CachePoint, cfg: AntennaConfig) -> LpInstance:
    """Assemble the program at ``p``; raises InfeasibleCachePoint off the polygon."""
    p.require_feasible()
    rx_row = tuple(Fraction(pt.m, 3) for pt in LEGITIMATE_POINTS)
    tx_row = tuple(Fraction(pt.n, 3) for pt in LEGITIMATE_POINTS)
    return LpInstance(
        point=p,
        cfg=cfg,
        objective_coeffs=point_costs(cfg),
        budget_rows=((rx_row, p.mu_r), (tx_row, p.mu_t)),
        simplex_row=(tuple(_ONE for _ in LEGITIMATE_POINTS), _ONE),
    )


class _Tableau:
    """Dense tableau ``B^-1 [A | I]`` plus reduced costs for one basis.

    The trailing identity block tracks ``B^-1`` so the basic solution can be
    recomputed for a new right-hand side without pivoting.
    """

    __slots__ = ("rows", "basis", "ncols")

    def __init__(self, columns: Sequence[Sequence[Fraction]], basis_plan):
        nrow = len(columns[0])
        self.ncols = len(columns)
        self.rows = [
            [columns[j][i] for j in range(self.ncols)]
            + [_ONE if k == i else _ZERO for k in range(nrow)]
            for i in range(nrow)
        ]
        self.basis = [-1] * nrow
        for row, col in basis_plan:
            self.pivot(row, col)

    def copy(self) -> "_Tableau":
        t = object.__new__(_Tableau)
        t.rows = [r[:] for r in self.rows]
        t.basis = self.basis[:]
        t.ncols = self.ncols
        return t

    def pivot(self, r: int, c: int) -> None:
        rows = self.rows
        prow = rows[r]
        piv = prow[c]
        if piv != 1:
            prow = [v / piv for v in prow]
            rows[r] = prow
        for i, row in enumerate(rows):
            if i == r:
                continue
            f = row[c]
            if f:
                rows[i] = [a - f * b for a, b in zip(row, prow)]
        self.basis[r] = c

    def rhs(self, b: Sequence[Fraction]) -> list[Fraction]:
        n = self.ncols
        return [sum((row[n + k] * b[k] for k in range(len(b)) if b[k]), _ZERO) for row in self.rows]

    def reduced_costs(self, cost: Sequence[Fraction]) -> list[Fraction]:
        cb = [cost[c] for c in self.basis]
        out = []
        for j in range(self.ncols):
            z = cost[j]
            for i, row in enumerate(self.rows):
                if cb[i] and row[j]:
                    z -= cb[i] * row[j]
            out.append(z)
        return out


def _bland(tab: _Tableau, x: list[Fraction], cost, allowed) -> list[Fraction]:
    """Run Bland's rule from a feasible basis; returns final reduced costs."""
    while True:
        z = tab.reduced_costs(cost)
        basic = set(tab.basis)
        enter = next(
            (j for j in range(tab.ncols) if j in allowed and j not in basic and z[j] < 0),
            None,
        )
        if enter is None:
            return z
        best = None
        for i, row in enumerate(tab.rows):
            a = row[enter]
            if a > 0:
                ratio = x[i] / a
                key = (ratio, tab.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:  # pragma: no cover - objective is bounded below by 0
            raise RuntimeError("unbounded program")
        r = best[1]
        a = tab.rows[r][enter]
        step = x[r] / a
        x[:] = [xi - step * row[enter] if i != r else step for i, (xi, row) in enumerate(zip(x, tab.rows))]
        tab.pivot(r, enter)


class NdtSolver:
    """Solver for one antenna configuration, warm-started across queries.

    Reduced costs do not depend on the cache point, so the last optimal
    basis stays optimal wherever its basic solution remains nonnegative.
    Results never depend on the warm start: the returned sharing is the
    unique lexicographic minimum of the optimal face.
    """

    # columns: 13 sharing weights, then receiver and transmitter slacks
    _SLACK_R = len(LEGITIMATE_POINTS)
    _SLACK_T = _SLACK_R + 1

    def __init__(self, cfg: AntennaConfig):
        self.cfg = cfg
        self.costs = point_costs(cfg)
        self._cost_vec = [self.costs[pt] for pt in LEGITIMATE_POINTS] + [_ZERO, _ZERO]
        cols = [(_ONE, Fraction(pt.m), Fraction(pt.n)) for pt in LEGITIMATE_POINTS]
        cols += [(_ZERO, Fraction(3), _ZERO), (_ZERO, _ZERO, Fraction(3))]
        self._columns = cols
        i30 = LEGITIMATE_POINTS.index(IntegerPoint(3, 0))
        i01 = LEGITIMATE_POINTS.index(IntegerPoint(0, 1))
        # beta_30 = mu_r, beta_01 = 1 - mu_r is feasible at every feasible point
        self._start = _Tableau(cols, [(1, i30), (0, i01), (2, self._SLACK_T)])
        self._warm = self._start.copy()
        self._warm_z = self._warm.reduced_costs(self._cost_vec)
        self._all = frozenset(range(len(cols)))

    @staticmethod
    def _rhs(p: CachePoint) -> tuple[Fraction, Fraction, Fraction]:
        return (_ONE, 3 * p.mu_r, 3 * p.mu_t)

    def _optimal_basis(self, p: CachePoint):
        b = self._rhs(p)
        x = self._warm.rhs(b)
        if all(v >= 0 for v in x):
            if all(v >= 0 for v in self._warm_z):
                return self._warm, x, self._warm_z
            tab = self._warm.copy()
        else:
            tab = self._start.copy()
            x = tab.rhs(b)
        z = _bland(tab, x, self._cost_vec, self._all)
        self._warm, self._warm_z = tab, z
        return tab, x, z

    def optimum(self, p: CachePoint) -> Fraction:
        """Optimal delivery time at ``p`` (no certificate)."""
        p.require_feasible()
        tab, x, _ = self._optimal_basis(p)
        return sum((self._cost_vec[c] * v for c, v in zip(tab.basis, x) if v), _ZERO)

    def solve_sharing(self, p: CachePoint) -> tuple[Fraction, MemorySharing]:
        p.require_feasible()
        tab, x, z = self._optimal_basis(p)
        tau = sum((self._cost_vec[c] * v for c, v in zip(tab.basis, x) if v), _ZERO)
        face = {j for j in range(tab.ncols) if z[j] == 0}
        basic = set(tab.basis)
        if any(j not in basic for j in face):
            tab = tab.copy()
            x = list(x)
            nvar = len(LEGITIMATE_POINTS)
            for k in range(nvar):
                if k not in face:
                    continue
                obj = [_ONE if j == k else _ZERO for j in range(tab.ncols)]
                zk = _bland(tab, x, obj, face)
                face = {j for j in face if zk[j] == 0}
                basic = set(tab.basis)
                if not any(j not in basic for j in face):
                    break
        vals = {c: v for c, v in zip(tab.basis, x)}
        beta = {pt: vals.get(i, _ZERO) for i, pt in enumerate(LEGITIMATE_POINTS)}
        return tau, MemorySharing(beta)

    def solve(self, p: CachePoint) -> NdtReport:
        tau, sharing = self.solve_sharing(p)
        per_group = {pt: sharing.beta[pt] * self.costs[pt] for pt in LEGITIMATE_POINTS}
        return NdtReport(
            point=p, cfg=self.cfg, tau_upper=tau, sharing=sharing, per_group_ndt=per_group
        )


def solve_ndt_lp(p: CachePoint, cfg: AntennaConfig) -> NdtReport:
    """Exact optimum of the memory-sharing program at ``p``.

    Returns a report whose ``tau_upper`` is the optimal value, ``sharing``
    an optimal vertex with at most three nonzero weights, and
    ``per_group_ndt`` the contribution ``beta_mn * (1 - m/3) / d_mn`` of
    each integer point.
    """
    return NdtSolver(cfg).solve(p)


def sharing_to_splitting(s: MemorySharing) -> dict[IntegerPoint, Fraction]:
    """Per-subfile fractions ``a_mn = beta_mn / (C(3,m) C(3,n))``."""
    return {pt: w / pt.multiplicity for pt, w in s.beta.items()}


def splitting_usage(a: Mapping[IntegerPoint, Fraction]) -> tuple[Fraction, Fraction, Fraction]:
    """(file fraction placed, per-receiver load, per-transmitter load)."""
    total = rx = tx = _ZERO
    for pt, v in a.items():
        if not v:
            continue
        total += pt.multiplicity * v
        rx += math.comb(2, pt.m - 1) * math.comb(3, pt.n) * v if pt.m else _ZERO
        tx += math.comb(3, pt.m) * math.comb(2, pt.n - 1) * v if pt.n else _ZERO
    return total, rx, tx


def ndt_from_splitting(
    a: Mapping[IntegerPoint, Fraction],
    cfg: AntennaConfig,
    point: CachePoint | None = None,
) -> Fraction:
    """Delivery time of a symmetric file splitting.

    ``a`` maps each legitimate point to the fraction of a file held by one
    subfile of that class. The whole file must be placed (index 1 of
    :class:`ConstraintViolation`); when ``point`` is given the receiver
    (index 2) and transmitter (index 3) loads are checked too.
    """
    a = {(pt if isinstance(pt, IntegerPoint) else IntegerPoint(*pt)): Fraction(v) for pt, v in a.items()}
    for pt, v in a.items():
        if not pt.legitimate:
            raise ConstraintViolation(1, f"{pt} is not a legitimate cache state")
        if v < 0:
            raise ConstraintViolation(1, f"negative fraction at {pt}")
    total, rx, tx = splitting_usage(a)
    if total != 1:
        raise ConstraintViolation(1, f"subfiles cover {total} of the file")
    if point is not None:
        if rx > point.mu_r:
            raise ConstraintViolation(2, f"receiver load {rx} exceeds {point.mu_r}")
        if tx > point.mu_t:
            raise ConstraintViolation(3, f"transmitter load {tx} exceeds {point.mu_t}")
    d = dof_table(cfg)
    return sum((w * a.get(pt, _ZERO) / d[pt] for pt, w in NDT_WEIGHTS.items()), _ZERO)
