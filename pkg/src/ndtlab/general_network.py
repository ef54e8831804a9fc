"""Bounds for networks with ``n_tx`` transmitters and ``n_rx`` receivers.

Only two non-trivial integer points have known DoF in general: one
transmitter per bit (an MIMO X channel) and all transmitters per bit (a
broadcast channel). Memory sharing among those two and the two
receiver-cached corners gives an achievable NDT over the whole region.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .dof_tables import general_dof_broadcast, general_dof_x
from .errors import InfeasibleCachePoint
from .model import AntennaConfig, CachePoint

__all__ = [
    "NetworkShape",
    "is_feasible_general",
    "general_lower_bound",
    "general_upper_bound",
    "general_region",
    "general_optimality",
    "four_point_lp",
]

_ZERO = Fraction(0)


@dataclass(frozen=True)
class NetworkShape:
    n_tx: int
    n_rx: int

    def __post_init__(self):
        for name in ("n_tx", "n_rx"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 2:
                raise ValueError(f"{name} must be an integer >= 2, got {v!r}")


def is_feasible_general(p: CachePoint, shape: NetworkShape) -> bool:
    return p.mu_r + shape.n_tx * p.mu_t >= 1


def _require(p: CachePoint, shape: NetworkShape) -> None:
    if not is_feasible_general(p, shape):
        raise InfeasibleCachePoint(
            f"mu_r + {shape.n_tx} mu_t < 1 at ({p.mu_r}, {p.mu_t})"
        )


def general_lower_bound(p: CachePoint, cfg: AntennaConfig, shape: NetworkShape) -> Fraction:
    """``max{(1-mu_r)/N, max_s s(1 - s mu_r)/(n_tx M)}`` over ``s <= n_rx``, at least 0."""
    r = p.mu_r
    best = (1 - r) / cfg.N
    for s in range(1, shape.n_rx + 1):
        best = max(best, Fraction(s, shape.n_tx * cfg.M) * (1 - s * r))
    return max(best, _ZERO)


def general_region(p: CachePoint) -> str:
    return "R1" if p.mu_r + p.mu_t >= 1 else "R2"


def general_upper_bound(p: CachePoint, cfg: AntennaConfig, shape: NetworkShape) -> Fraction:
    """Achievable NDT from sharing the four corner strategies.

    Raises InfeasibleCachePoint outside ``mu_r + n_tx mu_t >= 1``.
    """
    _require(p, shape)
    inv_b = 1 / general_dof_broadcast(cfg, shape.n_tx, shape.n_rx)
    inv_x = 1 / general_dof_x(cfg, shape.n_tx, shape.n_rx)
    if p.mu_r + p.mu_t >= 1:
        return inv_b * (1 - p.mu_r)
    k = Fraction(shape.n_tx, shape.n_tx - 1)
    return (inv_b - k * (inv_b - inv_x)) * (1 - p.mu_r) - k * (inv_x - inv_b) * p.mu_t


def _solve3(a, b):
    """Solve a 3x3 rational system; None if singular."""
    m = [list(row) + [rhs] for row, rhs in zip(a, b)]
    n = 3
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c] / m[c][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [m[i][n] / m[i][i] for i in range(n)]


def four_point_lp(p: CachePoint, cfg: AntennaConfig, shape: NetworkShape) -> Fraction:
    """Optimum of the four-point sharing program, by basis enumeration."""
    _require(p, shape)
    nt = shape.n_tx
    inv_b = 1 / general_dof_broadcast(cfg, nt, shape.n_rx)
    inv_x = 1 / general_dof_x(cfg, nt, shape.n_rx)
    # columns: (total, rx load, tx load), cost
    cols = [
        ((1, 0, Fraction(1, nt)), inv_x),
        ((1, 0, 1), inv_b),
        ((1, 1, 0), _ZERO),
        ((1, 1, 1), _ZERO),
        ((0, 1, 0), _ZERO),  # receiver slack
        ((0, 0, 1), _ZERO),  # transmitter slack
    ]
    rhs = (1, p.mu_r, p.mu_t)
    best = None
    for basis in itertools.combinations(range(len(cols)), 3):
        a = [[Fraction(cols[j][0][i]) for j in basis] for i in range(3)]
        x = _solve3(a, rhs)
        if x is None or any(v < 0 for v in x):
            continue
        val = sum((cols[j][1] * v for j, v in zip(basis, x)), _ZERO)
        if best is None or val < best:
            best = val
    return best


def general_optimality(p: CachePoint, cfg: AntennaConfig, shape: NetworkShape) -> bool:
    """Whether the four-point NDT is provably optimal at ``p``.

    True when ``N/M <= 1/n_rx``, or ``N/M <= n_tx/n_rx`` with
    ``mu_r + mu_t >= 1``. In that case the upper and lower bounds are
    checked for exact equality (AssertionError otherwise).
    """
    _require(p, shape)
    r = cfg.ratio()
    ok = r <= Fraction(1, shape.n_rx) or (
        r <= Fraction(shape.n_tx, shape.n_rx) and p.mu_r + p.mu_t >= 1
    )
    if ok:
        up = general_upper_bound(p, cfg, shape)
        lo = general_lower_bound(p, cfg, shape)
        if up != lo:
            raise AssertionError(f"bounds differ ({up} vs {lo}) at {p}, {cfg}, {shape}")
    return ok
