"""Closed-form optimal NDT as a maximum of affine pieces.

The antenna ratio ``N/M`` selects one of ten cases. Within a case the
optimal delivery time is convex and piecewise affine in the cache sizes,
so it equals the pointwise maximum of its affine pieces; the active
region at a point is the (first) maximizing piece.

Pieces are written with the per-user DoF values of :mod:`dof_tables`
wherever a case's expression depends on one, so each case holds for every
ratio in its interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .dof_tables import dof_table
from .model import AntennaConfig, CachePoint, IntegerPoint

__all__ = [
    "AffinePiece",
    "CASE_BOUNDS",
    "case_of",
    "pieces_of",
    "closed_form_ndt",
]

# right endpoints of cases 1..9; case 10 is (3, inf)
CASE_BOUNDS: tuple[Fraction, ...] = (
    Fraction(1, 3),
    Fraction(4, 9),
    Fraction(2, 3),
    Fraction(20, 27),
    Fraction(1),
    Fraction(4, 3),
    Fraction(2),
    Fraction(12, 5),
    Fraction(3),
)


@dataclass(frozen=True)
class AffinePiece:
    """``coeff_mu_r * mu_r + coeff_mu_t * mu_t + constant``."""

    case_id: int
    region_id: str
    coeff_mu_r: Fraction
    coeff_mu_t: Fraction
    constant: Fraction

    def __call__(self, mu_r: Fraction, mu_t: Fraction) -> Fraction:
        return self.coeff_mu_r * mu_r + self.coeff_mu_t * mu_t + self.constant

    def at(self, p: CachePoint) -> Fraction:
        return self(p.mu_r, p.mu_t)


def case_of(cfg: AntennaConfig) -> int:
    """Index (1..10) of the right-closed ratio interval holding ``N/M``."""
    r = cfg.ratio()
    for i, hi in enumerate(CASE_BOUNDS, start=1):
        if r <= hi:
            return i
    return 10


def _lin(k, cr, ct, c0):
    # k * (cr*mu_r + ct*mu_t + c0)
    return (k * cr, k * ct, k * c0)


def _add(*terms):
    return tuple(sum(t[i] for t in terms) for i in range(3))


def _case_terms(case: int, M: int, N: int) -> list[tuple[Fraction, Fraction, Fraction]]:
    d = dof_table(AntennaConfig(M, N))
    iN = Fraction(1, N)
    iM = Fraction(1, M)
    iD01 = 1 / d[IntegerPoint(0, 1)]
    iD02 = 1 / d[IntegerPoint(0, 2)]
    iD11 = 1 / d[IntegerPoint(1, 1)]
    R1 = _lin(iN, -1, 0, 1)

    if case == 1:
        return [R1]
    if case == 2:
        return [R1, _add(_lin(iN, 1, 3, -1), _lin(3 * iM, -2, -3, 2))]
    if case == 3:
        return [
            R1,
            _lin(iN / 3, -5, -3, 5),
            _add(_lin(iD01, -3, -3, 2), _lin(iN / 3, 7, 9, -3)),
            _add(_lin(3 * iD01, -1, -2, 1), _lin(7 * iN / 3, 1, 3, -1)),
        ]
    # shared by cases 4 and 5
    r45 = [
        _add(_lin(iD01, -3, -3, 2), _lin(7 * iN / 3, 1, 0, 0), _lin(3 * iM / 2, 0, 3, -1)),
        _add(_lin(3 * iD01, -1, -2, 1), _lin(7 * iN / 3, 1, 3, -1)),
    ]
    if case == 4:
        return [
            R1,
            # memory sharing of (0,2), (0,3) and (3,0)
            _add(_lin(3 * iD02, -1, -1, 1), _lin(iN, 2, 3, -2)),
            _add(_lin(7 * iN / 3, -2, -3, 2), _lin(9 * iM / 2, 1, 2, -1)),
        ] + r45
    if case == 5:
        return [
            R1,
            _lin(iN / 3, -4, -1, 4),
            _add(_lin(7 * iN / 3, 1, 0, 0), _lin(9 * iM / 2, -2, -1, 1), _lin(iN, 3, 3, -2)),
        ] + r45
    # shared by cases 6 and 7: sharing (0,1) with (1,1) and (0,3) or (3,0)
    r6_4 = _add(_lin(2 * iD11, 1, 0, 0), _lin(3 * iD01 / 2, -2, -1, 1), _lin(iM / 2, 0, 3, -1))
    r6_5 = _add(_lin(2 * iD11, 1, 3, -1), _lin(3 * iD01, -1, -2, 1))
    if case == 6:
        return [
            R1,
            _add(_lin(iN / 2, 4, 3, -3), _lin(iM / 2, -6, -3, 5)),
            _add(_lin(2 * iD11, -1, -1, 1), _lin(iN / 2, 2, 1, -1), _lin(iM / 2, 0, 3, -1)),
            r6_4,
            r6_5,
            _add(_lin(2 * iD11, -1, -1, 1), _lin(iN, 1, 2, -1)),
        ]
    if case == 7:
        return [
            R1,
            _lin(iN / 6, -12, -3, 11),
            _add(_lin(iN / 2, 4, -1, 1), _lin(iM, -3, 0, 1)),
            r6_4,
            r6_5,
            _lin(iN, -2, -1, 2),
        ]
    r89_23 = [
        _add(_lin(iN / 3, 3, 0, -1), _lin(iM / 3, -3, 0, 2)),
        _add(_lin(iN / 6, -12, -9, 13), _lin(iM / 6, 0, 3, -1)),
    ]
    r89_78 = [_lin(3 * iN, -2, -3, 2), _lin(iN, -2, -1, 2)]
    if case == 8:
        return (
            [R1]
            + r89_23
            + [
                _add(_lin(3 * iN / 2, 0, -1, 1), _lin(iM / 2, -4, 1, 1)),
                _add(_lin(3 * iN / 2, -8, -5, 5), _lin(iM, 3, 3, -2)),
                _lin(iN / 2, -12, -3, 7),
            ]
            + r89_78
        )
    if case == 9:
        return (
            [R1]
            + r89_23
            + [
                _add(_lin(iD02, -3, 0, 1), _lin(iN / 2, 3, -3, 2), _lin(iM / 6, 3, 3, -2)),
                _add(_lin(3 * iD02, 0, -1, 1), _lin(iM, -2, 3, -2)),
                _add(_lin(3 * iN, -2, -3, 2), _lin(iM, 0, 3, -1)),
            ]
            + r89_78
        )
    return [
        _lin(iM / 3, -1, 0, 1),
        _lin(iM / 9, -6, 0, 5),
        _lin(iM, -2, 0, 1),
        _lin(iM, -2, -3, 2),
        _lin(iM / 3, -2, -1, 2),
    ]


@lru_cache(maxsize=1024)
def _pieces(M: int, N: int) -> tuple[AffinePiece, ...]:
    case = case_of(AntennaConfig(M, N))
    return tuple(
        AffinePiece(case, f"R{i}", Fraction(cr), Fraction(ct), Fraction(c0))
        for i, (cr, ct, c0) in enumerate(_case_terms(case, M, N), start=1)
    )


def pieces_of(cfg: AntennaConfig) -> list[AffinePiece]:
    """Affine pieces of the case selected by ``cfg``, in region order."""
    return list(_pieces(cfg.M, cfg.N))


def closed_form_ndt(p: CachePoint, cfg: AntennaConfig) -> tuple[Fraction, str]:
    """Optimal NDT at ``p`` and the identifier of the active piece.

    Ties go to the piece listed first.

    Raises
    ------
    InfeasibleCachePoint
        If ``p`` lies outside the feasible polygon.
    ArithmeticError
        If the maximum is negative, which would mean a wrong piece table.
    """
    p.require_feasible()
    best = None
    best_id = None
    r, t = p.mu_r, p.mu_t
    for piece in _pieces(cfg.M, cfg.N):
        v = piece.coeff_mu_r * r + piece.coeff_mu_t * t + piece.constant
        if best is None or v > best:
            best, best_id = v, piece.region_id
    if best < 0:
        raise ArithmeticError(f"negative closed-form value {best} at {p} for {cfg}")
    return best, best_id
