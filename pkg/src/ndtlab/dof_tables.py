"""Per-user degrees of freedom for every delivery group.

A bit cached at ``m`` receivers and ``n`` transmitters is delivered over a
channel whose structure depends only on ``(m, n)``; the functions here
return the per-user DoF that linear schemes achieve on that channel.
Branch intervals in ``N/M`` are right-closed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import NothingToDeliver
from .model import AntennaConfig, IntegerPoint

__all__ = [
    "ChannelKind",
    "DofEntry",
    "channel_kind",
    "dof_per_user",
    "dof_entry",
    "dof_table",
    "general_dof_x",
    "general_dof_x_candidates",
    "general_dof_broadcast",
]


class ChannelKind(enum.Enum):
    XChannel = "XChannel"
    PartialCoopX = "PartialCoopX"
    Broadcast = "Broadcast"
    XMulticast = "XMulticast"
    PartialCoopXMulticast = "PartialCoopXMulticast"
    FullCoopXMulticast = "FullCoopXMulticast"
    Multicast = "Multicast"
    ReceiverOnly = "ReceiverOnly"


_KIND = {
    (0, 1): ChannelKind.XChannel,
    (0, 2): ChannelKind.PartialCoopX,
    (0, 3): ChannelKind.Broadcast,
    (1, 1): ChannelKind.XMulticast,
    (1, 2): ChannelKind.PartialCoopXMulticast,
    (1, 3): ChannelKind.FullCoopXMulticast,
    (2, 1): ChannelKind.Multicast,
    (2, 2): ChannelKind.Multicast,
    (2, 3): ChannelKind.Multicast,
}


@dataclass(frozen=True)
class DofEntry:
    point: IntegerPoint
    dof: Fraction | None
    channel_kind: ChannelKind


def channel_kind(point: IntegerPoint) -> ChannelKind:
    if not point.legitimate:
        raise ValueError(f"{point} is not a legitimate integer point")
    if point.m == 3:
        return ChannelKind.ReceiverOnly
    return _KIND[(point.m, point.n)]


def _dof_x_channel(M: int, N: int) -> Fraction:
    # Three-user MIMO interference/X channel with linear schemes.
    lo, hi = min(M, N), max(M, N)
    if lo == hi:
        # 1/xi -> 0 as the ratio tends to one
        return Fraction(lo, 2)
    xi = -(-lo // (hi - lo))
    inv = Fraction(1, xi)
    return min(lo / (2 - inv), hi / (2 + inv))


def _dof_partial_coop_x(M: int, N: int) -> Fraction:
    r = Fraction(N, M)
    if r <= Fraction(2, 3):
        return Fraction(N)
    if r <= Fraction(5, 3):
        return Fraction(2 * M, 3)
    if r <= Fraction(5, 2):
        return Fraction(2 * N, 5)
    return Fraction(M)


def _dof_x_multicast(M: int, N: int) -> Fraction:
    r = Fraction(N, M)
    if r <= 1:
        return Fraction(6 * N, 7)
    if r <= Fraction(9, 7):
        return Fraction(6 * M, 7)
    if r <= 3:
        return Fraction(2 * N, 3)
    return Fraction(2 * M)


def _dof_partial_coop_x_multicast(M: int, N: int) -> Fraction:
    r = Fraction(N, M)
    if r <= 1:
        return Fraction(N)
    if r <= Fraction(3, 2):
        return Fraction(M)
    if r <= 3:
        return Fraction(2 * N, 3)
    return Fraction(2 * M)


@lru_cache(maxsize=4096)
def _dof(m: int, n: int, M: int, N: int) -> Fraction:
    if m == 0:
        if n == 1:
            return _dof_x_channel(M, N)
        if n == 2:
            return _dof_partial_coop_x(M, N)
        return Fraction(min(M, N))
    if m == 1:
        if n == 1:
            return _dof_x_multicast(M, N)
        if n == 2:
            return _dof_partial_coop_x_multicast(M, N)
        return Fraction(min(N, 2 * M))
    # m == 2: multicast to all receivers, antenna deactivation
    return Fraction(min(N, 3 * M))


def dof_per_user(point: IntegerPoint, cfg: AntennaConfig) -> Fraction:
    """Per-user DoF ``d_mn`` of the delivery group at ``point``.

    Raises
    ------
    NothingToDeliver
        If ``point.m == 3``: such bits are already at every receiver.
    ValueError
        If ``point`` is not legitimate.
    """
    if not point.legitimate:
        raise ValueError(f"{point} is not a legitimate integer point")
    if point.m == 3:
        raise NothingToDeliver(f"{point} is cached at all receivers")
    return _dof(point.m, point.n, cfg.M, cfg.N)


def dof_entry(point: IntegerPoint, cfg: AntennaConfig) -> DofEntry:
    kind = channel_kind(point)
    dof = None if point.m == 3 else _dof(point.m, point.n, cfg.M, cfg.N)
    return DofEntry(point, dof, kind)


def dof_table(cfg: AntennaConfig) -> dict[IntegerPoint, Fraction]:
    """``d_mn`` for every legitimate point with ``m < 3``."""
    return {
        IntegerPoint(m, n): _dof(m, n, cfg.M, cfg.N)
        for m in range(3)
        for n in range(1, 4)
    }


def _general_x_branch_rx(M: int, N: int, q: int, n_tx: int, n_rx: int) -> Fraction:
    # receivers hold at least q times the transmit antennas
    return min(Fraction(M * n_tx, n_rx), Fraction(q * M * n_tx, n_tx + q * n_rx - q))


def _general_x_branch_tx(M: int, N: int, q: int, n_tx: int, n_rx: int) -> Fraction:
    return min(Fraction(N), Fraction(q * N * n_tx, q * n_tx + n_rx - q))


def general_dof_x_candidates(
    cfg: AntennaConfig, n_tx: int, n_rx: int
) -> dict[str, Fraction]:
    """Achievable X-channel DoF for each applicable branch and integer ``q``.

    Keys are ``"rx:q"`` for the ``N >= qM`` branch and ``"tx:q"`` for the
    ``M >= qN`` branch, with ``q`` running from 1 to its floor value (fewer
    active antennas realize every smaller ``q``).
    """
    M, N = cfg.M, cfg.N
    out = {}
    for q in range(1, N // M + 1):
        out[f"rx:{q}"] = _general_x_branch_rx(M, N, q, n_tx, n_rx)
    for q in range(1, M // N + 1):
        out[f"tx:{q}"] = _general_x_branch_tx(M, N, q, n_tx, n_rx)
    return out


def general_dof_x(cfg: AntennaConfig, n_tx: int, n_rx: int) -> Fraction:
    """Per-user DoF of an ``n_tx`` by ``n_rx`` MIMO X channel.

    Uses ``q = floor(N/M)`` when ``N >= M`` and ``q = floor(M/N)``
    otherwise; at ``M == N`` both branches apply and the larger is kept.
    """
    if n_tx < 2 or n_rx < 2:
        raise ValueError("need at least two transmitters and two receivers")
    M, N = cfg.M, cfg.N
    vals = []
    if N >= M:
        vals.append(_general_x_branch_rx(M, N, N // M, n_tx, n_rx))
    if M >= N:
        vals.append(_general_x_branch_tx(M, N, M // N, n_tx, n_rx))
    return max(vals)


def general_dof_broadcast(cfg: AntennaConfig, n_tx: int, n_rx: int) -> Fraction:
    """Per-user DoF when all transmitters act as one ``n_tx * M`` antenna array."""
    if n_tx < 2 or n_rx < 2:
        raise ValueError("need at least two transmitters and two receivers")
    return min(Fraction(cfg.M * n_tx, n_rx), Fraction(cfg.N))
