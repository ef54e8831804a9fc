from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ndtlab.dof_tables import (
    ChannelKind,
    channel_kind,
    dof_entry,
    dof_per_user,
    dof_table,
    general_dof_broadcast,
    general_dof_x,
    general_dof_x_candidates,
)
from ndtlab.errors import NothingToDeliver
from ndtlab.model import LEGITIMATE_POINTS, AntennaConfig, IntegerPoint

P = IntegerPoint
ants = st.integers(min_value=1, max_value=40)


@pytest.mark.parametrize(
    "pt, M, N, want",
    [
        (P(0, 3), 2, 3, F(2)),
        (P(1, 3), 2, 3, F(3)),
        (P(0, 1), 3, 2, F(6, 5)),
        (P(1, 1), 3, 3, F(18, 7)),
        (P(0, 2), 3, 5, F(2)),
        (P(2, 1), 1, 5, F(3)),
        (P(0, 1), 2, 2, F(1)),
        (P(0, 1), 1, 3, F(1)),
        (P(1, 2), 1, 3, F(2)),
        (P(1, 1), 1, 3, F(2)),
    ],
)
def test_dof_values(pt, M, N, want):
    assert dof_per_user(pt, AntennaConfig(M, N)) == want


def _x_channel_oracle(M, N):
    # independent evaluation: ratio-based form of the same formula
    lo, hi = min(M, N), max(M, N)
    if lo == hi:
        return F(lo, 2)
    k = F(lo, hi - lo)
    xi = k.numerator // k.denominator + (1 if k.denominator != 1 else 0)
    a = F(lo) / (2 - F(1, xi))
    b = F(hi) / (2 + F(1, xi))
    return min(a, b)


@given(ants, ants)
def test_x_channel_matches_oracle(M, N):
    assert dof_per_user(P(0, 1), AntennaConfig(M, N)) == _x_channel_oracle(M, N)


def test_receiver_cached_points_have_nothing_to_deliver():
    for n in range(4):
        with pytest.raises(NothingToDeliver):
            dof_per_user(P(3, n), AntennaConfig(2, 2))
    assert dof_entry(P(3, 1), AntennaConfig(2, 2)).dof is None
    assert channel_kind(P(3, 0)) is ChannelKind.ReceiverOnly


def test_illegitimate_point_rejected():
    with pytest.raises(ValueError):
        dof_per_user(P(0, 0), AntennaConfig(1, 1))


def test_channel_kinds():
    assert channel_kind(P(0, 1)) is ChannelKind.XChannel
    assert channel_kind(P(1, 2)) is ChannelKind.PartialCoopXMulticast
    assert {channel_kind(P(2, n)) for n in (1, 2, 3)} == {ChannelKind.Multicast}


def test_table_covers_nine_points():
    t = dof_table(AntennaConfig(3, 5))
    assert sorted(t) == [pt for pt in LEGITIMATE_POINTS if pt.m < 3]


@given(ants, ants)
def test_dof_positive_and_capped(M, N):
    cfg = AntennaConfig(M, N)
    for pt, d in dof_table(cfg).items():
        assert 0 < d <= min(N, 3 * M)


@given(ants, ants)
def test_more_transmitters_caching_never_hurts(M, N):
    t = dof_table(AntennaConfig(M, N))
    for m in range(3):
        assert t[P(m, 1)] <= t[P(m, 2)] <= t[P(m, 3)]


@given(ants, ants)
def test_dof_monotone_in_antennas(M, N):
    a = dof_table(AntennaConfig(M, N))
    b = dof_table(AntennaConfig(M + 1, N))
    c = dof_table(AntennaConfig(M, N + 1))
    for pt in a:
        # the X-channel formula is only monotone along fixed-ratio rays
        if pt == P(0, 1):
            continue
        assert b[pt] >= a[pt] and c[pt] >= a[pt], pt


@given(ants, ants, st.integers(min_value=2, max_value=5))
def test_dof_scales_linearly(M, N, k):
    a = dof_table(AntennaConfig(M, N))
    b = dof_table(AntennaConfig(k * M, k * N))
    assert all(b[pt] == k * a[pt] for pt in a)


@pytest.mark.parametrize("pt", [P(0, 2), P(1, 1), P(1, 2)])
def test_piecewise_continuous_at_breakpoints(pt):
    # per-antenna DoF as a function of N/M has no jumps at the breakpoints
    for r in (F(2, 3), F(5, 3), F(5, 2), F(1), F(9, 7), F(3), F(3, 2)):
        big = 7 * 9 * 10 * r.denominator
        at = dof_per_user(pt, AntennaConfig(big, int(big * r))) / big
        below = dof_per_user(pt, AntennaConfig(big, int(big * r) - 1)) / big
        above = dof_per_user(pt, AntennaConfig(big, int(big * r) + 1)) / big
        assert abs(at - below) <= F(1, big) and abs(above - at) <= F(1, big)


def test_general_dof_examples():
    assert general_dof_x(AntennaConfig(1, 1), 3, 3) == F(3, 5)
    assert general_dof_x(AntennaConfig(1, 2), 2, 2) == F(1)
    assert general_dof_broadcast(AntennaConfig(2, 3), 3, 3) == 2
    assert general_dof_broadcast(AntennaConfig(1, 5), 4, 2) == 2
    assert general_dof_broadcast(AntennaConfig(1, 1), 2, 2) == 1


@given(ants, ants, st.integers(2, 6), st.integers(2, 6))
def test_floor_q_is_best_candidate(M, N, nt, nr):
    # a larger q never loses, so the floor value is the maximum over candidates
    cands = general_dof_x_candidates(AntennaConfig(M, N), nt, nr)
    assert general_dof_x(AntennaConfig(M, N), nt, nr) == max(cands.values())


@given(ants, ants)
def test_general_broadcast_specializes_to_three_users(M, N):
    cfg = AntennaConfig(M, N)
    assert general_dof_broadcast(cfg, 3, 3) == dof_per_user(P(0, 3), cfg)
