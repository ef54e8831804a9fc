import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ndtlab.bounds_gap import lower_bound
from ndtlab.errors import ConstraintViolation, InfeasibleCachePoint
from ndtlab.model import LEGITIMATE_POINTS, AntennaConfig, CachePoint, IntegerPoint, MemorySharing
from ndtlab.ndt_program import (
    NdtSolver,
    build_lp,
    ndt_from_splitting,
    point_costs,
    sharing_to_splitting,
    solve_ndt_lp,
    splitting_usage,
)

P = IntegerPoint
unit = st.fractions(min_value=0, max_value=1, max_denominator=24)
ants = st.integers(min_value=1, max_value=10)


def _solve(a, b):
    n = len(b)
    m = [list(map(F, row)) + [F(v)] for row, v in zip(a, b)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c] / m[c][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [m[i][n] / m[i][i] for i in range(n)]


def vertex_oracle(p, cfg):
    """Minimum over all basic feasible solutions of the 3-row program."""
    costs = point_costs(cfg)
    cols = [((1, F(pt.m, 3), F(pt.n, 3)), costs[pt]) for pt in LEGITIMATE_POINTS]
    cols += [((0, 1, 0), 0), ((0, 0, 1), 0)]
    rhs = (1, p.mu_r, p.mu_t)
    best = None
    for basis in itertools.combinations(range(len(cols)), 3):
        x = _solve([[cols[j][0][i] for j in basis] for i in range(3)], rhs)
        if x is None or min(x) < 0:
            continue
        val = sum(cols[j][1] * v for j, v in zip(basis, x))
        best = val if best is None else min(best, val)
    return best


def feasible_points(draw_r, draw_t):
    return st.tuples(draw_r, draw_t).filter(lambda rt: rt[0] + 3 * rt[1] >= 1)


@settings(max_examples=60, deadline=None)
@given(feasible_points(unit, unit), ants, ants)
def test_simplex_matches_vertex_enumeration(rt, M, N):
    p, cfg = CachePoint(*rt), AntennaConfig(M, N)
    assert solve_ndt_lp(p, cfg).tau_upper == vertex_oracle(p, cfg)


@settings(max_examples=80, deadline=None)
@given(feasible_points(unit, unit), ants, ants)
def test_sharing_certifies_and_prices_optimum(rt, M, N):
    p, cfg = CachePoint(*rt), AntennaConfig(M, N)
    rep = solve_ndt_lp(p, cfg)
    s = rep.sharing
    assert s.certifies(p)
    assert len(s.support()) <= 3
    costs = point_costs(cfg)
    assert sum(s.beta[pt] * costs[pt] for pt in LEGITIMATE_POINTS) == rep.tau_upper
    assert sum(rep.per_group_ndt.values()) == rep.tau_upper
    assert ndt_from_splitting(sharing_to_splitting(s), cfg, p) == rep.tau_upper


@settings(max_examples=60, deadline=None)
@given(feasible_points(unit, unit), feasible_points(unit, unit), ants, ants)
def test_convex_in_cache_sizes(a, b, M, N):
    cfg = AntennaConfig(M, N)
    s = NdtSolver(cfg)
    pa, pb = CachePoint(*a), CachePoint(*b)
    mid = CachePoint((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
    assert s.optimum(mid) <= (s.optimum(pa) + s.optimum(pb)) / 2


@settings(max_examples=60, deadline=None)
@given(feasible_points(unit, unit), unit, unit, ants, ants)
def test_monotone_in_cache_sizes(rt, dr, dt, M, N):
    cfg = AntennaConfig(M, N)
    s = NdtSolver(cfg)
    p = CachePoint(*rt)
    q = CachePoint(min(1, rt[0] + dr), min(1, rt[1] + dt))
    assert s.optimum(q) <= s.optimum(p)


@settings(max_examples=40, deadline=None)
@given(feasible_points(unit, unit), ants, ants)
def test_continuity_small_steps(rt, M, N):
    # piecewise affine with slopes bounded by the largest point cost
    cfg = AntennaConfig(M, N)
    s = NdtSolver(cfg)
    p = CachePoint(*rt)
    eps = F(1, 1000)
    q = CachePoint(min(1, rt[0] + eps), min(1, rt[1] + eps))
    lip = 6 * max(point_costs(cfg).values())
    assert abs(s.optimum(p) - s.optimum(q)) <= lip * eps


@settings(max_examples=40, deadline=None)
@given(st.lists(feasible_points(unit, unit), min_size=2, max_size=8), ants, ants)
def test_warm_start_does_not_change_results(rts, M, N):
    cfg = AntennaConfig(M, N)
    warm = NdtSolver(cfg)
    for rt in rts:
        p = CachePoint(*rt)
        tw, sw = warm.solve_sharing(p)
        tc, sc = NdtSolver(cfg).solve_sharing(p)
        assert tw == tc and sw == sc


@settings(max_examples=60, deadline=None)
@given(feasible_points(unit, unit), ants, ants)
def test_lower_bound_below_optimum(rt, M, N):
    p, cfg = CachePoint(*rt), AntennaConfig(M, N)
    assert lower_bound(p, cfg) <= solve_ndt_lp(p, cfg).tau_upper


def test_reference_values():
    assert solve_ndt_lp(CachePoint(F(1, 3), F(2, 3)), AntennaConfig(2, 2)).tau_upper == F(1, 3)
    assert solve_ndt_lp(CachePoint(1, 1), AntennaConfig(3, 2)).tau_upper == 0
    assert solve_ndt_lp(CachePoint(0, 1), AntennaConfig(2, 2)).tau_upper == F(1, 2)
    rep = solve_ndt_lp(CachePoint(0, F(2, 3)), AntennaConfig(3, 5))
    assert rep.tau_upper == F(5, 12)
    assert rep.sharing.to_dict() == {"01": "1/2", "03": "1/2"}


def test_only_x_channel_fits_tightest_point():
    rep = solve_ndt_lp(CachePoint(0, F(1, 3)), AntennaConfig(3, 2))
    assert rep.sharing.to_dict() == {"01": "1"}


def test_infeasible_point_raises():
    with pytest.raises(InfeasibleCachePoint):
        solve_ndt_lp(CachePoint(F(1, 10), F(1, 5)), AntennaConfig(2, 2))
    with pytest.raises(InfeasibleCachePoint):
        build_lp(CachePoint(0, F(1, 4)), AntennaConfig(2, 2))


def test_build_lp_structure():
    inst = build_lp(CachePoint(F(1, 3), F(2, 3)), AntennaConfig(2, 2))
    assert inst.num_vars == 13


def test_costs():
    c = point_costs(AntennaConfig(3, 2))
    assert c[P(0, 1)] == 1 / F(6, 5)
    assert c[P(3, 2)] == 0


def test_splitting_examples():
    assert sharing_to_splitting(MemorySharing({(1, 1): 1}))[P(1, 1)] == F(1, 9)
    a = sharing_to_splitting(MemorySharing({(3, 0): F(1, 3), (0, 3): F(2, 3)}))
    assert a[P(3, 0)] == F(1, 3) and a[P(0, 3)] == F(2, 3)
    assert sharing_to_splitting(MemorySharing({(3, 3): 1}))[P(3, 3)] == 1
    assert splitting_usage({P(1, 1): F(1, 9)}) == (1, F(1, 3), F(1, 3))


def test_ndt_from_splitting_examples():
    assert ndt_from_splitting({P(0, 2): F(1, 3)}, AntennaConfig(3, 5)) == F(1, 2)
    for M in range(1, 5):
        assert ndt_from_splitting({P(0, 3): F(2, 3), P(3, 0): F(1, 3)}, AntennaConfig(M, M)) == F(2, 3 * M)
    assert ndt_from_splitting({P(3, 3): 1}, AntennaConfig(2, 2)) == 0


@pytest.mark.parametrize(
    "a, point, index",
    [
        ({P(0, 1): F(1, 4)}, None, 1),
        ({P(1, 1): F(1, 9)}, CachePoint(F(1, 4), 1), 2),
        ({P(0, 3): 1}, CachePoint(0, F(1, 2)), 3),
    ],
)
def test_ndt_from_splitting_violations(a, point, index):
    with pytest.raises(ConstraintViolation) as info:
        ndt_from_splitting(a, AntennaConfig(2, 2), point)
    assert info.value.index == index
