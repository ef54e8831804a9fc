"""Acceptance checks, one or more tests per criterion.

Run under pytest (the terminal summary prints one PASS/FAIL line per
criterion) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import pytest

from ndtlab.bounds_gap import (
    RHO_TABLE_INTERVALS,
    is_optimal_point,
    lower_bound,
    per_point_rho,
    rho_table_violations,
)
from ndtlab.closed_form import case_of, closed_form_ndt
from ndtlab.general_network import (
    NetworkShape,
    general_lower_bound,
    general_optimality,
    general_upper_bound,
    is_feasible_general,
)
from ndtlab.model import AntennaConfig, CachePoint, IntegerPoint
from ndtlab.ndt_program import NdtSolver, ndt_from_splitting, sharing_to_splitting, solve_ndt_lp
from ndtlab.placement_delivery import (
    Library,
    accounted_ndt,
    all_demands,
    place,
    plan_delivery,
    verify_reconstruction,
)
from ndtlab.scheme_sim import SCHEMES, expected_streams, run_scheme

F = Fraction


# ---------------------------------------------------------------- grid sweep

@dataclass
class GridSweep:
    points: int = 0
    cases: set = field(default_factory=set)
    mismatches: list = field(default_factory=list)
    max_rho: Fraction = F(0)
    rho_over_three: list = field(default_factory=list)
    lower_above_upper: list = field(default_factory=list)
    optimal_points: int = 0
    optimal_not_tight: list = field(default_factory=list)


def _grid_points(den: int) -> list[CachePoint]:
    pts = (CachePoint(F(i, den), F(j, den)) for i in range(den + 1) for j in range(den + 1))
    return [p for p in pts if p.feasible]


@lru_cache(maxsize=None)
def grid_sweep() -> GridSweep:
    """LP, closed form, cut-set bound and optimality flag on the 1/60 grid, M, N <= 10."""
    out = GridSweep()
    pts = _grid_points(60)
    for M, N in itertools.product(range(1, 11), repeat=2):
        cfg = AntennaConfig(M, N)
        out.cases.add(case_of(cfg))
        solver = NdtSolver(cfg)
        for p in pts:
            up = solver.optimum(p)
            cf, _ = closed_form_ndt(p, cfg)
            lo = lower_bound(p, cfg)
            out.points += 1
            if up != cf:
                out.mismatches.append((M, N, p, up, cf))
            if lo > up:
                out.lower_above_upper.append((M, N, p, up, lo))
            if lo > 0:
                rho = up / lo
                out.max_rho = max(out.max_rho, rho)
                if rho > 3:
                    out.rho_over_three.append((M, N, p, rho))
            elif up != 0:
                out.rho_over_three.append((M, N, p, "unbounded"))
            if is_optimal_point(p, cfg):
                out.optimal_points += 1
                if up != lo:
                    out.optimal_not_tight.append((M, N, p, up, lo))
    return out


# ------------------------------------------------------------- criterion 1

def test_criterion_1_lp_equals_closed_form():
    s = grid_sweep()
    assert s.points > 300_000
    assert s.cases == set(range(1, 11)), f"cases covered: {sorted(s.cases)}"
    assert not s.mismatches, f"{len(s.mismatches)} mismatches, first: {s.mismatches[:3]}"


# ------------------------------------------------------------- criterion 2

@pytest.mark.parametrize("M", range(1, 7))
def test_criterion_2_symmetric_third_two_thirds(M):
    rep = solve_ndt_lp(CachePoint(F(1, 3), F(2, 3)), AntennaConfig(M, M))
    assert rep.tau_upper == F(2, 3 * M)


def test_criterion_2_equal_split_versus_optimal_sharing():
    cfg = AntennaConfig(3, 5)
    p = CachePoint(0, F(2, 3))
    # every file split equally over the nine (0, 2) states
    assert ndt_from_splitting({IntegerPoint(0, 2): F(1, 3)}, cfg, p) == F(1, 2)
    rep = solve_ndt_lp(p, cfg)
    assert rep.tau_upper == F(5, 12)
    assert rep.sharing.to_dict() == {"01": "1/2", "03": "1/2"}


# ------------------------------------------------------------- criterion 3

def _sample_ratios() -> list[Fraction]:
    rs = {F(n, m) for n in range(1, 13) for m in range(1, 13)}
    rs |= {F(k) for k in (4, 5, 6, 10, 20, 50)}
    return sorted(rs)


def test_criterion_3_gap_at_most_three():
    s = grid_sweep()
    assert not s.rho_over_three, s.rho_over_three[:3]
    assert s.max_rho == 3


def test_criterion_3_per_point_ratio_bounds_by_interval():
    bad = rho_table_violations(_sample_ratios())
    summary = sorted({(pt.label, k) for pt, k, *_ in bad})
    assert not bad, f"{len(bad)} excesses over the tabulated bounds (point, column): {summary}; first: {bad[:3]}"


def test_criterion_3_x_multicast_ratio_seven_sixths():
    rs = [r for r in _sample_ratios() if F(2, 3) < r <= 1]
    assert rs
    for r in rs:
        assert per_point_rho(AntennaConfig(r.denominator, r.numerator))[IntegerPoint(1, 1)] == F(7, 6), r


def test_criterion_3_x_channel_ratio_three_above_one_third():
    rs = [r for r in _sample_ratios() if r > F(1, 3)]
    off = [
        (r, rho)
        for r in rs
        if (rho := per_point_rho(AntennaConfig(r.denominator, r.numerator))[IntegerPoint(0, 1)]) != 3
    ]
    assert not off, f"rho_01 differs from 3 at {len(off)} of {len(rs)} ratios, e.g. {off[:4]}"


# ------------------------------------------------------------- criterion 4

def test_criterion_4_optimality_regions_tight():
    s = grid_sweep()
    assert s.optimal_points > 0
    assert not s.optimal_not_tight, s.optimal_not_tight[:3]
    assert not s.lower_above_upper, s.lower_above_upper[:3]


# ------------------------------------------------------------- criterion 5

@pytest.mark.parametrize("name", sorted(SCHEMES))
def test_criterion_5_scheme_certificates(name):
    spec = SCHEMES[name]
    cfg = spec.smallest
    want = expected_streams(name, cfg)
    for seed in range(50):
        c = run_scheme(name, cfg, seed)
        assert c.passed, (seed, c.leakage, c.min_singular)
        assert c.recovery_error < 1e-6, (seed, c.recovery_error)
        assert c.streams_per_user == want, (seed, c.streams_per_user, want)
    if spec.corruptible:
        leaked = sum(run_scheme(name, cfg, seed, corrupt=True).leakage > 1e-2 for seed in range(100))
        assert leaked >= 99, f"negative control caught only {leaked}/100"


# ------------------------------------------------------------- criterion 6

def optimal_sharings(cfg: AntennaConfig, count: int = 20):
    solver = NdtSolver(cfg)
    seen = {}
    for p in _grid_points(12):
        _, s = solver.solve_sharing(p)
        key = s.vector()
        if key not in seen:
            seen[key] = (p, s)
        if len(seen) == count:
            break
    return list(seen.values())


def test_criterion_6_placement_round_trip():
    cfg = AntennaConfig(2, 2)
    F_bits = 100_000
    shares = optimal_sharings(cfg)
    assert len(shares) == 20
    lib = Library.random(3, F_bits, seed=0)
    for p, s in shares:
        sub = place(lib, s)
        ideal = ndt_from_splitting(sharing_to_splitting(s), cfg, p)
        for demand in all_demands(3):
            dplan = plan_delivery(sub, demand)
            res = verify_reconstruction(dplan, sub, lib)
            assert res.ok, (p, demand, res.to_dict())
            diff = abs(accounted_ndt(dplan, cfg, F_bits, sub) - ideal)
            assert diff <= F(57, F_bits), (p, demand, diff)


# ------------------------------------------------------------- criterion 7

def test_criterion_7_general_network():
    den = 30
    g = [F(i, den) for i in range(den + 1)]
    sq = NetworkShape(3, 3)
    for M, N in itertools.product(range(1, 5), repeat=2):
        cfg = AntennaConfig(M, N)
        for mr, mt in itertools.product(g, g):
            p = CachePoint(mr, mt)
            assert general_lower_bound(p, cfg, sq) == lower_bound(p, cfg)
    worst = F(0)
    for n_rx in range(2, 7):
        for n_tx in range(n_rx, 7):
            shape = NetworkShape(n_tx, n_rx)
            for M in range(1, 5):
                cfg = AntennaConfig(M, M)
                for mr, mt in itertools.product(g, g):
                    p = CachePoint(mr, mt)
                    if not is_feasible_general(p, shape):
                        continue
                    up = general_upper_bound(p, cfg, shape)
                    lo = general_lower_bound(p, cfg, shape)
                    general_optimality(p, cfg, shape)  # raises if a claimed optimum is not tight
                    if lo == 0:
                        assert up == 0, (shape, cfg, p)
                        continue
                    worst = max(worst, up / lo)
                    assert up / lo < 2, (shape, cfg, p, up / lo)
    assert worst < 2


# ------------------------------------------------------------------ runner

CRITERIA = {
    1: "LP optimum equals the closed form on the 1/60 grid, M, N <= 10",
    2: "reference delivery times (2/(3M); 1/2 versus 5/12)",
    3: "gap at most 3 and per-point ratio bounds per N/M interval",
    4: "optimality regions are tight and the lower bound never exceeds the LP",
    5: "scheme certificates, stream counts and negative controls",
    6: "bit-exact placement and delivery for 20 sharings and 27 demands",
    7: "general network bounds, gap below 2 and tight optimality regions",
}


def _main() -> int:
    import inspect

    tests = {
        name: fn
        for name, fn in globals().items()
        if name.startswith("test_criterion_") and inspect.isfunction(fn)
    }
    status = {}
    for name, fn in tests.items():
        k = int(name.split("_")[2])
        params = getattr(fn, "pytestmark", [])
        arglists = [()]
        for mark in params:
            if mark.name == "parametrize":
                arglists = [(v,) for v in mark.args[1]]
        ok = True
        for args in arglists:
            try:
                fn(*args)
            except AssertionError as exc:
                ok = False
                print(f"  {name}{list(args) or ''}: {str(exc)[:300]}")
        status[k] = status.get(k, True) and ok
    for k, desc in CRITERIA.items():
        print(f"criterion {k}: {'PASS' if status.get(k) else 'FAIL'}  {desc}")
    return 0 if all(status.values()) else 1


if __name__ == "__main__":
    sys.exit(_main())
