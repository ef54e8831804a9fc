from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ndtlab.errors import InfeasibleCachePoint
from ndtlab.model import (
    LEGITIMATE_POINTS,
    AntennaConfig,
    CachePoint,
    IntegerPoint,
    MemorySharing,
    format_rational,
    is_feasible,
    legitimate_points,
    to_fraction,
)
from ndtlab.ndt_program import NdtSolver

unit = st.fractions(min_value=0, max_value=1, max_denominator=60)


def test_feasibility_examples():
    assert not is_feasible(CachePoint("0.1", "0.2"))
    assert is_feasible(CachePoint(1, 0))
    assert is_feasible(CachePoint(F(1, 3), F(2, 3)))
    assert is_feasible(CachePoint(0, F(1, 3)))


def test_require_feasible_raises():
    with pytest.raises(InfeasibleCachePoint):
        CachePoint(F(1, 10), F(1, 5)).require_feasible()


def test_cache_point_range():
    with pytest.raises(ValueError):
        CachePoint(F(3, 2), 0)
    with pytest.raises(ValueError):
        CachePoint(0, -1)


def test_legitimate_points_order_and_count():
    pts = legitimate_points()
    assert len(pts) == 13
    assert [p.label for p in pts] == [
        "01", "02", "03", "11", "12", "13", "21", "22", "23", "30", "31", "32", "33",
    ]
    assert pts == sorted(pts)
    assert IntegerPoint(0, 0) not in pts
    assert IntegerPoint(3, 0) in pts
    brute = [(m, n) for m in range(4) for n in range(4) if m + 3 * n >= 3]
    assert [(p.m, p.n) for p in pts] == brute


def test_integer_point_multiplicity_and_parse():
    assert IntegerPoint(1, 1).multiplicity == 9
    assert IntegerPoint(3, 3).multiplicity == 1
    assert sum(p.multiplicity for p in LEGITIMATE_POINTS) == 57
    assert IntegerPoint.parse("12") == IntegerPoint(1, 2)
    with pytest.raises(ValueError):
        IntegerPoint.parse("1/2")


@pytest.mark.parametrize(
    "text, value",
    [("1/3", F(1, 3)), ("0.1", F(1, 10)), ("2", F(2)), (" 5 / 12 ", F(5, 12)), (0.1, F(1, 10)), (3, F(3))],
)
def test_to_fraction(text, value):
    assert to_fraction(text) == value


@pytest.mark.parametrize("bad", ["x", "1/0", "nan", "inf", "1/2/3"])
def test_to_fraction_rejects(bad):
    with pytest.raises(ValueError):
        to_fraction(bad)


@given(st.fractions(max_denominator=10_000))
def test_format_round_trip(x):
    assert to_fraction(format_rational(x)) == x


def test_antenna_config_validation():
    assert AntennaConfig(3, 5).ratio() == F(5, 3)
    with pytest.raises(ValueError):
        AntennaConfig(0, 1)
    with pytest.raises(ValueError):
        AntennaConfig(1, 2.0)


def test_memory_sharing_normalizes_and_certifies():
    s = MemorySharing({(3, 0): F(1, 3), IntegerPoint(0, 3): F(2, 3)})
    assert len(s.vector()) == 13
    assert s.usage() == (1, F(1, 3), F(2, 3))
    assert s.certifies(CachePoint(F(1, 3), F(2, 3)))
    assert not s.certifies(CachePoint(F(1, 4), 1))
    assert s.to_dict() == {"03": "2/3", "30": "1/3"}
    with pytest.raises(ValueError):
        MemorySharing({(0, 0): 1})
    with pytest.raises(ValueError):
        MemorySharing({(0, 1): -1})


@given(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=30), min_size=13, max_size=13))
def test_convex_combinations_are_feasible(ws):
    total = sum(ws)
    if total == 0:
        return
    s = MemorySharing({pt: w / total for pt, w in zip(LEGITIMATE_POINTS, ws)})
    _, rx, tx = s.usage()
    assert is_feasible(CachePoint(rx, tx))


@given(unit, unit)
def test_feasible_points_admit_a_sharing(mr, mt):
    p = CachePoint(mr, mt)
    if not p.feasible:
        return
    _, s = NdtSolver(AntennaConfig(1, 1)).solve_sharing(p)
    assert s.certifies(p)
