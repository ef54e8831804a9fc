"""Core value types and feasibility geometry.

Every cache size, sharing weight and delivery time is a
:class:`fractions.Fraction`. Floats only appear when a value is rendered
for output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Mapping

from .errors import InfeasibleCachePoint

__all__ = [
    "AntennaConfig",
    "CachePoint",
    "IntegerPoint",
    "MemorySharing",
    "NdtReport",
    "LEGITIMATE_POINTS",
    "is_feasible",
    "legitimate_points",
    "to_fraction",
    "format_rational",
]


def to_fraction(value) -> Fraction:
    """Convert ``value`` to an exact rational.

    Strings may be ``"p/q"``, integers or decimals; decimals are read as
    base-10 rationals so ``"0.1"`` is exactly 1/10. Floats go through their
    shortest repr for the same reason.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(Decimal(repr(value)))
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            try:
                return Fraction(int(num.strip()), int(den.strip()))
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"not a rational: {value!r}") from exc
        try:
            dec = Decimal(text)
        except InvalidOperation as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
        if not dec.is_finite():
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(dec)
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def format_rational(value: Fraction) -> str:
    """Render as ``"p/q"`` (or ``"p"`` when integral)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class AntennaConfig:
    """Antennas per transmitter (``M``) and per receiver (``N``)."""

    M: int
    N: int

    def __post_init__(self):
        for name in ("M", "N"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")

    def ratio(self) -> Fraction:
        return Fraction(self.N, self.M)


@dataclass(frozen=True)
class CachePoint:
    """Normalized receiver and transmitter cache sizes."""

    mu_r: Fraction
    mu_t: Fraction

    def __post_init__(self):
        r = to_fraction(self.mu_r)
        t = to_fraction(self.mu_t)
        if not (0 <= r <= 1 and 0 <= t <= 1):
            raise ValueError(f"cache sizes must lie in [0, 1], got ({r}, {t})")
        object.__setattr__(self, "mu_r", r)
        object.__setattr__(self, "mu_t", t)

    @property
    def feasible(self) -> bool:
        return self.mu_r + 3 * self.mu_t >= 1

    def require_feasible(self) -> "CachePoint":
        if not self.feasible:
            raise InfeasibleCachePoint(
                f"mu_r + 3 mu_t = {self.mu_r + 3 * self.mu_t} < 1 at "
                f"({format_rational(self.mu_r)}, {format_rational(self.mu_t)})"
            )
        return self


def is_feasible(p: CachePoint) -> bool:
    """True iff every file fits in the union of the caches."""
    return p.mu_r + 3 * p.mu_t >= 1


@dataclass(frozen=True, order=True)
class IntegerPoint:
    """Each bit cached at exactly ``m`` receivers and ``n`` transmitters."""

    m: int
    n: int

    def __post_init__(self):
        if not (0 <= self.m <= 3 and 0 <= self.n <= 3):
            raise ValueError(f"integer point out of range: ({self.m}, {self.n})")

    @property
    def legitimate(self) -> bool:
        return self.m + 3 * self.n >= 3

    @property
    def mu(self) -> tuple[Fraction, Fraction]:
        return Fraction(self.m, 3), Fraction(self.n, 3)

    @property
    def multiplicity(self) -> int:
        """Number of (receiver subset, transmitter subset) states of this class."""
        return math.comb(3, self.m) * math.comb(3, self.n)

    @property
    def label(self) -> str:
        return f"{self.m}{self.n}"

    @classmethod
    def parse(cls, label: str) -> "IntegerPoint":
        if len(label) != 2 or not label.isdigit():
            raise ValueError(f"bad integer point label {label!r}")
        return cls(int(label[0]), int(label[1]))

    def __str__(self):
        return f"({self.m},{self.n})"


LEGITIMATE_POINTS: tuple[IntegerPoint, ...] = tuple(
    IntegerPoint(m, n) for m in range(4) for n in range(4) if m + 3 * n >= 3
)


def legitimate_points() -> list[IntegerPoint]:
    """The 13 legitimate integer points, ascending in ``m`` then ``n``."""
    return list(LEGITIMATE_POINTS)


@dataclass(frozen=True)
class MemorySharing:
    """Convex weights over the legitimate integer points."""

    beta: Mapping[IntegerPoint, Fraction]

    def __post_init__(self):
        full = {}
        for pt, w in self.beta.items():
            if not isinstance(pt, IntegerPoint):
                pt = IntegerPoint(*pt)
            if not pt.legitimate:
                raise ValueError(f"{pt} is not a legitimate integer point")
            w = to_fraction(w)
            if w < 0:
                raise ValueError(f"negative weight {w} at {pt}")
            full[pt] = w
        object.__setattr__(
            self, "beta", {pt: full.get(pt, Fraction(0)) for pt in LEGITIMATE_POINTS}
        )

    def __getitem__(self, pt) -> Fraction:
        if not isinstance(pt, IntegerPoint):
            pt = IntegerPoint(*pt)
        return self.beta[pt]

    def vector(self) -> tuple[Fraction, ...]:
        return tuple(self.beta[pt] for pt in LEGITIMATE_POINTS)

    def support(self) -> list[IntegerPoint]:
        return [pt for pt in LEGITIMATE_POINTS if self.beta[pt] != 0]

    def usage(self) -> tuple[Fraction, Fraction, Fraction]:
        """(total weight, receiver usage, transmitter usage)."""
        total = sum(self.beta.values(), Fraction(0))
        rx = sum((w * pt.m for pt, w in self.beta.items()), Fraction(0)) / 3
        tx = sum((w * pt.n for pt, w in self.beta.items()), Fraction(0)) / 3
        return total, rx, tx

    def certifies(self, p: CachePoint) -> bool:
        total, rx, tx = self.usage()
        return total == 1 and rx <= p.mu_r and tx <= p.mu_t

    def to_dict(self) -> dict[str, str]:
        return {pt.label: format_rational(w) for pt, w in self.beta.items() if w}


@dataclass(frozen=True)
class NdtReport:
    """Bounds on the delivery time at one cache point.

    ``gap`` is ``math.inf`` when the lower bound vanishes but the upper
    bound does not, and 1 when both vanish.
    """

    point: CachePoint
    cfg: AntennaConfig
    tau_upper: Fraction
    sharing: MemorySharing
    per_group_ndt: Mapping[IntegerPoint, Fraction]
    tau_lower: Fraction | None = None
    gap: Fraction | float | None = None
    active_piece: str | None = None
    case: int | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def pair(name, v):
            if v is None:
                return {name: None, f"{name}_float": None}
            if isinstance(v, float):
                return {name: "inf", f"{name}_float": v}
            return {name: format_rational(v), f"{name}_float": float(v)}

        out = {
            "mu_r": format_rational(self.point.mu_r),
            "mu_t": format_rational(self.point.mu_t),
            "M": self.cfg.M,
            "N": self.cfg.N,
        }
        out.update(pair("tau_upper", self.tau_upper))
        out.update(pair("tau_lower", self.tau_lower))
        out.update(pair("gap", self.gap))
        out["case"] = self.case
        out["region"] = self.active_piece
        out["sharing"] = self.sharing.to_dict()
        out["per_group_ndt"] = {
            pt.label: format_rational(v) for pt, v in self.per_group_ndt.items() if v
        }
        out.update(self.extra)
        return out
