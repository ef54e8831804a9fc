"""Golden-value corpus: frozen inputs and exact expected outputs.

The corpus is line-delimited JSON (``data/golden.jsonl``), one record per
line::

    {"id": ..., "kind": ..., "inputs": {...}, "expected": ...,
     "provenance": "reference" | "trivial" | "derived", "citation": ...}

``expected`` is a ``"p/q"`` string for rational quantities, a bool for
predicates and an integer for counts. ``kind`` selects the library call
(see :data:`EVALUATORS`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Iterable

from .bounds_gap import is_optimal_point, lower_bound, per_point_rho, relaxed_lower_bound
from .closed_form import case_of, closed_form_ndt, pieces_of
from .dof_tables import dof_per_user, general_dof_broadcast, general_dof_x
from .general_network import NetworkShape, general_lower_bound, general_upper_bound
from .model import AntennaConfig, CachePoint, IntegerPoint, MemorySharing, is_feasible, legitimate_points, to_fraction
from .ndt_program import ndt_from_splitting, sharing_to_splitting, solve_ndt_lp
from .placement_delivery import Library, accounted_ndt, place, plan_delivery, verify_reconstruction
from .scheme_sim import run_scheme

__all__ = ["GoldenRecord", "GoldenResult", "load_corpus", "evaluate", "run_golden_suite", "EVALUATORS"]

PROVENANCES = ("reference", "trivial", "derived")


@dataclass(frozen=True)
class GoldenRecord:
    id: str
    kind: str
    inputs: dict
    expected: Any
    provenance: str
    citation: str

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"{self.id}: provenance must be one of {PROVENANCES}")
        if self.provenance == "reference" and not self.citation:
            raise ValueError(f"{self.id}: reference records need a citation")

    @classmethod
    def from_dict(cls, d: dict) -> "GoldenRecord":
        return cls(d["id"], d["kind"], dict(d["inputs"]), d["expected"], d["provenance"], d.get("citation", ""))


@dataclass(frozen=True)
class GoldenResult:
    record: GoldenRecord
    actual: Any
    passed: bool
    error: str | None = None


def _cfg(x: dict) -> AntennaConfig:
    return AntennaConfig(int(x["M"]), int(x["N"]))


def _point(x: dict) -> CachePoint:
    return CachePoint(x["mu_r"], x["mu_t"])


def _shape(x: dict) -> NetworkShape:
    return NetworkShape(int(x["n_tx"]), int(x["n_rx"]))


def _sharing(x: dict) -> MemorySharing:
    return MemorySharing({IntegerPoint.parse(k): to_fraction(v) for k, v in x["sharing"].items()})


def _splitting(x: dict) -> dict:
    return {IntegerPoint.parse(k): to_fraction(v) for k, v in x["splitting"].items()}


def _accounted(x: dict) -> Fraction:
    cfg = _cfg(x)
    F = int(x["file_bits"])
    lib = Library.random(int(x.get("files", 3)), F, int(x.get("seed", 0)))
    sub = place(lib, _sharing(x))
    demand = tuple(x.get("demand", (0, 1, 2)))
    dplan = plan_delivery(sub, demand)
    if not verify_reconstruction(dplan, sub, lib):
        raise AssertionError("delivery does not reconstruct")
    return accounted_ndt(dplan, cfg, F, sub)


def _streams(x: dict) -> Fraction:
    cert = run_scheme(x["scheme"], _cfg(x), int(x.get("seed", 0)))
    if not cert.passed:
        raise AssertionError(f"certificate failed: leakage {cert.leakage:.3g}, min_singular {cert.min_singular:.3g}")
    return cert.streams_per_user


EVALUATORS: dict[str, Callable[[dict], Any]] = {
    "feasible": lambda x: is_feasible(_point(x)),
    "legitimate_count": lambda x: len(legitimate_points()),
    "dof": lambda x: dof_per_user(IntegerPoint.parse(x["point"]), _cfg(x)),
    "general_dof_x": lambda x: general_dof_x(_cfg(x), int(x["n_tx"]), int(x["n_rx"])),
    "general_dof_broadcast": lambda x: general_dof_broadcast(_cfg(x), int(x["n_tx"]), int(x["n_rx"])),
    "ndt_upper": lambda x: solve_ndt_lp(_point(x), _cfg(x)).tau_upper,
    "splitting_ndt": lambda x: ndt_from_splitting(_splitting(x), _cfg(x)),
    "sharing_ndt": lambda x: ndt_from_splitting(sharing_to_splitting(_sharing(x)), _cfg(x)),
    "splitting_of": lambda x: sharing_to_splitting(_sharing(x))[IntegerPoint.parse(x["point"])],
    "closed_form": lambda x: closed_form_ndt(_point(x), _cfg(x))[0],
    "closed_form_region": lambda x: closed_form_ndt(_point(x), _cfg(x))[1],
    "case": lambda x: case_of(_cfg(x)),
    "piece_count": lambda x: len(pieces_of(_cfg(x))),
    "lower_bound": lambda x: lower_bound(_point(x), _cfg(x)),
    "relaxed_lower_bound": lambda x: relaxed_lower_bound(_point(x), _cfg(x)),
    "per_point_rho": lambda x: per_point_rho(_cfg(x))[IntegerPoint.parse(x["point"])],
    "optimal_point": lambda x: is_optimal_point(_point(x), _cfg(x)),
    "general_lower_bound": lambda x: general_lower_bound(_point(x), _cfg(x), _shape(x)),
    "general_upper_bound": lambda x: general_upper_bound(_point(x), _cfg(x), _shape(x)),
    "accounted_ndt": _accounted,
    "scheme_streams": _streams,
}


def _matches(expected, actual) -> bool:
    if isinstance(expected, bool) or isinstance(actual, bool):
        return expected is actual
    if isinstance(actual, str):
        return expected == actual
    return to_fraction(expected) == Fraction(actual)


def evaluate(record: GoldenRecord) -> GoldenResult:
    try:
        fn = EVALUATORS[record.kind]
    except KeyError:
        return GoldenResult(record, None, False, f"unknown kind {record.kind!r}")
    try:
        actual = fn(record.inputs)
    except Exception as exc:  # a failing record must not stop the suite
        return GoldenResult(record, None, False, f"{type(exc).__name__}: {exc}")
    return GoldenResult(record, actual, _matches(record.expected, actual))


def default_corpus_path():
    return resources.files("ndtlab").joinpath("data", "golden.jsonl")


def load_corpus(path: str | Path | None = None) -> list[GoldenRecord]:
    src = default_corpus_path() if path is None else Path(path)
    out = []
    seen = set()
    for n, line in enumerate(src.read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rec = GoldenRecord.from_dict(json.loads(line))
        if rec.id in seen:
            raise ValueError(f"line {n}: duplicate id {rec.id!r}")
        seen.add(rec.id)
        out.append(rec)
    return out


def run_golden_suite(
    records: Iterable[GoldenRecord] | None = None,
) -> tuple[list[GoldenResult], list[str]]:
    """Evaluate every record; returns all results and the ids that failed."""
    results = [evaluate(r) for r in (load_corpus() if records is None else records)]
    return results, [r.record.id for r in results if not r.passed]
