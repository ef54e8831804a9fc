"""Command-line front-end.

Exit codes: 0 success, 1 malformed arguments, 2 infeasible cache point or
antenna relation that does not fit the request, 3 a verification failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import __version__
from .bounds_gap import ndt_report
from .closed_form import case_of, pieces_of
from .errors import BudgetExceeded, DimensionMismatch, InfeasibleCachePoint, RankDeficient
from .general_network import (
    NetworkShape,
    four_point_lp,
    general_lower_bound,
    general_optimality,
    general_region,
    general_upper_bound,
)
from .model import AntennaConfig, CachePoint, format_rational, to_fraction
from .ndt_program import NdtSolver, ndt_from_splitting, sharing_to_splitting
from .placement_delivery import Library, accounted_ndt, drop_group, place, plan_delivery, verify_reconstruction
from .scheme_sim import SCHEMES, run_scheme

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_FAILED = 3

SWEEP_COLUMNS = ("mu_r", "mu_t", "M", "N", "tau_upper", "tau_lower", "gap", "region", "case")
SWEEP_OUTPUTS = ("upper", "lower", "gap", "region")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        return to_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _demand(text: str) -> tuple[int, int, int]:
    try:
        parts = tuple(int(x) for x in text.replace(" ", "").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"demand must be three file numbers like 1,2,3: {text!r}") from None
    if len(parts) != 3 or min(parts) < 1:
        raise argparse.ArgumentTypeError(f"demand must be three file numbers >= 1: {text!r}")
    return parts


def _default_seed() -> int:
    raw = os.environ.get("NDTLAB_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def _fmt_float(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return f"{float(v):.12g}"


def _fmt_exact(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return format_rational(v)


def _dump(obj, out) -> None:
    json.dump(obj, out, indent=2)
    out.write("\n")


def _add_antennas(p) -> None:
    p.add_argument("--tx-ant", "-M", dest="M", type=_positive_int, required=True, help="antennas per transmitter")
    p.add_argument("--rx-ant", "-N", dest="N", type=_positive_int, required=True, help="antennas per receiver")


def _add_point(p) -> None:
    p.add_argument("--mu-r", type=_rational, required=True, help="normalized receiver cache size (p/q or decimal)")
    p.add_argument("--mu-t", type=_rational, required=True, help="normalized transmitter cache size")


def _point(args) -> CachePoint:
    return CachePoint(args.mu_r, args.mu_t)


def cmd_ndt(args, out) -> int:
    cfg = AntennaConfig(args.M, args.N)
    p = _point(args).require_feasible()
    _dump(ndt_report(p, cfg).to_dict(), out)
    return EXIT_OK


def _grid(step: Fraction) -> list[Fraction]:
    k = 1 / step
    if k.denominator != 1:
        raise argparse.ArgumentTypeError(f"step must divide 1, got {step}")
    return [i * step for i in range(int(k) + 1)]


def _step(text: str) -> Fraction:
    s = _rational(text)
    if not 0 < s <= Fraction(1, 3):
        raise argparse.ArgumentTypeError(f"step must lie in (0, 1/3], got {text}")
    if (1 / s).denominator != 1:
        raise argparse.ArgumentTypeError(f"step must be 1/k for an integer k, got {text}")
    return s


def _feasible_grid(step: Fraction):
    g = _grid(step)
    for mr in g:
        for mt in g:
            p = CachePoint(mr, mt)
            if p.feasible:
                yield p


def cmd_sweep(args, out) -> int:
    cfg = AntennaConfig(args.M, args.N)
    outputs = set(args.outputs or SWEEP_OUTPUTS)
    fmt = _fmt_exact if args.exact else _fmt_float
    solver = NdtSolver(cfg)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for p in _feasible_grid(args.step):
        rep = ndt_report(p, cfg, solver)
        w.writerow([
            format_rational(p.mu_r),
            format_rational(p.mu_t),
            cfg.M,
            cfg.N,
            fmt(rep.tau_upper) if "upper" in outputs else "",
            fmt(rep.tau_lower) if "lower" in outputs else "",
            fmt(rep.gap) if "gap" in outputs else "",
            rep.active_piece if "region" in outputs else "",
            rep.case,
        ])
    return EXIT_OK


def cmd_regions(args, out) -> int:
    cfg = AntennaConfig(args.M, args.N)
    if args.pieces:
        _dump(
            {
                "M": cfg.M,
                "N": cfg.N,
                "case": case_of(cfg),
                "pieces": [
                    {
                        "region": pc.region_id,
                        "mu_r": format_rational(pc.coeff_mu_r),
                        "mu_t": format_rational(pc.coeff_mu_t),
                        "constant": format_rational(pc.constant),
                    }
                    for pc in pieces_of(cfg)
                ],
            },
            out,
        )
        return EXIT_OK
    solver = NdtSolver(cfg)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("mu_r", "mu_t", "region", "optimal"))
    for p in _feasible_grid(args.step):
        rep = ndt_report(p, cfg, solver)
        w.writerow((format_rational(p.mu_r), format_rational(p.mu_t), rep.active_piece, int(rep.extra["optimal"])))
    return EXIT_OK


def cmd_verify_scheme(args, out) -> int:
    cfg = AntennaConfig(args.M, args.N)
    base = _default_seed() if args.seed is None else args.seed
    certs = [run_scheme(args.scheme, cfg, base + k, corrupt=args.corrupt) for k in range(args.seeds)]
    ok = all(c.passed for c in certs)
    streams = sorted({c.streams_per_user for c in certs})
    _dump(
        {
            "scheme": SCHEMES[args.scheme].scheme.value,
            "M": cfg.M,
            "N": cfg.N,
            "seeds": args.seeds,
            "first_seed": base,
            "corrupted": args.corrupt,
            "pass": ok,
            "passed_runs": sum(c.passed for c in certs),
            "streams_per_user": [format_rational(s) for s in streams],
            "max_leakage": max(c.leakage for c in certs),
            "min_singular": min(c.min_singular for c in certs),
            "certificates": [c.to_dict() for c in certs],
        },
        out,
    )
    return EXIT_OK if ok else EXIT_FAILED


def cmd_place(args, out) -> int:
    cfg = AntennaConfig(args.M, args.N)
    p = _point(args).require_feasible()
    if args.files < 3:
        raise InfeasibleCachePoint(f"the library needs at least 3 files, got {args.files}")
    demand = tuple(d - 1 for d in args.demand)
    if max(demand) >= args.files:
        raise InfeasibleCachePoint(f"demand {args.demand} refers to a file beyond {args.files}")
    seed = _default_seed() if args.seed is None else args.seed
    tau, sharing = NdtSolver(cfg).solve_sharing(p)
    lib = Library.random(args.files, args.file_bits, seed)
    sub = place(lib, sharing)
    dplan = plan_delivery(sub, demand)
    if args.inject_drop and dplan.groups:
        dplan = drop_group(dplan, 0)
    verdict = verify_reconstruction(dplan, sub, lib)
    acc = accounted_ndt(dplan, cfg, args.file_bits, sub)
    ideal = ndt_from_splitting(sharing_to_splitting(sharing), cfg)
    doc = {
        "mu_r": format_rational(p.mu_r),
        "mu_t": format_rational(p.mu_t),
        "M": cfg.M,
        "N": cfg.N,
        "files": args.files,
        "file_bits": args.file_bits,
        "seed": seed,
        "demand": list(args.demand),
        "tau_upper": format_rational(tau),
        "sharing": sharing.to_dict(),
        "accounted_ndt": format_rational(acc),
        "accounted_ndt_float": float(acc),
        "rounding_excess": format_rational(acc - ideal),
        "verdict": verdict.to_dict(),
    }
    if not args.summary:
        doc["subfile_plan"] = sub.to_dict()
        doc["delivery_plan"] = dplan.to_dict(sub)
    _dump(doc, out)
    return EXIT_OK if verdict.ok else EXIT_FAILED


def cmd_general(args, out) -> int:
    cfg = AntennaConfig(args.M, args.N)
    shape = NetworkShape(args.n_tx, args.n_rx)
    p = _point(args)
    up = general_upper_bound(p, cfg, shape)
    lo = general_lower_bound(p, cfg, shape)
    lp = four_point_lp(p, cfg, shape)
    gap = (up / lo) if lo else (Fraction(1) if up == 0 else math.inf)
    _dump(
        {
            "mu_r": format_rational(p.mu_r),
            "mu_t": format_rational(p.mu_t),
            "M": cfg.M,
            "N": cfg.N,
            "n_tx": shape.n_tx,
            "n_rx": shape.n_rx,
            "region": general_region(p),
            "tau_upper": format_rational(up),
            "tau_upper_float": float(up),
            "tau_lower": format_rational(lo),
            "tau_lower_float": float(lo),
            "four_point_lp": format_rational(lp),
            "gap": _fmt_exact(gap),
            "gap_float": float(gap),
            "optimal": general_optimality(p, cfg, shape),
        },
        out,
    )
    return EXIT_OK if lp == up else EXIT_FAILED


def cmd_golden(args, out) -> int:
    from .golden import load_corpus, run_golden_suite

    records = load_corpus(args.corpus)
    results, failed = run_golden_suite(records)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{status} {r.record.id}"
        if not r.passed:
            line += f" expected={r.record.expected} actual={r.actual}"
            if r.error:
                line += f" error={r.error}"
        print(line, file=out)
    print(f"{len(results) - len(failed)}/{len(results)} records pass", file=out)
    return EXIT_OK if not failed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ndtlab", description="Delivery-time bounds for the 3x3 cache-aided MIMO interference network.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ndt", help="bounds, gap and optimal sharing at one cache point (JSON)")
    _add_point(p)
    _add_antennas(p)
    p.set_defaults(func=cmd_ndt)

    p = sub.add_parser("sweep", help="bounds over a feasible cache grid (CSV)")
    _add_antennas(p)
    p.add_argument("--step", type=_step, default=Fraction(1, 12), help="grid step 1/k, at most 1/3 (default 1/12)")
    p.add_argument("--outputs", nargs="+", choices=SWEEP_OUTPUTS, help="columns to fill (default: all)")
    p.add_argument("--exact", action="store_true", help="write p/q rationals instead of 12-digit floats")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("regions", help="closed-form region of every grid point (CSV) or the piece list (JSON)")
    _add_antennas(p)
    p.add_argument("--step", type=_step, default=Fraction(1, 12))
    p.add_argument("--pieces", action="store_true", help="print the affine pieces instead of a grid map")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("verify-scheme", help="certify a precoding scheme on random channels (JSON)")
    p.add_argument("scheme", choices=sorted(SCHEMES))
    _add_antennas(p)
    p.add_argument("--seeds", type=_positive_int, default=50, help="number of channel draws (default 50)")
    p.add_argument("--seed", type=int, default=None, help="first seed (default: $NDTLAB_SEED or 0)")
    p.add_argument("--corrupt", action="store_true", help="replace one designed precoder or combiner by noise")
    p.set_defaults(func=cmd_verify_scheme)

    p = sub.add_parser("place", help="emulate placement and delivery bit by bit (JSON)")
    _add_point(p)
    _add_antennas(p)
    p.add_argument("--files", type=_positive_int, default=3, help="library size L (default 3)")
    p.add_argument("--file-bits", type=_positive_int, default=1000, help="bits per file F (default 1000)")
    p.add_argument("--demand", type=_demand, default=(1, 2, 3), help="files wanted by receivers 1-3, e.g. 1,2,3")
    p.add_argument("--seed", type=int, default=None, help="library seed (default: $NDTLAB_SEED or 0)")
    p.add_argument("--inject-drop", action="store_true", help="drop the first delivery group before replay")
    p.add_argument("--summary", action="store_true", help="omit the subfile and delivery plans")
    p.set_defaults(func=cmd_place)

    p = sub.add_parser("general", help="bounds for an n_tx x n_rx network (JSON)")
    _add_point(p)
    _add_antennas(p)
    p.add_argument("--n-tx", type=int, default=3, help="number of transmitters (default 3)")
    p.add_argument("--n-rx", type=int, default=3, help="number of receivers (default 3)")
    p.set_defaults(func=cmd_general)

    p = sub.add_parser("golden", help="check the golden-value corpus")
    p.add_argument("--corpus", default=None, help="JSONL corpus (default: the bundled one)")
    p.set_defaults(func=cmd_golden)
    return ap


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args, out)
    except (InfeasibleCachePoint, DimensionMismatch, RankDeficient, BudgetExceeded) as exc:
        print(f"ndtlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except argparse.ArgumentTypeError as exc:
        print(f"ndtlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # e.g. shape or cache values outside their domain
        print(f"ndtlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
