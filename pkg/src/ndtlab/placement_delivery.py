"""Bit-exact cache placement and coded delivery.

Each file is cut into one subfile per cache state ``(J, I)``: the bits
cached at exactly the receivers in ``J`` and the transmitters in ``I``.
Subfiles of one class ``(|J|, |I|)`` all have the same length, so the
coded messages below always XOR equal-length operands.

Delivery, for receiver ``j`` demanding file ``d_j``:

* bits at no receiver travel as raw subfiles;
* bits at one receiver travel as pairwise XORs ``W[d_j, {k}, I] ^ W[d_k, {j}, I]``;
* bits at two receivers travel as one triple XOR per transmitter subset.

Receivers, transmitters and files are indexed from 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .dof_tables import ChannelKind, channel_kind, dof_table
from .errors import BudgetExceeded, MissingSubfile
from .model import LEGITIMATE_POINTS, AntennaConfig, IntegerPoint, MemorySharing
from .ndt_program import sharing_to_splitting

__all__ = [
    "Library",
    "SubfileRef",
    "SubfilePlan",
    "Message",
    "DeliveryGroup",
    "DeliveryPlan",
    "ReconstructionResult",
    "place",
    "plan_delivery",
    "verify_reconstruction",
    "accounted_ndt",
    "drop_group",
]

SUBFILE_SCHEMA = "ndtlab.subfile_plan/1"
DELIVERY_SCHEMA = "ndtlab.delivery_plan/1"
NODES = (0, 1, 2)


def _subsets(k: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(NODES, k))


@dataclass(frozen=True)
class Library:
    """``L >= 3`` files of ``file_bits`` bits, each a uint8 array of 0/1 values."""

    files: tuple[np.ndarray, ...]

    def __post_init__(self):
        files = tuple(np.asarray(f, dtype=np.uint8) for f in self.files)
        if len(files) < 3:
            raise ValueError("a library needs at least 3 files")
        lengths = {f.shape for f in files}
        if len(lengths) != 1 or files[0].ndim != 1:
            raise ValueError("all files must be 1-D bit arrays of equal length")
        if any(((f != 0) & (f != 1)).any() for f in files):
            raise ValueError("files must hold bits (0 or 1)")
        for f in files:
            f.setflags(write=False)
        object.__setattr__(self, "files", files)

    @property
    def num_files(self) -> int:
        return len(self.files)

    @property
    def file_bits(self) -> int:
        return int(self.files[0].shape[0])

    @classmethod
    def random(cls, num_files: int, file_bits: int, seed: int = 0) -> "Library":
        rng = np.random.default_rng(seed)
        return cls(tuple(rng.integers(0, 2, size=file_bits, dtype=np.uint8) for _ in range(num_files)))

    @classmethod
    def from_bytes(cls, blobs: Sequence[bytes], file_bits: int) -> "Library":
        files = []
        for blob in blobs:
            bits = np.unpackbits(np.frombuffer(blob, dtype=np.uint8))
            if bits.size < file_bits:
                raise ValueError("byte string shorter than file_bits")
            files.append(bits[:file_bits])
        return cls(tuple(files))


@dataclass(frozen=True, order=True)
class SubfileRef:
    """Subfile of ``file`` cached at receivers ``rx`` and transmitters ``tx``."""

    file: int
    rx: tuple[int, ...]
    tx: tuple[int, ...]

    @property
    def point(self) -> IntegerPoint:
        return IntegerPoint(len(self.rx), len(self.tx))

    def to_dict(self) -> dict:
        return {"file": self.file, "receivers": list(self.rx), "transmitters": list(self.tx)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "SubfileRef":
        return cls(int(d["file"]), tuple(d["receivers"]), tuple(d["transmitters"]))


@dataclass(frozen=True)
class SubfilePlan:
    """Class lengths and the bit range ``[start, end)`` of every subfile."""

    file_bits: int
    num_files: int
    lengths: Mapping[IntegerPoint, int]
    remainder_state: tuple[tuple[int, ...], tuple[int, ...]] | None
    remainder_bits: int
    assignment: Mapping[SubfileRef, tuple[int, int]] = field(repr=False)

    def length_of(self, ref: SubfileRef) -> int:
        start, end = self.assignment[ref]
        return end - start

    def cached_at_receiver(self, j: int) -> list[SubfileRef]:
        return [ref for ref in self.assignment if j in ref.rx]

    def cached_at_transmitter(self, i: int) -> list[SubfileRef]:
        return [ref for ref in self.assignment if i in ref.tx]

    def usage(self) -> dict[str, int]:
        """Bits stored at each node over the whole library."""
        out = {}
        for j in NODES:
            out[f"receiver{j}"] = sum(self.length_of(r) for r in self.cached_at_receiver(j))
        for i in NODES:
            out[f"transmitter{i}"] = sum(self.length_of(r) for r in self.cached_at_transmitter(i))
        return out

    def to_dict(self) -> dict:
        return {
            "schema": SUBFILE_SCHEMA,
            "file_bits": self.file_bits,
            "num_files": self.num_files,
            "class_lengths": {pt.label: n for pt, n in self.lengths.items()},
            "remainder": {
                "bits": self.remainder_bits,
                "receivers": list(self.remainder_state[0]) if self.remainder_state else None,
                "transmitters": list(self.remainder_state[1]) if self.remainder_state else None,
            },
            "subfiles": [
                dict(ref.to_dict(), range=[s, e])
                for ref, (s, e) in self.assignment.items()
            ],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "SubfilePlan":
        rem = d["remainder"]
        state = None
        if rem["receivers"] is not None:
            state = (tuple(rem["receivers"]), tuple(rem["transmitters"]))
        return cls(
            file_bits=int(d["file_bits"]),
            num_files=int(d["num_files"]),
            lengths={IntegerPoint.parse(k): int(v) for k, v in d["class_lengths"].items()},
            remainder_state=state,
            remainder_bits=int(rem["bits"]),
            assignment={
                SubfileRef.from_dict(s): (int(s["range"][0]), int(s["range"][1]))
                for s in d["subfiles"]
            },
        )


def _budgets(sharing: MemorySharing, num_files: int, file_bits: int):
    _, rx, tx = sharing.usage()
    return (
        math.floor(rx * num_files * file_bits),
        math.floor(tx * num_files * file_bits),
    )


def place(
    lib: Library,
    sharing: MemorySharing,
    file_bits: int | None = None,
    slack_bits: int | None = None,
) -> SubfilePlan:
    """Split every file according to ``sharing``.

    A subfile of class ``(m, n)`` gets ``floor(F * a_mn)`` bits. The bits
    left over go to the state cached at every receiver (when the sharing
    uses receiver cache) or else to the state cached at every transmitter.

    Budgets are the loads certified by ``sharing`` scaled to ``L * F``
    bits and floored. Rounding can push a tight budget over by a few bits,
    so each node may exceed its budget by ``slack_bits`` per file (default:
    one bit per cache state, 57).

    Raises
    ------
    BudgetExceeded
        Naming the first node over budget.
    """
    F = lib.file_bits if file_bits is None else int(file_bits)
    if F != lib.file_bits:
        raise ValueError(f"library files have {lib.file_bits} bits, not {F}")
    total, rx_load, _ = sharing.usage()
    if total != 1:
        raise ValueError(f"sharing weights sum to {total}")
    a = sharing_to_splitting(sharing)
    lengths = {pt: math.floor(F * a[pt]) for pt in LEGITIMATE_POINTS}
    used = sum(pt.multiplicity * lengths[pt] for pt in LEGITIMATE_POINTS)
    remainder = F - used
    if rx_load > 0:
        rem_state = ((0, 1, 2), ())
    else:
        rem_state = ((), (0, 1, 2))
    # per-file layout, identical for every file
    layout: list[tuple[tuple[int, ...], tuple[int, ...], int]] = []
    for pt in LEGITIMATE_POINTS:
        for rx in _subsets(pt.m):
            for tx in _subsets(pt.n):
                n = lengths[pt] + (remainder if (rx, tx) == rem_state else 0)
                if n:
                    layout.append((rx, tx, n))
    assignment = {}
    for k in range(lib.num_files):
        start = 0
        for rx, tx, n in layout:
            assignment[SubfileRef(k, rx, tx)] = (start, start + n)
            start += n
        assert start == F
    plan = SubfilePlan(
        file_bits=F,
        num_files=lib.num_files,
        lengths=lengths,
        remainder_state=rem_state if remainder else None,
        remainder_bits=remainder,
        assignment=assignment,
    )
    slack = 57 if slack_bits is None else int(slack_bits)
    rx_budget, tx_budget = _budgets(sharing, lib.num_files, F)
    usage = plan.usage()
    for node, bits in usage.items():
        budget = rx_budget if node.startswith("receiver") else tx_budget
        if bits > budget + slack * lib.num_files:
            raise BudgetExceeded(node, bits, budget)
    # bits missing from every transmitter must sit at every receiver
    for ref in assignment:
        if not ref.tx and len(ref.rx) != 3:
            raise MissingSubfile(f"{ref} is cached at no transmitter")
    return plan


@dataclass(frozen=True)
class Message:
    """XOR of ``operands`` (a raw subfile when there is one operand)."""

    operands: tuple[SubfileRef, ...]
    receivers: tuple[int, ...]
    senders: tuple[int, ...]

    def to_dict(self, plan: SubfilePlan | None = None) -> dict:
        d = {
            "operands": [op.to_dict() for op in self.operands],
            "receivers": list(self.receivers),
            "senders": list(self.senders),
        }
        if plan is not None:
            d["bits"] = plan.length_of(self.operands[0])
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "Message":
        return cls(
            tuple(SubfileRef.from_dict(o) for o in d["operands"]),
            tuple(d["receivers"]),
            tuple(d["senders"]),
        )


@dataclass(frozen=True)
class DeliveryGroup:
    point: IntegerPoint
    channel_kind: ChannelKind
    messages: tuple[Message, ...]


@dataclass(frozen=True)
class DeliveryPlan:
    demand: tuple[int, ...]
    groups: tuple[DeliveryGroup, ...]

    def to_dict(self, plan: SubfilePlan | None = None) -> dict:
        return {
            "schema": DELIVERY_SCHEMA,
            "demand": list(self.demand),
            "groups": [
                {
                    "point": [g.point.m, g.point.n],
                    "channel": g.channel_kind.value,
                    "messages": [msg.to_dict(plan) for msg in g.messages],
                }
                for g in self.groups
            ],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "DeliveryPlan":
        groups = []
        for g in d["groups"]:
            pt = IntegerPoint(*g["point"])
            groups.append(
                DeliveryGroup(
                    pt,
                    ChannelKind(g["channel"]),
                    tuple(Message.from_dict(m) for m in g["messages"]),
                )
            )
        return cls(tuple(d["demand"]), tuple(groups))


def plan_delivery(plan: SubfilePlan, demand: Sequence[int]) -> DeliveryPlan:
    """Coded messages that serve ``demand`` (one file index per receiver).

    Repeated requests are served exactly as if the files were distinct.

    Raises
    ------
    MissingSubfile
        If a needed subfile is cached at no transmitter.
    """
    demand = tuple(int(x) for x in demand)
    if len(demand) != 3:
        raise ValueError("demand must name one file per receiver")
    if any(not 0 <= x < plan.num_files for x in demand):
        raise ValueError(f"demand {demand} outside the library")

    def ref(k, rx, tx):
        r = SubfileRef(k, tuple(sorted(rx)), tx)
        if r not in plan.assignment:
            return None
        if not tx:
            raise MissingSubfile(f"{r} is needed but cached at no transmitter")
        return r

    present = {r.point for r in plan.assignment}
    groups = []
    for pt in LEGITIMATE_POINTS:
        if pt.m == 3 or pt not in present:
            continue
        msgs = []
        for tx in _subsets(pt.n):
            if pt.m == 0:
                for j in NODES:
                    r = ref(demand[j], (), tx)
                    if r is not None:
                        msgs.append(Message((r,), (j,), tx))
            elif pt.m == 1:
                for j, k in itertools.combinations(NODES, 2):
                    a = ref(demand[j], (k,), tx)
                    b = ref(demand[k], (j,), tx)
                    if a is not None:
                        msgs.append(Message((a, b), (j, k), tx))
            else:
                ops = tuple(
                    ref(demand[j], tuple(x for x in NODES if x != j), tx) for j in NODES
                )
                if ops[0] is not None:
                    msgs.append(Message(ops, NODES, tx))
        groups.append(DeliveryGroup(pt, channel_kind(pt), tuple(msgs)))
    return DeliveryPlan(demand, tuple(groups))


def drop_group(dplan: DeliveryPlan, index: int = 0) -> DeliveryPlan:
    """Copy of ``dplan`` without its ``index``-th group (a negative control)."""
    groups = list(dplan.groups)
    del groups[index]
    return DeliveryPlan(dplan.demand, tuple(groups))


@dataclass(frozen=True)
class ReconstructionResult:
    """Outcome of replaying a delivery; truthy iff every receiver succeeds."""

    per_receiver: tuple[bool, ...]
    missing: Mapping[int, list[tuple[int, int]]]
    wrong: Mapping[int, list[tuple[int, int]]]
    problems: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return all(self.per_receiver) and not self.problems

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "per_receiver": list(self.per_receiver),
            "missing": {str(j): [list(r) for r in v] for j, v in self.missing.items() if v},
            "wrong": {str(j): [list(r) for r in v] for j, v in self.wrong.items() if v},
            "problems": list(self.problems),
        }


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Maximal ``[start, end)`` runs where ``mask`` is true."""
    if not mask.any():
        return []
    padded = np.concatenate(([0], mask.astype(np.int8), [0]))
    edges = np.flatnonzero(np.diff(padded))
    return [(int(s), int(e)) for s, e in zip(edges[::2], edges[1::2])]


def verify_reconstruction(
    dplan: DeliveryPlan, sub: SubfilePlan, lib: Library, demand: Sequence[int] | None = None
) -> ReconstructionResult:
    """Replay the delivery and check every receiver rebuilds its file bit for bit.

    Each receiver starts from its cache, strips known operands out of every
    message addressed to it and must end with exactly one unknown operand
    per message. Senders must hold every operand they transmit.
    """
    demand = tuple(dplan.demand if demand is None else demand)
    problems = []
    bits = {ref: lib.files[ref.file][s:e] for ref, (s, e) in sub.assignment.items()}
    per_rx, missing, wrong = [], {}, {}
    for j in NODES:
        known = {ref: bits[ref] for ref in sub.assignment if j in ref.rx}
        for g in dplan.groups:
            for msg in g.messages:
                if j not in msg.receivers:
                    continue
                for op in msg.operands:
                    if op not in sub.assignment:
                        problems.append(f"unknown subfile {op}")
                        break
                    if not set(msg.senders) <= set(op.tx):
                        problems.append(f"senders {msg.senders} do not all cache {op}")
                else:
                    lens = {len(bits[op]) for op in msg.operands}
                    if len(lens) != 1:
                        problems.append(f"unequal XOR operands in {msg}")
                        continue
                    payload = np.bitwise_xor.reduce([bits[op] for op in msg.operands])
                    unknown = [op for op in msg.operands if op not in known]
                    if len(unknown) != 1:
                        if unknown:
                            problems.append(f"receiver {j} cannot resolve {msg}")
                        continue
                    side = [known[op] for op in msg.operands if op in known]
                    value = payload if not side else payload ^ np.bitwise_xor.reduce(side)
                    known[unknown[0]] = value
        target = lib.files[demand[j]]
        rebuilt = np.zeros_like(target)
        have = np.zeros(target.shape, dtype=bool)
        for ref, value in known.items():
            if ref.file != demand[j]:
                continue
            s, e = sub.assignment[ref]
            rebuilt[s:e] = value
            have[s:e] = True
        miss = _runs(~have)
        bad = _runs(have & (rebuilt != target))
        missing[j] = miss
        wrong[j] = bad
        per_rx.append(not miss and not bad)
    return ReconstructionResult(tuple(per_rx), missing, wrong, tuple(dict.fromkeys(problems)))


def accounted_ndt(dplan: DeliveryPlan, cfg: AntennaConfig, file_bits: int, sub: SubfilePlan) -> Fraction:
    """Delivery time implied by the plan's message sizes.

    For each group: bits delivered to the most-served receiver, divided by
    ``file_bits`` and by the group's per-user DoF.
    """
    d = dof_table(cfg)
    total = Fraction(0)
    for g in dplan.groups:
        per_rx = [0, 0, 0]
        for msg in g.messages:
            n = sub.length_of(msg.operands[0])
            for j in msg.receivers:
                per_rx[j] += n
        total += Fraction(max(per_rx), file_bits) / d[g.point]
    return total


def all_demands(num_files: int) -> Iterable[tuple[int, int, int]]:
    return itertools.product(range(num_files), repeat=3)
