"""Numerical certificates for the linear interference-management schemes.

Each simulator draws nothing itself: it takes a channel realization,
builds the precoders (and receive combiners) of one scheme at its corner
antenna ratio, then measures

* leakage: residual interference after combining, relative to the total
  received effective channel, worst receiver and phase;
* min_singular: worst ``sigma_min / sigma_max`` of a desired effective
  matrix;
* recovery_error: relative error of zero-forced random symbols sent
  through the noiseless channel.

Channel ``H[j, i]`` maps transmitter ``i`` to receiver ``j``; nodes are
indexed from 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .dof_tables import dof_per_user
from .errors import DimensionMismatch, RankDeficient
from .model import AntennaConfig, IntegerPoint

__all__ = [
    "Scheme",
    "ChannelRealization",
    "SchemeCertificate",
    "LEAKAGE_TOL",
    "CONDITION_TOL",
    "NULL_TOL",
    "draw_channel",
    "null_space",
    "simulate_partial_coop_x",
    "simulate_x_multicast",
    "simulate_partial_coop_x_multicast",
    "simulate_full_coop_x_multicast",
    "simulate_multicast",
    "simulate_broadcast",
    "SCHEMES",
    "run_scheme",
    "expected_streams",
    "SchemeSpec",
]

LEAKAGE_TOL = 1e-8
CONDITION_TOL = 1e-6
NULL_TOL = 1e-10

RX_GROUPS = ((0, 1), (1, 2), (0, 2))
TX_PAIRS = ((0, 1), (0, 2), (1, 2))


class Scheme(enum.Enum):
    PartialCoopX_Q1 = "PartialCoopX_Q1"
    PartialCoopX_Q2 = "PartialCoopX_Q2"
    XMulticast_Q1 = "XMulticast_Q1"
    XMulticast_Q2 = "XMulticast_Q2"
    PartialCoopXMulticast_Q1 = "PartialCoopXMulticast_Q1"
    PartialCoopXMulticast_Q2 = "PartialCoopXMulticast_Q2"
    FullCoopXMulticast_Q1 = "FullCoopXMulticast_Q1"
    Broadcast = "Broadcast"
    Multicast = "Multicast"


@dataclass(frozen=True)
class ChannelRealization:
    """``H`` has shape ``(3, 3, N, M)``."""

    H: np.ndarray = field(repr=False)
    seed: int | None = None

    @property
    def cfg(self) -> AntennaConfig:
        return AntennaConfig(int(self.H.shape[3]), int(self.H.shape[2]))


def draw_channel(cfg: AntennaConfig, seed: int) -> ChannelRealization:
    """I.i.d. circularly-symmetric complex Gaussian entries, unit variance."""
    rng = np.random.default_rng(seed)
    shape = (3, 3, cfg.N, cfg.M)
    H = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    H.setflags(write=False)
    return ChannelRealization(H, seed)


def null_space(a: np.ndarray, expected: int | None = None) -> np.ndarray:
    """Orthonormal basis (as columns) of the right null space of ``a``.

    Singular values below ``NULL_TOL`` times the largest count as zero.

    Raises
    ------
    RankDeficient
        If ``expected`` is given and the dimension differs.
    """
    _, s, vh = np.linalg.svd(a)
    tol = NULL_TOL * (s[0] if s.size else 0.0)
    rank = int(np.count_nonzero(s > tol))
    basis = vh[rank:].conj().T
    if expected is not None and basis.shape[1] != expected:
        raise RankDeficient(
            f"null space of a {a.shape[0]}x{a.shape[1]} matrix has dimension "
            f"{basis.shape[1]}, expected {expected}"
        )
    return basis


def _left_null(h: np.ndarray, expected: int | None = None) -> np.ndarray:
    """Rows ``P`` with ``P @ h = 0``."""
    return null_space(h.T, expected).T


@dataclass
class _Signal:
    label: str
    precoders: dict[int, np.ndarray]
    receivers: tuple[int, ...]

    @property
    def streams(self) -> int:
        return next(iter(self.precoders.values())).shape[1]


@dataclass
class _Phase:
    signals: list[_Signal]
    combiners: dict[int, np.ndarray] = field(default_factory=dict)


@dataclass(frozen=True)
class SchemeCertificate:
    scheme: Scheme
    M: int
    N: int
    seed: int | None
    leakage: float
    min_singular: float
    streams_per_user: Fraction
    recovery_error: float
    corrupted: bool = False

    @property
    def passed(self) -> bool:
        return self.leakage < LEAKAGE_TOL and self.min_singular > CONDITION_TOL

    def to_dict(self) -> dict:
        s = self.streams_per_user
        return {
            "scheme": self.scheme.value,
            "M": self.M,
            "N": self.N,
            "seed": self.seed,
            "leakage": self.leakage,
            "min_singular": self.min_singular,
            "streams_per_user": str(s.numerator) if s.denominator == 1 else f"{s.numerator}/{s.denominator}",
            "recovery_error": self.recovery_error,
            "corrupted": self.corrupted,
            "pass": self.passed,
        }


def _normalize(sig: _Signal) -> None:
    # unit-norm streams, scaled jointly over cooperating transmitters
    norms = np.sqrt(sum(np.sum(np.abs(v) ** 2, axis=0) for v in sig.precoders.values()))
    norms[norms == 0] = 1.0
    for i in sig.precoders:
        sig.precoders[i] = sig.precoders[i] / norms


def _random_like(rng: np.random.Generator, a: np.ndarray) -> np.ndarray:
    return (rng.standard_normal(a.shape) + 1j * rng.standard_normal(a.shape)) / np.sqrt(2)


def _corrupt(phases: list[_Phase], target: str, rng: np.random.Generator) -> None:
    phase = phases[0]
    if target == "combiner":
        phase.combiners[0] = _random_like(rng, phase.combiners[0])
        return
    sig = phase.signals[0]
    i = min(sig.precoders)
    sig.precoders[i] = _random_like(rng, sig.precoders[i])


def _evaluate(h: ChannelRealization, phases: list[_Phase], rng: np.random.Generator):
    H = h.H
    N = H.shape[2]
    leak = 0.0
    cond = np.inf
    err = 0.0
    decoded = np.zeros(3)
    for phase in phases:
        symbols = [
            (rng.standard_normal(s.streams) + 1j * rng.standard_normal(s.streams)) for s in phase.signals
        ]
        for j in range(3):
            P = phase.combiners.get(j, np.eye(N))
            effs = [P @ sum(H[j, i] @ v for i, v in s.precoders.items()) for s in phase.signals]
            want = [k for k, s in enumerate(phase.signals) if j in s.receivers]
            other = [k for k, s in enumerate(phase.signals) if j not in s.receivers]
            D = np.hstack([effs[k] for k in want])
            if D.shape[0] != D.shape[1]:
                raise DimensionMismatch(
                    f"receiver {j} has {D.shape[0]} dimensions for {D.shape[1]} streams"
                )
            total = np.linalg.norm(np.hstack(effs))
            if other:
                inter = np.hstack([effs[k] for k in other])
                leak = max(leak, float(np.linalg.norm(inter) / total))
            sv = np.linalg.svd(D, compute_uv=False)
            cond = min(cond, float(sv[-1] / sv[0]))
            y = sum(e @ x for e, x in zip(effs, symbols))
            sent = np.concatenate([symbols[k] for k in want])
            try:
                est = np.linalg.solve(D, y)
                err = max(err, float(np.linalg.norm(est - sent) / np.linalg.norm(sent)))
            except np.linalg.LinAlgError:
                err = np.inf
            decoded[j] += D.shape[1]
    streams = Fraction(int(decoded.min()), len(phases))
    return leak, cond, err, streams


def _certify(scheme, h, phases, corrupt_target, corrupt, seed_offset=0) -> SchemeCertificate:
    for ph in phases:
        for s in ph.signals:
            _normalize(s)
    base = 0 if h.seed is None else int(h.seed)
    rng = np.random.default_rng([base, 7919 + seed_offset])
    if corrupt:
        if corrupt_target is None:
            raise ValueError(f"{scheme.value} has no interference to corrupt")
        _corrupt(phases, corrupt_target, rng)
    leak, cond, err, streams = _evaluate(h, phases, rng)
    cfg = h.cfg
    return SchemeCertificate(
        scheme=scheme,
        M=cfg.M,
        N=cfg.N,
        seed=h.seed,
        leakage=leak,
        min_singular=cond,
        streams_per_user=streams,
        recovery_error=err,
        corrupted=corrupt,
    )


def _check_corner(corner: str) -> str:
    corner = corner.upper()
    if corner not in ("Q1", "Q2"):
        raise ValueError(f"corner must be Q1 or Q2, got {corner!r}")
    return corner


def _neutralizing_signal(G, label, rx, pair, expected):
    """Precoders for ``pair`` that vanish at both receivers other than ``rx``."""
    p, q = pair
    others = [o for o in range(3) if o != rx]
    A = np.vstack([np.hstack([G[o][p], G[o][q]]) for o in others])
    V = null_space(A, expected)
    M = G[rx][p].shape[1]
    return _Signal(label, {p: V[:M], q: V[M:]}, (rx,))


def simulate_partial_coop_x(
    h: ChannelRealization, corner: str, corrupt: bool = False
) -> SchemeCertificate:
    """Every transmitter pair sends one message per receiver, in three phases.

    Q1 (``N = 2M/3``): each pair's precoder is in the null space of its
    stacked channels to the two unintended receivers.
    Q2 (``N = 5M/2``): each receiver first keeps ``M`` dimensions, half of
    them blind to one member of its serving pair and half to the other, and
    always blind to the third transmitter; neutralization then runs on the
    resulting ``M x M`` effective channels.
    """
    corner = _check_corner(corner)
    M, N = h.cfg.M, h.cfg.N
    H = h.H
    phases = []
    if corner == "Q1":
        if 3 * N != 2 * M:
            raise DimensionMismatch(f"Q1 needs N = 2M/3, got M={M}, N={N}")
        G = [[H[j, i] for i in range(3)] for j in range(3)]
        for phi in range(3):
            sigs = []
            for k, pair in enumerate(TX_PAIRS):
                rx = (k + phi) % 3
                sigs.append(_neutralizing_signal(G, f"t{pair}->r{rx}", rx, pair, N))
            phases.append(_Phase(sigs))
        target = "precoder"
        scheme = Scheme.PartialCoopX_Q1
    else:
        if 2 * N != 5 * M:
            raise DimensionMismatch(f"Q2 needs N = 5M/2, got M={M}, N={N}")
        half = M // 2
        for phi in range(3):
            serving = {(k + phi) % 3: pair for k, pair in enumerate(TX_PAIRS)}
            P = {}
            for j in range(3):
                p, q = serving[j]
                o = 3 - p - q
                keep_q = _left_null(np.hstack([H[j, p], H[j, o]]), half)
                keep_p = _left_null(np.hstack([H[j, q], H[j, o]]), half)
                P[j] = np.vstack([keep_q, keep_p])
            G = [[P[j] @ H[j, i] for i in range(3)] for j in range(3)]
            sigs = [
                _neutralizing_signal(G, f"t{serving[j]}->r{j}", j, serving[j], M) for j in range(3)
            ]
            phases.append(_Phase(sigs, P))
        target = "combiner"
        scheme = Scheme.PartialCoopX_Q2
    return _certify(scheme, h, phases, target, corrupt)


def _alignment_target(M: int) -> np.ndarray:
    # block diagonal with 7x1 all-ones blocks
    return np.kron(np.eye(M // 7), np.ones((7, 1)))


def _alternating_phases(h: ChannelRealization, label_of) -> list[_Phase]:
    """Three phases in which each transmitter serves a different receive pair.

    Each receiver projects away the one transmitter serving the pair that
    excludes it and keeps its two desired ``M``-stream messages.
    """
    H = h.H
    M = h.cfg.M
    N = h.cfg.N
    phases = []
    for phi in range(3):
        sigs = []
        serving = {}
        for i in range(3):
            g = RX_GROUPS[(i + phi) % 3]
            serving[i] = g
            sigs.append(_Signal(label_of(i, g, phi), {i: np.eye(M, dtype=complex)}, g))
        P = {}
        for j in range(3):
            interferer = next(i for i, g in serving.items() if j not in g)
            P[j] = _left_null(H[j, interferer], N - M)
        phases.append(_Phase(sigs, P))
    return phases


def simulate_x_multicast(
    h: ChannelRealization, corner: str, corrupt: bool = False
) -> SchemeCertificate:
    """Every transmitter sends one message to each pair of receivers.

    Q1 (``N = M``, ``7 | M``): the three messages for the pair excluding a
    receiver are aligned there onto one ``M/7``-dimensional subspace, which
    the receiver projects away.
    Q2 (``N = 3M``): three phases, each transmitter serving a different pair,
    with receive zero-forcing of the single interferer.
    """
    corner = _check_corner(corner)
    M, N = h.cfg.M, h.cfg.N
    H = h.H
    if corner == "Q1":
        if N != M or M % 7:
            raise DimensionMismatch(f"Q1 needs N = M divisible by 7, got M={M}, N={N}")
        Vt = _alignment_target(M)
        sigs = []
        for g in RX_GROUPS:
            o = 3 - sum(g)
            for i in range(3):
                V = np.linalg.solve(H[o, i], Vt)
                sigs.append(_Signal(f"t{i}->r{g}", {i: V}, g))
        P = _left_null(Vt, M - M // 7)
        phases = [_Phase(sigs, {j: P for j in range(3)})]
        return _certify(Scheme.XMulticast_Q1, h, phases, "precoder", corrupt)
    if N != 3 * M:
        raise DimensionMismatch(f"Q2 needs N = 3M, got M={M}, N={N}")
    phases = _alternating_phases(h, lambda i, g, phi: f"t{i}->r{g}")
    return _certify(Scheme.XMulticast_Q2, h, phases, "combiner", corrupt)


def simulate_partial_coop_x_multicast(
    h: ChannelRealization, corner: str, corrupt: bool = False
) -> SchemeCertificate:
    """Every transmitter pair sends one message to each pair of receivers.

    Q1 (``N = M``, ``6 | M``): the two cooperating transmitters drive the
    unintended receiver with ``+E`` and ``-E`` for an identity block ``E``,
    so each interfering message cancels there exactly.
    Q2 (``N = 3M``): the cooperative messages are split so that each
    transmitter sends a distinct one per phase, reusing the alternating
    X-multicast scheme.
    """
    corner = _check_corner(corner)
    M, N = h.cfg.M, h.cfg.N
    H = h.H
    if corner == "Q1":
        if N != M or M % 6:
            raise DimensionMismatch(f"Q1 needs N = M divisible by 6, got M={M}, N={N}")
        b = M // 6
        eye = np.eye(M, dtype=complex)
        sigs = []
        for g in RX_GROUPS:
            o = 3 - sum(g)
            for t, (p, q) in enumerate(TX_PAIRS):
                E = eye[:, t * b : (t + 1) * b]
                Vp = np.linalg.solve(H[o, p], E)
                Vq = -np.linalg.solve(H[o, q], E)
                sigs.append(_Signal(f"t{(p, q)}->r{g}", {p: Vp, q: Vq}, g))
        phases = [_Phase(sigs)]
        return _certify(Scheme.PartialCoopXMulticast_Q1, h, phases, "precoder", corrupt)
    if N != 3 * M:
        raise DimensionMismatch(f"Q2 needs N = 3M, got M={M}, N={N}")
    # transmitter i carries the messages of pair (i, i+1) in every phase
    phases = _alternating_phases(
        h, lambda i, g, phi: f"t{tuple(sorted((i, (i + 1) % 3)))} via t{i}->r{g}"
    )
    return _certify(Scheme.PartialCoopXMulticast_Q2, h, phases, "combiner", corrupt)


def simulate_full_coop_x_multicast(h: ChannelRealization, corrupt: bool = False) -> SchemeCertificate:
    """All transmitters jointly send one message per receiver pair (``N = 2M``).

    Each message is precoded into the null space of the stacked channel to
    the receiver outside its pair.
    """
    M, N = h.cfg.M, h.cfg.N
    if N != 2 * M:
        raise DimensionMismatch(f"needs N = 2M, got M={M}, N={N}")
    H = h.H
    sigs = []
    for g in RX_GROUPS:
        o = 3 - sum(g)
        V = null_space(np.hstack([H[o, i] for i in range(3)]), M)
        sigs.append(_Signal(f"t(0,1,2)->r{g}", {i: V[i * M : (i + 1) * M] for i in range(3)}, g))
    return _certify(Scheme.FullCoopXMulticast_Q1, h, [_Phase(sigs)], "precoder", corrupt)


def simulate_multicast(h: ChannelRealization) -> SchemeCertificate:
    """Every receiver decodes all streams (bits cached at the two other receivers).

    With ``N <= 3M`` each transmitter activates ``N/3`` antennas; otherwise
    each sends ``M`` streams and receivers keep ``3M`` antennas.
    """
    M, N = h.cfg.M, h.cfg.N
    sigs = []
    P = {}
    if N <= 3 * M:
        if N % 3:
            raise DimensionMismatch(f"needs 3 | N when N <= 3M, got N={N}")
        k = N // 3
        for i in range(3):
            sigs.append(_Signal(f"t{i}->all", {i: np.eye(M, k, dtype=complex)}, (0, 1, 2)))
    else:
        for i in range(3):
            sigs.append(_Signal(f"t{i}->all", {i: np.eye(M, dtype=complex)}, (0, 1, 2)))
        P = {j: np.eye(3 * M, N, dtype=complex) for j in range(3)}
    return _certify(Scheme.Multicast, h, [_Phase(sigs, P)], None, False)


def simulate_broadcast(h: ChannelRealization, corrupt: bool = False) -> SchemeCertificate:
    """Fully cooperative transmitters zero-force ``min(M, N)`` streams per receiver."""
    M, N = h.cfg.M, h.cfg.N
    H = h.H
    d = min(M, N)
    base = 0 if h.seed is None else int(h.seed)
    rng = np.random.default_rng([base, 104729])
    P = {j: _random_like(rng, np.empty((d, N))) for j in range(3)}
    G = np.vstack([P[j] @ np.hstack([H[j, i] for i in range(3)]) for j in range(3)])
    sv = np.linalg.svd(G, compute_uv=False)
    if np.count_nonzero(sv > NULL_TOL * sv[0]) != 3 * d:
        raise RankDeficient("stacked broadcast channel is not full rank")
    V = np.linalg.pinv(G)
    sigs = []
    for j in range(3):
        cols = V[:, j * d : (j + 1) * d]
        sigs.append(_Signal(f"t(0,1,2)->r{j}", {i: cols[i * M : (i + 1) * M] for i in range(3)}, (j,)))
    return _certify(Scheme.Broadcast, h, [_Phase(sigs, P)], "precoder", corrupt)


@dataclass(frozen=True)
class SchemeSpec:
    name: str
    scheme: Scheme
    point: IntegerPoint
    smallest: AntennaConfig
    valid: Callable[[AntennaConfig], bool]
    run: Callable[..., SchemeCertificate]
    corruptible: bool = True


SCHEMES: dict[str, SchemeSpec] = {
    s.name: s
    for s in (
        SchemeSpec(
            "partial-coop-x-q1", Scheme.PartialCoopX_Q1, IntegerPoint(0, 2), AntennaConfig(3, 2),
            lambda c: 3 * c.N == 2 * c.M,
            lambda h, corrupt=False: simulate_partial_coop_x(h, "Q1", corrupt),
        ),
        SchemeSpec(
            "partial-coop-x-q2", Scheme.PartialCoopX_Q2, IntegerPoint(0, 2), AntennaConfig(2, 5),
            lambda c: 2 * c.N == 5 * c.M,
            lambda h, corrupt=False: simulate_partial_coop_x(h, "Q2", corrupt),
        ),
        SchemeSpec(
            "x-multicast-q1", Scheme.XMulticast_Q1, IntegerPoint(1, 1), AntennaConfig(7, 7),
            lambda c: c.N == c.M and c.M % 7 == 0,
            lambda h, corrupt=False: simulate_x_multicast(h, "Q1", corrupt),
        ),
        SchemeSpec(
            "x-multicast-q2", Scheme.XMulticast_Q2, IntegerPoint(1, 1), AntennaConfig(1, 3),
            lambda c: c.N == 3 * c.M,
            lambda h, corrupt=False: simulate_x_multicast(h, "Q2", corrupt),
        ),
        SchemeSpec(
            "partial-coop-xm-q1", Scheme.PartialCoopXMulticast_Q1, IntegerPoint(1, 2), AntennaConfig(6, 6),
            lambda c: c.N == c.M and c.M % 6 == 0,
            lambda h, corrupt=False: simulate_partial_coop_x_multicast(h, "Q1", corrupt),
        ),
        SchemeSpec(
            "partial-coop-xm-q2", Scheme.PartialCoopXMulticast_Q2, IntegerPoint(1, 2), AntennaConfig(1, 3),
            lambda c: c.N == 3 * c.M,
            lambda h, corrupt=False: simulate_partial_coop_x_multicast(h, "Q2", corrupt),
        ),
        SchemeSpec(
            "full-coop-xm", Scheme.FullCoopXMulticast_Q1, IntegerPoint(1, 3), AntennaConfig(1, 2),
            lambda c: c.N == 2 * c.M,
            lambda h, corrupt=False: simulate_full_coop_x_multicast(h, corrupt),
        ),
        SchemeSpec(
            "broadcast", Scheme.Broadcast, IntegerPoint(0, 3), AntennaConfig(1, 1),
            lambda c: True,
            lambda h, corrupt=False: simulate_broadcast(h, corrupt),
        ),
        SchemeSpec(
            "multicast", Scheme.Multicast, IntegerPoint(2, 1), AntennaConfig(1, 3),
            lambda c: c.N > 3 * c.M or c.N % 3 == 0,
            lambda h, corrupt=False: simulate_multicast(h),
            corruptible=False,
        ),
    )
}


def run_scheme(name: str, cfg: AntennaConfig, seed: int, corrupt: bool = False) -> SchemeCertificate:
    """Draw a channel for ``seed`` and certify scheme ``name`` on it."""
    try:
        spec = SCHEMES[name]
    except KeyError:
        raise ValueError(f"unknown scheme {name!r}; choose from {sorted(SCHEMES)}") from None
    if not spec.valid(cfg):
        raise DimensionMismatch(f"{name} does not apply at M={cfg.M}, N={cfg.N}")
    if corrupt and not spec.corruptible:
        raise ValueError(f"{name} has no interference to corrupt")
    return spec.run(draw_channel(cfg, seed), corrupt=corrupt)


def expected_streams(name: str, cfg: AntennaConfig) -> Fraction:
    """Per-user DoF the scheme should reach at ``cfg``."""
    return dof_per_user(SCHEMES[name].point, cfg)
