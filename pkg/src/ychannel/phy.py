"""Zero-forcing diagonalization and one round of relayed exchange.

Uplink and downlink are diagonalized simultaneously: user ``i`` precodes
with ``V_i = alpha_i H_i^H (H_i H_i^H)^-1`` so the relay sees
``y_r = sum_i alpha_i a_i + z_r``, and postcodes its receive signal with
``U_i = (D_i^H D_i)^-1 D_i^H`` so that ``U_i y_i = x_r + U_i z_i``. Both
pseudo-inverses need at least as many user antennas as relay antennas
(M >= N). The result is N independent scalar pipes through the relay;
plan entries place payload symbols onto those pipes, the relay scales
and forwards what it observed, and each destination removes the known
part of the forwarded combination before reading off its symbol.

The relay is modeled as forwarding the observed noisy combination
directly. At high SNR this has the same pre-log behavior as decoding
the integer combination first, and it keeps the simulator free of any
particular code construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .allocation import SubChannelPlan
from .errors import ContractError, NearSingularChannelError, UnsupportedRegimeError

CONDITION_LIMIT = 1e8
POWER_SPLITS = ("uniform", "active-only")
CONSTELLATIONS = ("gaussian", "qpsk")
CANCELLATIONS = ("genie", "decision-directed")

# relative decode error below which a noiseless round counts as exact
EXACT_RECOVERY_TOL = 1e-6


@dataclass(frozen=True)
class ChannelSet:
    """Static uplink (N x M) and downlink (M x N) matrices for the 3 users."""

    m: int
    n: int
    uplink: tuple[np.ndarray, ...]
    downlink: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not (1 <= self.n <= self.m):
            raise UnsupportedRegimeError(
                f"need 1 <= N <= M (relay antennas <= user antennas), "
                f"got M={self.m}, N={self.n}"
            )
        for h in self.uplink:
            if h.shape != (self.n, self.m):
                raise ValueError(f"uplink matrix has shape {h.shape}, want {(self.n, self.m)}")
        for d in self.downlink:
            if d.shape != (self.m, self.n):
                raise ValueError(f"downlink matrix has shape {d.shape}, want {(self.m, self.n)}")

    def to_json(self) -> dict:
        def encode(mat):
            return [[[float(z.real), float(z.imag)] for z in row] for row in mat]

        return {
            "m": self.m,
            "n": self.n,
            "uplink": [encode(h) for h in self.uplink],
            "downlink": [encode(d) for d in self.downlink],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ChannelSet":
        def decode(rows):
            return np.array([[complex(re, im) for re, im in row] for row in rows])

        return cls(
            m=doc["m"],
            n=doc["n"],
            uplink=tuple(decode(h) for h in doc["uplink"]),
            downlink=tuple(decode(d) for d in doc["downlink"]),
        )


def _crandn(rng: np.random.Generator, *shape) -> np.ndarray:
    """Unit-variance circularly-symmetric complex Gaussian draws."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def sample_channels(
    m: int, n: int, seed: int, max_condition: float = CONDITION_LIMIT
) -> ChannelSet:
    """Draw i.i.d. unit-variance complex Gaussian channel matrices.

    Matrices whose Gram condition number exceeds ``max_condition`` are
    redrawn, so downstream inversions stay well-behaved. Deterministic
    for a fixed seed.
    """
    if n > m:
        raise UnsupportedRegimeError(
            f"relay cannot have more antennas than users here: M={m} < N={n}"
        )
    rng = np.random.default_rng(seed)

    def draw(shape, gram):
        while True:
            mat = _crandn(rng, *shape)
            if np.linalg.cond(gram(mat)) <= max_condition:
                return mat

    uplink = tuple(draw((n, m), lambda h: h @ h.conj().T) for _ in range(3))
    downlink = tuple(draw((m, n), lambda d: d.conj().T @ d) for _ in range(3))
    return ChannelSet(m=m, n=n, uplink=uplink, downlink=downlink)


@dataclass(frozen=True)
class CoderSet:
    """Pre/postcoders plus the power scalars tied to one plan.

    ``gammas`` and ``user_std`` are only present when the coders were
    built against a plan (they depend on which sub-channels are active).
    ``post_noise_var[i, s]`` is the variance of user ``i``'s processed
    noise on sub-channel ``s``.
    """

    rho: float
    precoders: tuple[np.ndarray, ...]  # V_i, M x N
    postcoders: tuple[np.ndarray, ...]  # U_i, N x M
    alphas: np.ndarray  # (3,)
    post_noise_var: np.ndarray  # (3, N)
    gammas: np.ndarray | None = None  # (N,), zero on idle sub-channels
    user_std: np.ndarray | None = None  # (3,) per-user symbol standard deviation


def build_coders(
    channels: ChannelSet,
    rho: float,
    plan: SubChannelPlan | None = None,
    power_split: str = "uniform",
    max_condition: float = CONDITION_LIMIT,
) -> CoderSet:
    """Construct the diagonalizing coders and power scalars.

    ``alpha_i = sqrt(N / tr((H_i H_i^H)^-1))`` makes the transmit power
    exactly ``rho`` when all N symbol slots carry variance ``rho/N``.
    Relay gains split the relay budget uniformly over the plan's active
    sub-channels, accounting for the forwarded relay noise.

    ``power_split="active-only"`` instead sizes each user's symbol
    variance so its transmit power is ``rho`` over just the slots it
    uses.
    """
    if rho <= 0:
        raise ValueError(f"transmit power must be positive, got {rho}")
    if power_split not in POWER_SPLITS:
        raise ValueError(f"power_split must be one of {POWER_SPLITS}, got {power_split!r}")
    n = channels.n
    precoders = []
    postcoders = []
    alphas = np.empty(3)
    post_noise_var = np.empty((3, n))
    for i in range(3):
        h = channels.uplink[i]
        gram_up = h @ h.conj().T
        if np.linalg.cond(gram_up) > max_condition:
            raise NearSingularChannelError(f"uplink Gram matrix of user {i + 1} is near singular")
        gram_up_inv = np.linalg.inv(gram_up)
        alphas[i] = np.sqrt(n / np.real(np.trace(gram_up_inv)))
        precoders.append(alphas[i] * (h.conj().T @ gram_up_inv))

        d = channels.downlink[i]
        gram_down = d.conj().T @ d
        if np.linalg.cond(gram_down) > max_condition:
            raise NearSingularChannelError(f"downlink Gram matrix of user {i + 1} is near singular")
        u = np.linalg.inv(gram_down) @ d.conj().T
        postcoders.append(u)
        post_noise_var[i] = np.sum(np.abs(u) ** 2, axis=1)

    gammas = None
    user_std = None
    if plan is not None:
        if plan.total_subchannels > n:
            raise ContractError(
                f"plan needs {plan.total_subchannels} sub-channels, relay has {n}"
            )
        user_std = _user_std(plan, precoders, rho, n, power_split)
        gammas = _relay_gains(plan, alphas, user_std, rho, n)
    return CoderSet(
        rho=float(rho),
        precoders=tuple(precoders),
        postcoders=tuple(postcoders),
        alphas=alphas,
        post_noise_var=post_noise_var,
        gammas=gammas,
        user_std=user_std,
    )


def _user_std(plan, precoders, rho, n, power_split) -> np.ndarray:
    """Per-user symbol deviation honoring tr(E[x_i x_i^H]) <= rho.

    A user's transmit power is sigma^2 * sum_k ||V_i m_k||^2, where m_k
    marks the slots carrying its k-th symbol; a cyclic entry's shared
    symbol occupies two slots, so its precoder columns add coherently
    and the power is not captured by per-slot variances alone. Uniform
    mode uses rho/N per slot, reduced where that coherent sum would
    break the constraint; active-only mode spends exactly rho per
    transmitting user.
    """
    load = np.zeros(3)
    slot_groups: dict[tuple[int, int], list[int]] = {}
    for sym, user, s in plan_writes(plan):
        slot_groups.setdefault((user, sym), []).append(s)
    for (user, _), slots in slot_groups.items():
        merged = precoders[user - 1][:, slots].sum(axis=1)
        load[user - 1] += np.sum(np.abs(merged) ** 2)
    std = np.zeros(3)
    for i in range(3):
        if load[i] == 0:
            std[i] = np.sqrt(rho / n) if power_split == "uniform" else 0.0
        elif power_split == "uniform":
            std[i] = np.sqrt(min(rho / n, rho / load[i]))
        else:
            std[i] = np.sqrt(rho / load[i])
    return std


def _relay_gains(plan, alphas, user_std, rho, n) -> np.ndarray:
    """Per-sub-channel relay scaling: budget rho split uniformly over the
    active sub-channels, each seeing signal power plus unit relay noise."""
    gammas = np.zeros(n)
    n_active = plan.total_subchannels
    if n_active == 0:
        return gammas
    incoming = np.zeros(n)
    for sym_idx, user, s in plan_writes(plan):
        del sym_idx
        incoming[s] += alphas[user - 1] ** 2 * user_std[user - 1] ** 2
    for s in range(n_active):
        gammas[s] = np.sqrt((rho / n_active) / (incoming[s] + 1.0))
    return gammas


# ---------------------------------------------------------------------------
# Plan geometry: which symbol goes where, and how each stream is decoded.


@dataclass(frozen=True)
class StreamSpec:
    """Decode recipe for one payload stream.

    The stream's symbol (global index ``sym``) travels ``src -> dst`` and
    is read off sub-channel ``sub`` at the destination. ``cancel_sym``
    names the one interfering symbol removed first: the destination's own
    symbol, or, when ``chained``, a symbol the destination must itself
    decode from sub-channel ``inter_sub`` (removing ``inter_cancel_sym``,
    its own) before it can cancel it.
    """

    entry_index: int
    kind: str
    src: int
    dst: int
    sym: int
    sub: int
    cancel_sym: int | None = None
    chained: bool = False
    inter_sub: int | None = None
    inter_cancel_sym: int | None = None


def plan_streams(plan: SubChannelPlan) -> tuple[StreamSpec, ...]:
    """Flatten a plan into per-stream decode recipes, in plan order."""
    streams = []
    base = 0
    for e_idx, entry in enumerate(plan.entries):
        if entry.kind == "bidir":
            i, j = entry.users
            (s,) = entry.subs
            streams.append(StreamSpec(e_idx, "bidir", i, j, base, s, cancel_sym=base + 1))
            streams.append(StreamSpec(e_idx, "bidir", j, i, base + 1, s, cancel_sym=base))
            base += 2
        elif entry.kind == "cyclic":
            i, j, k = entry.users
            s1, s2 = entry.subs
            streams.append(StreamSpec(e_idx, "cyclic", i, j, base, s1, cancel_sym=base + 1))
            streams.append(StreamSpec(e_idx, "cyclic", j, k, base + 1, s2, cancel_sym=base + 2))
            # the third receiver first decodes the shared symbol on s1,
            # then strips it from s2
            streams.append(
                StreamSpec(
                    e_idx,
                    "cyclic",
                    k,
                    i,
                    base + 2,
                    s2,
                    cancel_sym=base + 1,
                    chained=True,
                    inter_sub=s1,
                    inter_cancel_sym=base,
                )
            )
            base += 3
        else:
            i, j = entry.users
            (s,) = entry.subs
            streams.append(StreamSpec(e_idx, "uni", i, j, base, s))
            base += 1
    return tuple(streams)


def plan_writes(plan: SubChannelPlan) -> tuple[tuple[int, int, int], ...]:
    """Uplink slot writes as (symbol index, user, sub-channel) triples."""
    writes = []
    base = 0
    for entry in plan.entries:
        if entry.kind == "bidir":
            i, j = entry.users
            (s,) = entry.subs
            writes += [(base, i, s), (base + 1, j, s)]
            base += 2
        elif entry.kind == "cyclic":
            i, j, k = entry.users
            s1, s2 = entry.subs
            # the middle user repeats its symbol on both sub-channels
            writes += [(base, i, s1), (base + 1, j, s1), (base + 1, j, s2), (base + 2, k, s2)]
            base += 3
        else:
            i, _ = entry.users
            (s,) = entry.subs
            writes.append((base, i, s))
            base += 1
    return tuple(writes)


def plan_symbol_count(plan: SubChannelPlan) -> int:
    return len(plan_streams(plan))


def plan_symbol_sources(plan: SubChannelPlan) -> tuple[int, ...]:
    return tuple(st.src for st in plan_streams(plan))


@dataclass(frozen=True)
class StreamSymbols:
    """One round's payload: a flat complex symbol per stream, plan order."""

    flat: np.ndarray
    user_std: np.ndarray
    constellation: str = "gaussian"


def draw_symbols(
    plan: SubChannelPlan,
    coders: CoderSet,
    rng: np.random.Generator,
    constellation: str = "gaussian",
) -> StreamSymbols:
    """Draw one round of payload symbols at the coders' per-user power."""
    if coders.user_std is None:
        raise ContractError("coders were built without a plan; symbol power unknown")
    if constellation not in CONSTELLATIONS:
        raise ValueError(f"constellation must be one of {CONSTELLATIONS}, got {constellation!r}")
    sources = np.array(plan_symbol_sources(plan), dtype=int)
    if constellation == "gaussian":
        unit = _crandn(rng, len(sources))
    else:
        unit = _qpsk_points()[rng.integers(0, 4, size=len(sources))]
    flat = unit * coders.user_std[sources - 1]
    return StreamSymbols(flat=flat, user_std=coders.user_std, constellation=constellation)


def _qpsk_points() -> np.ndarray:
    return np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2.0)


def qpsk_slice(value: complex, std: float) -> complex:
    """Nearest QPSK point at the given per-symbol deviation."""
    re = 1.0 if value.real >= 0 else -1.0
    im = 1.0 if value.imag >= 0 else -1.0
    return std * (re + 1j * im) / np.sqrt(2.0)


def _same_quadrant(a: complex, b: complex) -> bool:
    return (a.real >= 0) == (b.real >= 0) and (a.imag >= 0) == (b.imag >= 0)


# ---------------------------------------------------------------------------
# One transmission round.


def uplink(
    channels: ChannelSet,
    coders: CoderSet,
    plan: SubChannelPlan,
    symbols: StreamSymbols,
    noise: bool = False,
    rng: np.random.Generator | None = None,
    z_r: np.ndarray | None = None,
) -> np.ndarray:
    """Relay observation per sub-channel for one round.

    Builds each user's slot vector from the plan, precodes, and sums the
    per-user contributions at the relay. ``z_r`` overrides the drawn
    relay noise (unit variance per sub-channel) for reproducible runs.
    """
    n = channels.n
    if plan.total_subchannels > n:
        raise ContractError(
            f"plan needs {plan.total_subchannels} sub-channels, relay has {n}"
        )
    writes = plan_writes(plan)
    n_syms = plan_symbol_count(plan)
    if symbols.flat.shape != (n_syms,):
        raise ContractError(
            f"plan carries {n_syms} symbols, got {symbols.flat.shape}"
        )
    slots = np.zeros((3, n), dtype=complex)
    for sym_idx, user, s in writes:
        slots[user - 1, s] += symbols.flat[sym_idx]
    y_r = np.zeros(n, dtype=complex)
    for i in range(3):
        y_r += channels.uplink[i] @ (coders.precoders[i] @ slots[i])
    if noise:
        if z_r is None:
            if rng is None:
                raise ValueError("noise=True needs rng or an explicit z_r")
            z_r = _crandn(rng, n)
        y_r = y_r + z_r
    return y_r


def relay_forward(
    y_r: np.ndarray, coders: CoderSet, plan: SubChannelPlan
) -> np.ndarray:
    """Scale the relay observation per sub-channel; idle ones send zero."""
    del plan  # activity is already encoded in the gains
    if coders.gammas is None:
        raise ContractError("coders were built without a plan; relay gains unknown")
    return coders.gammas * y_r


@dataclass(frozen=True)
class StreamRecord:
    """Decode outcome for one stream in one round."""

    entry_index: int
    kind: str
    src: int
    dst: int
    sub: int
    decoded: complex
    truth: complex
    signal_power: float
    resid_power: float
    rel_err: float
    exact: bool | None  # set only in noiseless rounds
    hard_error: bool | None  # set only for QPSK payloads

    @property
    def sinr(self) -> float:
        """Single-round SINR estimate; NaN when the stream carried nothing."""
        if self.signal_power == 0:
            return float("nan")
        if self.resid_power == 0:
            return float("inf")
        return self.signal_power / self.resid_power


@dataclass(frozen=True)
class RoundResult:
    records: tuple[StreamRecord, ...]

    @property
    def all_exact(self) -> bool:
        return all(r.exact for r in self.records)


def downlink_decode(
    channels: ChannelSet,
    coders: CoderSet,
    plan: SubChannelPlan,
    x_r: np.ndarray,
    self_info: StreamSymbols | None,
    noise: bool = False,
    rng: np.random.Generator | None = None,
    z_users: np.ndarray | None = None,
    cancellation: str = "genie",
) -> RoundResult:
    """Post-code each user's receive signal and decode its streams.

    ``self_info`` must hold the round's true transmitted symbols; every
    receiver subtracts the known part of each forwarded combination
    before scaling. With ``cancellation="decision-directed"`` the chained
    cyclic step reuses the receiver's own hard QPSK decision instead of
    the true symbol, so decision errors propagate as they would in a
    real receiver. ``z_users`` (shape (3, M)) overrides the drawn noise.
    """
    if self_info is None:
        raise ContractError("self_info with the round's transmitted symbols is required")
    if cancellation not in CANCELLATIONS:
        raise ValueError(f"cancellation must be one of {CANCELLATIONS}, got {cancellation!r}")
    if cancellation == "decision-directed" and self_info.constellation != "qpsk":
        raise ContractError("decision-directed cancellation needs a QPSK payload")
    if coders.gammas is None:
        raise ContractError("coders were built without a plan; relay gains unknown")
    n_syms = plan_symbol_count(plan)
    if self_info.flat.shape != (n_syms,):
        raise ContractError(f"plan carries {n_syms} symbols, got {self_info.flat.shape}")

    if noise and z_users is None:
        if rng is None:
            raise ValueError("noise=True needs rng or an explicit z_users")
        z_users = _crandn(rng, 3, channels.m)

    ytilde = np.empty((3, channels.n), dtype=complex)
    for i in range(3):
        y_i = channels.downlink[i] @ x_r
        if noise:
            y_i = y_i + z_users[i]
        ytilde[i] = coders.postcoders[i] @ y_i

    flat = self_info.flat
    sources = plan_symbol_sources(plan)
    gammas = coders.gammas
    alphas = coders.alphas
    records = []
    for st in plan_streams(plan):
        raw = ytilde[st.dst - 1, st.sub]
        if st.cancel_sym is not None:
            if st.chained and cancellation == "decision-directed":
                # re-decode the shared symbol the way the receiver would
                i_coeff = gammas[st.inter_sub] * alphas[sources[st.cancel_sym] - 1]
                i_raw = ytilde[st.dst - 1, st.inter_sub] - (
                    gammas[st.inter_sub]
                    * alphas[sources[st.inter_cancel_sym] - 1]
                    * flat[st.inter_cancel_sym]
                )
                cancel_val = qpsk_slice(
                    i_raw / i_coeff, self_info.user_std[sources[st.cancel_sym] - 1]
                )
            else:
                cancel_val = flat[st.cancel_sym]
            raw = raw - gammas[st.sub] * alphas[sources[st.cancel_sym] - 1] * cancel_val
        coeff = gammas[st.sub] * alphas[st.src - 1]
        decoded = raw / coeff
        truth = flat[st.sym]
        signal_power = abs(coeff * truth) ** 2
        resid_power = abs(raw - coeff * truth) ** 2
        err = abs(decoded - truth)
        rel_err = err / abs(truth) if truth != 0 else err
        hard_error = None
        if self_info.constellation == "qpsk":
            hard_error = not _same_quadrant(decoded, truth)
        records.append(
            StreamRecord(
                entry_index=st.entry_index,
                kind=st.kind,
                src=st.src,
                dst=st.dst,
                sub=st.sub,
                decoded=decoded,
                truth=truth,
                signal_power=signal_power,
                resid_power=resid_power,
                rel_err=rel_err,
                exact=(rel_err <= EXACT_RECOVERY_TOL) if not noise else None,
                hard_error=hard_error,
            )
        )
    return RoundResult(records=tuple(records))
