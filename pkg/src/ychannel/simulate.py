"""Monte Carlo experiments: SNR sweeps, DoF-slope fits, SER runs, and the
joint-vs-separable comparison, with reproducible persistence.

A sweep holds the channel realization fixed (``channel_seed``), draws
fresh payloads and noise per SNR point (``noise_seed``), and estimates
each stream's SINR from accumulated signal and residual powers. The
per-stream rate proxy is log2(1+SINR); its slope against log2(SNR) over
the top half of the grid estimates the stream's degrees of freedom.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass

import numpy as np

from . import backend, phy
from .allocation import (
    InfeasibilityReport,
    SubChannelPlan,
    allocate,
    build_plan,
    plan_document,
)
from .dof import DofTuple
from .errors import ContractError, InfeasibleDemandError
from .region import region_contains
from .phy import CANCELLATIONS, CONSTELLATIONS, _crandn, _qpsk_points

SCHEMA_VERSION = 1
CSV_HEADER = "snr_db,stream_src,stream_dst,strategy,sinr_db,rate_bits,ser"


@dataclass(frozen=True)
class SimConfig:
    """Everything a sweep needs; two configs equal => identical results."""

    m: int
    n: int
    dof: DofTuple
    mode: str = "joint"
    snr_grid_db: tuple[float, ...] = (40.0, 50.0, 60.0, 70.0, 80.0)
    trials_per_point: int = 200
    channel_seed: int = 0
    noise_seed: int = 1
    cancellation: str = "genie"
    constellation: str = "gaussian"
    noise: bool = True

    def __post_init__(self):
        if self.mode not in ("joint", "separable"):
            raise ValueError(f"mode must be joint or separable, got {self.mode!r}")
        if self.cancellation not in CANCELLATIONS:
            raise ValueError(f"cancellation must be one of {CANCELLATIONS}")
        if self.constellation not in CONSTELLATIONS:
            raise ValueError(f"constellation must be one of {CONSTELLATIONS}")
        grid = tuple(float(v) for v in self.snr_grid_db)
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("snr_grid_db must be non-empty and strictly increasing")
        object.__setattr__(self, "snr_grid_db", grid)
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")
        for name in ("channel_seed", "noise_seed"):
            seed = getattr(self, name)
            if not (0 <= seed < 2**64):
                raise ValueError(f"{name} must be a 64-bit unsigned integer")

    def to_json(self) -> dict:
        doc = dataclasses.asdict(self)
        doc["dof"] = self.dof.to_json()
        doc["snr_grid_db"] = list(self.snr_grid_db)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "SimConfig":
        data = dict(doc)
        data["dof"] = DofTuple.from_json(data["dof"])
        if "snr_grid_db" in data:
            data["snr_grid_db"] = tuple(data["snr_grid_db"])
        return cls(**data)


@dataclass(frozen=True)
class StreamStat:
    """One stream at one SNR point."""

    snr_db: float
    src: int
    dst: int
    strategy: str
    sinr_db: float
    rate_bits: float
    ser: float | None


@dataclass(frozen=True)
class StreamSlope:
    src: int
    dst: int
    strategy: str
    slope: float
    fit_residual: float


@dataclass(frozen=True)
class SweepResult:
    config: SimConfig
    rows: tuple[StreamStat, ...]
    slopes: tuple[StreamSlope, ...] | None
    sum_rate: tuple[float, ...]
    sum_dof_fit: float | None
    fit_note: str | None


def _build_feasible_plan(cfg: SimConfig) -> SubChannelPlan:
    outcome = build_plan(allocate(cfg.dof, cfg.n, cfg.mode), cfg.n)
    if isinstance(outcome, InfeasibilityReport):
        raise InfeasibleDemandError(outcome.n_s, outcome.n)
    return outcome


def run_sweep(cfg: SimConfig) -> SweepResult:
    """Simulate every SNR point and fit per-stream DoF slopes.

    Raises :class:`InfeasibleDemandError` when the demand does not fit
    the relay in the configured mode.
    """
    plan = _build_feasible_plan(cfg)
    channels = phy.sample_channels(cfg.m, cfg.n, cfg.channel_seed)
    streams = phy.plan_streams(plan)
    sources = np.array(phy.plan_symbol_sources(plan), dtype=int)
    qpsk = cfg.constellation == "qpsk"

    rows = []
    rates = np.zeros((len(cfg.snr_grid_db), len(streams)))
    for p_idx, snr_db in enumerate(cfg.snr_grid_db):
        rho = 10.0 ** (snr_db / 10.0)
        coders = phy.build_coders(channels, rho, plan)
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=cfg.noise_seed, spawn_key=(p_idx,))
        )
        trials = cfg.trials_per_point
        if qpsk:
            unit = _qpsk_points()[rng.integers(0, 4, size=(trials, len(sources)))]
        else:
            unit = _crandn(rng, trials, len(sources))
        symbols = unit * coders.user_std[sources - 1]
        z_r = _crandn(rng, trials, cfg.n) if cfg.noise else None
        z_users = _crandn(rng, trials, 3, cfg.m) if cfg.noise else None
        stats = backend.run_trials(
            channels,
            coders,
            plan,
            symbols,
            z_r,
            z_users,
            cancellation=cfg.cancellation,
            constellation=cfg.constellation,
        )
        sinr = stats.sinr()
        ser = stats.ser() if qpsk else None
        with np.errstate(divide="ignore"):
            point_rates = np.log2(1.0 + sinr)
            sinr_db = 10.0 * np.log10(sinr)
        rates[p_idx] = point_rates
        for k, st in enumerate(streams):
            rows.append(
                StreamStat(
                    snr_db=float(snr_db),
                    src=st.src,
                    dst=st.dst,
                    strategy=st.kind,
                    sinr_db=float(sinr_db[k]),
                    rate_bits=float(point_rates[k]),
                    ser=float(ser[k]) if ser is not None else None,
                )
            )

    sum_rate = tuple(float(np.sum(r)) for r in rates)
    slopes, sum_dof_fit, note = _fit_slopes(cfg, streams, rates)
    return SweepResult(
        config=cfg,
        rows=tuple(rows),
        slopes=slopes,
        sum_rate=sum_rate,
        sum_dof_fit=sum_dof_fit,
        fit_note=note,
    )


def _fit_slopes(cfg, streams, rates):
    """Least-squares rate-vs-log2(SNR) slopes over the top half of the grid."""
    if not cfg.noise:
        return None, None, "noiseless run: rate proxy is unbounded, slope fit disabled"
    n_pts = len(cfg.snr_grid_db)
    lo = n_pts // 2 if n_pts - n_pts // 2 >= 2 else 0
    if n_pts - lo < 2:
        return None, None, "slope fit needs at least 2 SNR points"
    x = np.array(cfg.snr_grid_db[lo:]) * (math.log2(10.0) / 10.0)  # log2(rho)
    y = rates[lo:]
    slopes = []
    design = np.vstack([x, np.ones_like(x)]).T
    coeffs, *_ = np.linalg.lstsq(design, y, rcond=None)
    residuals = y - design @ coeffs
    for k, st in enumerate(streams):
        slopes.append(
            StreamSlope(
                src=st.src,
                dst=st.dst,
                strategy=st.kind,
                slope=float(coeffs[0, k]),
                fit_residual=float(np.sum(residuals[:, k] ** 2)),
            )
        )
    sum_y = np.sum(y, axis=1)
    sum_coeffs, *_ = np.linalg.lstsq(design, sum_y[:, None], rcond=None)
    return tuple(slopes), float(sum_coeffs[0, 0]), None


def run_ser(cfg: SimConfig) -> SweepResult:
    """QPSK symbol-error-rate run with decision-directed cancellation."""
    if cfg.constellation != "qpsk":
        raise ContractError("SER runs need constellation='qpsk'")
    cfg = dataclasses.replace(cfg, cancellation="decision-directed")
    return run_sweep(cfg)


# ---------------------------------------------------------------------------
# Joint vs separable comparison.


@dataclass(frozen=True)
class InseparabilityReport:
    """Allocations of one witness demand under both coding disciplines."""

    n: int
    witness: DofTuple
    uni_dimensions: float
    joint: dict
    separable: dict

    @property
    def joint_feasible(self) -> bool:
        return self.joint["feasible"]

    @property
    def separable_feasible(self) -> bool:
        return self.separable["feasible"]

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "inseparability",
            "n": self.n,
            "witness": self.witness.to_json(),
            "uni_dimensions": self.uni_dimensions,
            "joint": self.joint,
            "separable": self.separable,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "InseparabilityReport":
        return cls(
            n=doc["n"],
            witness=DofTuple.from_json(doc["witness"]),
            uni_dimensions=doc["uni_dimensions"],
            joint=doc["joint"],
            separable=doc["separable"],
        )


def inseparability_experiment(n: int, witness: DofTuple | None = None) -> InseparabilityReport:
    """Allocate a witness demand jointly and separably and report both.

    The default witness (N-1, 0, 1, N-2, N-2, 0) is inside the region
    only for N=3, where separable coding needs 4 of 3 dimensions; larger
    relays need an explicitly chosen witness, e.g. (N-1, 0, 1, 1, 1, 0).
    """
    if n < 3:
        raise ValueError(f"the comparison needs N >= 3, got {n}")
    if witness is None:
        witness = DofTuple(n - 1, 0, 1, n - 2, n - 2, 0)
    if not witness.is_integral:
        raise ContractError(f"witness must be integral, got {witness.as_tuple()}")
    if not region_contains(witness, n):
        raise ContractError(
            f"witness {witness.as_tuple()} is outside the region for N={n}; "
            "pass an explicit in-region witness"
        )
    return InseparabilityReport(
        n=n,
        witness=witness,
        uni_dimensions=witness.total(),
        joint=plan_document(allocate(witness, n, "joint"), n),
        separable=plan_document(allocate(witness, n, "separable"), n),
    )


# ---------------------------------------------------------------------------
# Persistence.


def sweep_to_json(result: SweepResult) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "sweep",
        "config": result.config.to_json(),
        "rows": [dataclasses.asdict(r) for r in result.rows],
        "slopes": (
            [dataclasses.asdict(s) for s in result.slopes]
            if result.slopes is not None
            else None
        ),
        "sum_rate": list(result.sum_rate),
        "sum_dof_fit": result.sum_dof_fit,
        "fit_note": result.fit_note,
    }


def sweep_from_json(doc: dict) -> SweepResult:
    return SweepResult(
        config=SimConfig.from_json(doc["config"]),
        rows=tuple(StreamStat(**r) for r in doc["rows"]),
        slopes=(
            tuple(StreamSlope(**s) for s in doc["slopes"])
            if doc["slopes"] is not None
            else None
        ),
        sum_rate=tuple(doc["sum_rate"]),
        sum_dof_fit=doc["sum_dof_fit"],
        fit_note=doc["fit_note"],
    )


def sweep_csv_lines(result: SweepResult) -> list[str]:
    lines = [CSV_HEADER]
    for r in result.rows:
        ser = "" if r.ser is None else repr(r.ser)
        lines.append(
            f"{r.snr_db!r},{r.src},{r.dst},{r.strategy},{r.sinr_db!r},{r.rate_bits!r},{ser}"
        )
    return lines


def load_sweep_csv(path: str) -> tuple[StreamStat, ...]:
    rows = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        for line in fh:
            snr, src, dst, strategy, sinr, rate, ser = line.strip().split(",")
            rows.append(
                StreamStat(
                    snr_db=float(snr),
                    src=int(src),
                    dst=int(dst),
                    strategy=strategy,
                    sinr_db=float(sinr),
                    rate_bits=float(rate),
                    ser=float(ser) if ser else None,
                )
            )
    return tuple(rows)


def persist(result, path: str) -> None:
    """Write a result to disk: CSV for sweeps, JSON for reports."""
    try:
        if isinstance(result, SweepResult):
            body = "\n".join(sweep_csv_lines(result)) + "\n"
        elif isinstance(result, InseparabilityReport):
            body = json.dumps(result.to_json(), indent=2) + "\n"
        elif isinstance(result, dict):
            body = json.dumps(result, indent=2) + "\n"
        else:
            raise TypeError(f"cannot persist {type(result).__name__}")
        with open(path, "w") as fh:
            fh.write(body)
    except OSError as exc:
        raise OSError(f"failed to write {path}: {exc}") from exc
