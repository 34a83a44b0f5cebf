"""Trial-kernel selection and the shared batch interface.

The compiled kernel is used when the extension built; set
``YCHAN_BACKEND=python`` or ``YCHAN_BACKEND=compiled`` to force a choice.
Both kernels consume the same pre-drawn randomness, so a given
configuration produces the same statistics (up to floating-point
reassociation) on either.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _trials_py, phy
from .errors import ContractError

try:
    from . import _trials_cy
except ImportError:  # extension not built
    _trials_cy = None

_CHOICES = ("auto", "python", "compiled")


def _select() -> str:
    choice = os.environ.get("YCHAN_BACKEND", "auto")
    if choice not in _CHOICES:
        raise ValueError(f"YCHAN_BACKEND must be one of {_CHOICES}, got {choice!r}")
    if choice == "compiled" and _trials_cy is None:
        raise ImportError("compiled kernel requested but the extension is not built")
    if choice == "auto":
        return "compiled" if _trials_cy is not None else "python"
    return choice


BACKEND = _select()


def available_backends() -> tuple[str, ...]:
    return ("python", "compiled") if _trials_cy is not None else ("python",)


@dataclass(frozen=True)
class TrialStats:
    """Per-stream sums over a batch of rounds, in plan-stream order."""

    signal_sum: np.ndarray
    resid_sum: np.ndarray
    hard_errors: np.ndarray
    max_rel_err: np.ndarray
    n_trials: int

    def sinr(self) -> np.ndarray:
        """Batch SINR estimate per stream; NaN where nothing was sent."""
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.signal_sum / self.resid_sum
        out[(self.signal_sum == 0) & (self.resid_sum == 0)] = np.nan
        return out

    def ser(self) -> np.ndarray:
        return self.hard_errors / self.n_trials


def run_trials(
    channels: phy.ChannelSet,
    coders: phy.CoderSet,
    plan,
    symbols: np.ndarray,
    z_r: np.ndarray | None,
    z_users: np.ndarray | None,
    cancellation: str = "genie",
    constellation: str = "gaussian",
    backend: str | None = None,
) -> TrialStats:
    """Run a batch of rounds on the selected kernel.

    ``symbols`` has shape (trials, streams) and is already scaled to the
    per-user symbol power; ``z_r``/``z_users`` are the unit-variance
    noise draws, or both None for a noiseless batch.
    """
    if (z_r is None) != (z_users is None):
        raise ContractError("relay and user noise must be supplied together")
    if coders.gammas is None or coders.user_std is None:
        raise ContractError("coders were built without a plan")
    if cancellation == "decision-directed" and constellation != "qpsk":
        raise ContractError("decision-directed cancellation needs a QPSK payload")
    n_syms = phy.plan_symbol_count(plan)
    if symbols.ndim != 2 or symbols.shape[1] != n_syms:
        raise ContractError(f"symbols must have shape (trials, {n_syms})")

    which = backend or BACKEND
    if which == "python":
        raw = _trials_py.run_trials(
            channels, coders, plan, symbols, z_r, z_users, cancellation, constellation
        )
    elif which == "compiled":
        if _trials_cy is None:
            raise ImportError("compiled kernel is not built")
        raw = _run_compiled(
            channels, coders, plan, symbols, z_r, z_users, cancellation, constellation
        )
    else:
        raise ValueError(f"backend must be 'python' or 'compiled', got {which!r}")
    return TrialStats(*raw, n_trials=symbols.shape[0])


def _run_compiled(channels, coders, plan, symbols, z_r, z_users, cancellation, constellation):
    streams = phy.plan_streams(plan)
    writes = phy.plan_writes(plan)
    trials = symbols.shape[0]
    noise = z_r is not None

    def ivec(values):
        return np.ascontiguousarray(values, dtype=np.intc)

    w_sym = ivec([w[0] for w in writes])
    w_user = ivec([w[1] - 1 for w in writes])
    w_sub = ivec([w[2] for w in writes])
    st_src = ivec([s.src - 1 for s in streams])
    st_dst = ivec([s.dst - 1 for s in streams])
    st_sym = ivec([s.sym for s in streams])
    st_sub = ivec([s.sub for s in streams])
    st_cancel = ivec([-1 if s.cancel_sym is None else s.cancel_sym for s in streams])
    st_chained = ivec([int(s.chained) for s in streams])
    st_inter_sub = ivec([-1 if s.inter_sub is None else s.inter_sub for s in streams])
    st_inter_cancel = ivec(
        [-1 if s.inter_cancel_sym is None else s.inter_cancel_sym for s in streams]
    )
    sym_src = ivec([s - 1 for s in phy.plan_symbol_sources(plan)])

    def cstack(mats):
        return np.ascontiguousarray(np.stack(mats), dtype=complex)

    empty_r = np.zeros((0, channels.n), dtype=complex)
    empty_u = np.zeros((0, 3, channels.m), dtype=complex)
    return _trials_cy.run_trials(
        cstack(channels.uplink),
        cstack(coders.precoders),
        cstack(channels.downlink),
        cstack(coders.postcoders),
        np.ascontiguousarray(coders.alphas),
        np.ascontiguousarray(coders.gammas),
        w_sym,
        w_user,
        w_sub,
        st_src,
        st_dst,
        st_sym,
        st_sub,
        st_cancel,
        st_chained,
        st_inter_sub,
        st_inter_cancel,
        sym_src,
        np.ascontiguousarray(coders.user_std),
        np.ascontiguousarray(symbols, dtype=complex),
        np.ascontiguousarray(z_r, dtype=complex) if noise else empty_r,
        np.ascontiguousarray(z_users, dtype=complex) if noise else empty_u,
        int(noise),
        int(cancellation == "decision-directed"),
        int(constellation == "qpsk"),
    )
