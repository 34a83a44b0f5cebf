"""Pure-Python trial kernel: replays rounds through the phy operations.

Slow but dependency-free; the compiled kernel in ``_trials_cy`` computes
the same statistics. Both consume pre-drawn symbol and noise arrays so a
run is reproducible regardless of which kernel served it.
"""

from __future__ import annotations

import numpy as np

from . import phy


def run_trials(channels, coders, plan, symbols, z_r, z_users, cancellation, constellation):
    """Accumulate per-stream decode statistics over a batch of rounds.

    Returns arrays (signal_sum, resid_sum, hard_errors, max_rel_err),
    one entry per stream in plan order.
    """
    n_streams = phy.plan_symbol_count(plan)
    signal = np.zeros(n_streams)
    resid = np.zeros(n_streams)
    hard = np.zeros(n_streams, dtype=np.int64)
    max_rel = np.zeros(n_streams)
    noise = z_r is not None
    for t in range(symbols.shape[0]):
        syms = phy.StreamSymbols(
            flat=symbols[t], user_std=coders.user_std, constellation=constellation
        )
        y_r = phy.uplink(
            channels, coders, plan, syms, noise=noise, z_r=z_r[t] if noise else None
        )
        x_r = phy.relay_forward(y_r, coders, plan)
        result = phy.downlink_decode(
            channels,
            coders,
            plan,
            x_r,
            syms,
            noise=noise,
            z_users=z_users[t] if noise else None,
            cancellation=cancellation,
        )
        for k, rec in enumerate(result.records):
            signal[k] += rec.signal_power
            resid[k] += rec.resid_power
            if rec.hard_error:
                hard[k] += 1
            if rec.rel_err > max_rel[k]:
                max_rel[k] = rec.rel_err
    return signal, resid, hard, max_rel
