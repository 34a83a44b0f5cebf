# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled trial kernel: the batched round loop with preallocated buffers.

Mirrors the statistics of ``_trials_py.run_trials``; see that module for
the contract. Arrays come in pre-drawn so results match the pure kernel
up to floating-point reassociation.
"""

import numpy as np

from libc.math cimport sqrt


def run_trials(
    double complex[:, :, ::1] h_up,      # (3, N, M)
    double complex[:, :, ::1] v_pre,     # (3, M, N)
    double complex[:, :, ::1] d_down,    # (3, M, N)
    double complex[:, :, ::1] u_post,    # (3, N, M)
    double[::1] alphas,                  # (3,)
    double[::1] gammas,                  # (N,)
    int[::1] w_sym, int[::1] w_user, int[::1] w_sub,
    int[::1] st_src, int[::1] st_dst, int[::1] st_sym, int[::1] st_sub,
    int[::1] st_cancel, int[::1] st_chained,
    int[::1] st_inter_sub, int[::1] st_inter_cancel,
    int[::1] sym_src,                    # (n_syms,) 0-based source user
    double[::1] user_std,                # (3,)
    double complex[:, ::1] symbols,      # (T, n_syms)
    double complex[:, ::1] z_r,          # (T, N) or empty when noiseless
    double complex[:, :, ::1] z_users,   # (T, 3, M) or empty
    int noise,
    int decision_directed,
    int qpsk,
):
    cdef Py_ssize_t trials = symbols.shape[0]
    cdef Py_ssize_t n_syms = symbols.shape[1]
    cdef Py_ssize_t n = h_up.shape[1]
    cdef Py_ssize_t m = h_up.shape[2]
    cdef Py_ssize_t n_writes = w_sym.shape[0]
    cdef Py_ssize_t n_streams = st_src.shape[0]

    signal_np = np.zeros(n_streams)
    resid_np = np.zeros(n_streams)
    hard_np = np.zeros(n_streams, dtype=np.int64)
    max_rel_np = np.zeros(n_streams)
    cdef double[::1] signal = signal_np
    cdef double[::1] resid = resid_np
    cdef long long[::1] hard = hard_np
    cdef double[::1] max_rel = max_rel_np

    slots_np = np.zeros((3, n), dtype=complex)
    x_np = np.zeros((3, m), dtype=complex)
    y_r_np = np.zeros(n, dtype=complex)
    x_r_np = np.zeros(n, dtype=complex)
    y_u_np = np.zeros(m, dtype=complex)
    yt_np = np.zeros((3, n), dtype=complex)
    cdef double complex[:, ::1] slots = slots_np
    cdef double complex[:, ::1] x = x_np
    cdef double complex[::1] y_r = y_r_np
    cdef double complex[::1] x_r = x_r_np
    cdef double complex[::1] y_u = y_u_np
    cdef double complex[:, ::1] yt = yt_np

    cdef Py_ssize_t t, w, u, s, q, k
    cdef double complex acc, raw, i_raw, cancel_val, soft, truth, delta
    cdef double coeff, i_coeff, std, err, rel, sp, rp, re, im
    cdef int cs
    cdef double inv_sqrt2 = 1.0 / sqrt(2.0)

    for t in range(trials):
        slots[:, :] = 0
        for w in range(n_writes):
            slots[w_user[w], w_sub[w]] = slots[w_user[w], w_sub[w]] + symbols[t, w_sym[w]]

        # uplink: x_u = V_u a_u, relay adds the per-user contributions
        for u in range(3):
            for q in range(m):
                acc = 0
                for s in range(n):
                    acc = acc + v_pre[u, q, s] * slots[u, s]
                x[u, q] = acc
        for s in range(n):
            acc = z_r[t, s] if noise else 0
            for u in range(3):
                for q in range(m):
                    acc = acc + h_up[u, s, q] * x[u, q]
            y_r[s] = acc

        for s in range(n):
            x_r[s] = gammas[s] * y_r[s]

        # downlink: each user postcodes D_u x_r (+ noise)
        for u in range(3):
            for q in range(m):
                acc = z_users[t, u, q] if noise else 0
                for s in range(n):
                    acc = acc + d_down[u, q, s] * x_r[s]
                y_u[q] = acc
            for s in range(n):
                acc = 0
                for q in range(m):
                    acc = acc + u_post[u, s, q] * y_u[q]
                yt[u, s] = acc

        for k in range(n_streams):
            raw = yt[st_dst[k], st_sub[k]]
            cs = st_cancel[k]
            if cs >= 0:
                if st_chained[k] and decision_directed:
                    i_raw = yt[st_dst[k], st_inter_sub[k]] - (
                        gammas[st_inter_sub[k]]
                        * alphas[sym_src[st_inter_cancel[k]]]
                        * symbols[t, st_inter_cancel[k]]
                    )
                    i_coeff = gammas[st_inter_sub[k]] * alphas[sym_src[cs]]
                    soft = i_raw / i_coeff
                    std = user_std[sym_src[cs]]
                    re = 1.0 if soft.real >= 0 else -1.0
                    im = 1.0 if soft.imag >= 0 else -1.0
                    cancel_val = std * (re + 1j * im) * inv_sqrt2
                else:
                    cancel_val = symbols[t, cs]
                raw = raw - gammas[st_sub[k]] * alphas[sym_src[cs]] * cancel_val
            coeff = gammas[st_sub[k]] * alphas[st_src[k]]
            soft = raw / coeff
            truth = symbols[t, st_sym[k]]
            delta = coeff * truth
            sp = delta.real * delta.real + delta.imag * delta.imag
            delta = raw - delta
            rp = delta.real * delta.real + delta.imag * delta.imag
            signal[k] = signal[k] + sp
            resid[k] = resid[k] + rp
            delta = soft - truth
            err = sqrt(delta.real * delta.real + delta.imag * delta.imag)
            if truth != 0:
                rel = err / sqrt(truth.real * truth.real + truth.imag * truth.imag)
            else:
                rel = err
            if rel > max_rel[k]:
                max_rel[k] = rel
            if qpsk:
                if ((soft.real >= 0) != (truth.real >= 0)) or (
                    (soft.imag >= 0) != (truth.imag >= 0)
                ):
                    hard[k] = hard[k] + 1

    return signal_np, resid_np, hard_np, max_rel_np
