# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled GRU sequence kernel; mirrors gru_numpy exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, tanh


def gru_forward(x, h0, W, U, b):
    x = np.ascontiguousarray(x, dtype=np.float64)
    W = np.ascontiguousarray(W, dtype=np.float64)
    U = np.ascontiguousarray(U, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    h0 = np.ascontiguousarray(h0, dtype=np.float64)
    cdef Py_ssize_t T = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t h = h0.shape[0]

    H_arr = np.empty((T, h))
    Z_arr = np.empty((T, h))
    R_arr = np.empty((T, h))
    C_arr = np.empty((T, h))
    hp_arr = np.array(h0, copy=True)

    cdef double[:, ::1] xv = x
    cdef double[:, ::1] Wv = W
    cdef double[:, ::1] Uv = U
    cdef double[::1] bv = b
    cdef double[:, ::1] Hv = H_arr
    cdef double[:, ::1] Zv = Z_arr
    cdef double[:, ::1] Rv = R_arr
    cdef double[:, ::1] Cv = C_arr
    cdef double[::1] hprev = hp_arr

    cdef Py_ssize_t t, j, k
    cdef double acc_z, acc_r, acc_c, z, r, c
    rh_arr = np.empty(h)
    cdef double[::1] rh = rh_arr

    for t in range(T):
        for j in range(h):
            acc_z = bv[j]
            acc_r = bv[h + j]
            for k in range(d):
                acc_z += xv[t, k] * Wv[k, j]
                acc_r += xv[t, k] * Wv[k, h + j]
            for k in range(h):
                acc_z += hprev[k] * Uv[k, j]
                acc_r += hprev[k] * Uv[k, h + j]
            Zv[t, j] = 1.0 / (1.0 + exp(-acc_z))
            Rv[t, j] = 1.0 / (1.0 + exp(-acc_r))
        for j in range(h):
            rh[j] = Rv[t, j] * hprev[j]
        for j in range(h):
            acc_c = bv[2 * h + j]
            for k in range(d):
                acc_c += xv[t, k] * Wv[k, 2 * h + j]
            for k in range(h):
                acc_c += rh[k] * Uv[k, 2 * h + j]
            Cv[t, j] = tanh(acc_c)
        for j in range(h):
            z = Zv[t, j]
            hprev[j] = (1.0 - z) * hprev[j] + z * Cv[t, j]
            Hv[t, j] = hprev[j]

    cache = (x, np.asarray(h0, dtype=np.float64), H_arr, Z_arr, R_arr, C_arr, W, U)
    return H_arr, cache


def gru_backward(cache, dH, dh_last=None):
    x, h0, H, Z, R, C, W, U = cache
    dH = np.ascontiguousarray(dH, dtype=np.float64)
    cdef Py_ssize_t T = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t h = h0.shape[0]

    dx_arr = np.zeros((T, d))
    dW_arr = np.zeros((d, 3 * h))
    dU_arr = np.zeros((h, 3 * h))
    db_arr = np.zeros(3 * h)
    carry_arr = np.zeros(h) if dh_last is None else np.array(dh_last, dtype=np.float64)

    cdef double[:, ::1] xv = x
    cdef double[::1] h0v = h0
    cdef double[:, ::1] Hv = H
    cdef double[:, ::1] Zv = Z
    cdef double[:, ::1] Rv = R
    cdef double[:, ::1] Cv = C
    cdef double[:, ::1] Wv = W
    cdef double[:, ::1] Uv = U
    cdef double[:, ::1] dHv = dH
    cdef double[:, ::1] dxv = dx_arr
    cdef double[:, ::1] dWv = dW_arr
    cdef double[:, ::1] dUv = dU_arr
    cdef double[::1] dbv = db_arr
    cdef double[::1] carry = carry_arr

    tmp = np.empty((5, h))
    cdef double[:, ::1] tv = tmp  # rows: dz_pre, dr_pre, dc_pre, dhprev, hprev

    cdef Py_ssize_t t, j, k
    cdef double dh, z, r, c, hp, dq, acc

    for t in range(T - 1, -1, -1):
        for j in range(h):
            hp = Hv[t - 1, j] if t > 0 else h0v[j]
            tv[4, j] = hp
            dh = dHv[t, j] + carry[j]
            z = Zv[t, j]
            c = Cv[t, j]
            tv[0, j] = dh * (c - hp) * z * (1.0 - z)          # dz_pre
            tv[2, j] = dh * z * (1.0 - c * c)                  # dc_pre
            tv[3, j] = dh * (1.0 - z)                          # dhprev
        for j in range(h):
            dq = 0.0
            for k in range(h):
                dq += tv[2, k] * Uv[j, 2 * h + k]
            r = Rv[t, j]
            tv[1, j] = dq * tv[4, j] * r * (1.0 - r)           # dr_pre
            tv[3, j] += dq * r
        for j in range(d):
            acc = 0.0
            for k in range(h):
                acc += tv[0, k] * Wv[j, k] + tv[1, k] * Wv[j, h + k] \
                    + tv[2, k] * Wv[j, 2 * h + k]
            dxv[t, j] = acc
        for j in range(h):
            acc = 0.0
            for k in range(h):
                acc += tv[0, k] * Uv[j, k] + tv[1, k] * Uv[j, h + k]
            tv[3, j] += acc
        for j in range(d):
            for k in range(h):
                dWv[j, k] += xv[t, j] * tv[0, k]
                dWv[j, h + k] += xv[t, j] * tv[1, k]
                dWv[j, 2 * h + k] += xv[t, j] * tv[2, k]
        for j in range(h):
            hp = tv[4, j]
            r = Rv[t, j]
            for k in range(h):
                dUv[j, k] += hp * tv[0, k]
                dUv[j, h + k] += hp * tv[1, k]
                dUv[j, 2 * h + k] += r * hp * tv[2, k]
        for j in range(h):
            dbv[j] += tv[0, j]
            dbv[h + j] += tv[1, j]
            dbv[2 * h + j] += tv[2, j]
            carry[j] = tv[3, j]

    return dx_arr, dW_arr, dU_arr, db_arr, carry_arr
