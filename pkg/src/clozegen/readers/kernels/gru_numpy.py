"""Pure-numpy GRU sequence kernel (reference implementation).

Gate layout packs z, r, c column blocks into single weight matrices:
``W`` is (d_in, 3h), ``U`` is (h, 3h), ``b`` is (3h,). The recurrence is

    z_t = sigmoid(x_t Wz + h_{t-1} Uz + bz)
    r_t = sigmoid(x_t Wr + h_{t-1} Ur + br)
    c_t = tanh(x_t Wc + (r_t * h_{t-1}) Uc + bc)
    h_t = (1 - z_t) * h_{t-1} + z_t * c_t
"""

import numpy as np


def gru_forward(x, h0, W, U, b):
    x = np.ascontiguousarray(x, dtype=np.float64)
    T, d = x.shape
    h = h0.shape[0]
    H = np.empty((T, h))
    Z = np.empty((T, h))
    R = np.empty((T, h))
    C = np.empty((T, h))
    hprev = h0
    Wzr, Wc = W[:, :2 * h], W[:, 2 * h:]
    Uzr, Uc = U[:, :2 * h], U[:, 2 * h:]
    for t in range(T):
        pre = x[t] @ Wzr + hprev @ Uzr + b[:2 * h]
        zr = 1.0 / (1.0 + np.exp(-pre))
        z, r = zr[:h], zr[h:]
        c = np.tanh(x[t] @ Wc + (r * hprev) @ Uc + b[2 * h:])
        hprev = (1.0 - z) * hprev + z * c
        Z[t], R[t], C[t], H[t] = z, r, c, hprev
    cache = (x, np.asarray(h0, dtype=np.float64), H, Z, R, C, W, U)
    return H, cache


def gru_backward(cache, dH, dh_last=None):
    x, h0, H, Z, R, C, W, U = cache
    T, d = x.shape
    h = h0.shape[0]
    Wz, Wr, Wc = W[:, :h], W[:, h:2 * h], W[:, 2 * h:]
    Uz, Ur, Uc = U[:, :h], U[:, h:2 * h], U[:, 2 * h:]
    dx = np.zeros_like(x)
    dW = np.zeros_like(W)
    dU = np.zeros_like(U)
    db = np.zeros(3 * h)
    carry = np.zeros(h) if dh_last is None else dh_last.copy()
    for t in range(T - 1, -1, -1):
        dh = dH[t] + carry
        hprev = H[t - 1] if t > 0 else h0
        z, r, c = Z[t], R[t], C[t]
        dz = dh * (c - hprev)
        dc = dh * z
        dhprev = dh * (1.0 - z)
        dc_pre = dc * (1.0 - c * c)
        dz_pre = dz * z * (1.0 - z)
        dq = dc_pre @ Uc.T          # q = r * hprev
        dr = dq * hprev
        dhprev += dq * r
        dr_pre = dr * r * (1.0 - r)
        dx[t] = dz_pre @ Wz.T + dr_pre @ Wr.T + dc_pre @ Wc.T
        dhprev += dz_pre @ Uz.T + dr_pre @ Ur.T
        dW[:, :h] += np.outer(x[t], dz_pre)
        dW[:, h:2 * h] += np.outer(x[t], dr_pre)
        dW[:, 2 * h:] += np.outer(x[t], dc_pre)
        dU[:, :h] += np.outer(hprev, dz_pre)
        dU[:, h:2 * h] += np.outer(hprev, dr_pre)
        dU[:, 2 * h:] += np.outer(r * hprev, dc_pre)
        db[:h] += dz_pre
        db[h:2 * h] += dr_pre
        db[2 * h:] += dc_pre
        carry = dhprev
    return dx, dW, dU, db, carry
