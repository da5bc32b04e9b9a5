"""Bidirectional GRU encoder built on the sequence kernel."""

from __future__ import annotations

import numpy as np

from . import kernels
from .autodiff import Tensor, concat, flip_rows


def gru(x: Tensor, W: Tensor, U: Tensor, b: Tensor) -> Tensor:
    """Run the GRU recurrence over a (T, d) tensor; returns (T, h) states."""
    h = U.data.shape[0]
    h0 = np.zeros(h)
    H, cache = kernels.gru_forward(x.data, h0, W.data, U.data, b.data)
    out = Tensor(H, parents=(x, W, U, b))

    def backward(g):
        dx, dW, dU, db, _ = kernels.gru_backward(cache, g)
        if x.requires_grad:
            x._accum(dx)
        if W.requires_grad:
            W._accum(dW)
        if U.requires_grad:
            U._accum(dU)
        if b.requires_grad:
            b._accum(db)
    out.backward_fn = backward
    return out


class BiGRUEncoder:
    """Parameter namespace for a 1-layer bidirectional GRU.

    Output per token is the concatenation of the forward and backward
    hidden states (2h dimensions).
    """

    def __init__(self, prefix: str, d_in: int, hidden: int):
        self.prefix = prefix
        self.d_in = d_in
        self.hidden = hidden

    def param_names(self):
        return [f"{self.prefix}.{n}" for n in ("Wf", "Uf", "bf", "Wb", "Ub", "bb")]

    def init_params(self, params: dict, rng) -> None:
        d, h = self.d_in, self.hidden
        k = 1.0 / np.sqrt(h)
        p = self.prefix
        params[f"{p}.Wf"] = rng.uniform(-k, k, (d, 3 * h))
        params[f"{p}.Uf"] = rng.uniform(-k, k, (h, 3 * h))
        params[f"{p}.bf"] = np.zeros(3 * h)
        params[f"{p}.Wb"] = rng.uniform(-k, k, (d, 3 * h))
        params[f"{p}.Ub"] = rng.uniform(-k, k, (h, 3 * h))
        params[f"{p}.bb"] = np.zeros(3 * h)

    def __call__(self, P: dict, x: Tensor) -> Tensor:
        p = self.prefix
        hf = gru(x, P[f"{p}.Wf"], P[f"{p}.Uf"], P[f"{p}.bf"])
        hb = flip_rows(gru(flip_rows(x), P[f"{p}.Wb"], P[f"{p}.Ub"], P[f"{p}.bb"]))
        return concat([hf, hb], axis=1)
