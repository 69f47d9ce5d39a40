"""Gated recurrent unit with explicit forward and backward passes.

Update rule (per timestep, h0 = 0):

    z_t = sigmoid(Wz x_t + Uz h_{t-1} + bz)
    r_t = sigmoid(Wr x_t + Ur h_{t-1} + br)
    c_t = tanh(Wh x_t + Uh (r_t * h_{t-1}) + bh)
    h_t = (1 - z_t) * h_{t-1} + z_t * c_t

Sequences in a batch are padded on the right; a mask of 0 carries the
previous hidden state through unchanged, so the final row equals the
hidden state at each sequence's true last token.
"""

from __future__ import annotations

import numpy as np

WEIGHT_KEYS = ("Wz", "Wr", "Wh", "Uz", "Ur", "Uh", "bz", "br", "bh")


def init_weights(d_emb: int, d_hidden: int, rng: np.random.Generator) -> dict:
    scale_in = 1.0 / np.sqrt(d_emb)
    scale_rec = 1.0 / np.sqrt(d_hidden)
    w = {}
    for key in ("Wz", "Wr", "Wh"):
        w[key] = rng.uniform(-scale_in, scale_in, size=(d_hidden, d_emb))
    for key in ("Uz", "Ur", "Uh"):
        w[key] = rng.uniform(-scale_rec, scale_rec, size=(d_hidden, d_hidden))
    for key in ("bz", "br", "bh"):
        w[key] = np.zeros(d_hidden)
    return w


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def forward(x: np.ndarray, mask: np.ndarray, weights: dict):
    """Run the recurrence over a padded batch.

    x: (B, L, E) embedded tokens; mask: (B, L) with 1 for real tokens.
    Returns (h_final (B, H), cache for `backward`).
    """
    batch, length, _ = x.shape
    d_hidden = weights["bz"].shape[0]
    h = np.zeros((batch, d_hidden), dtype=x.dtype)
    steps = []
    for t in range(length):
        xt = x[:, t, :]
        m = mask[:, t:t + 1]
        z = _sigmoid(xt @ weights["Wz"].T + h @ weights["Uz"].T + weights["bz"])
        r = _sigmoid(xt @ weights["Wr"].T + h @ weights["Ur"].T + weights["br"])
        rh = r * h
        c = np.tanh(xt @ weights["Wh"].T + rh @ weights["Uh"].T + weights["bh"])
        h_new = (1.0 - z) * h + z * c
        steps.append((xt, h, z, r, c, m))
        h = m * h_new + (1.0 - m) * h
    return h, (steps, weights, x.shape)


def backward(dh_final: np.ndarray, cache):
    """Propagate a gradient on the final hidden state back through time.

    Returns (weight grads keyed like WEIGHT_KEYS, dx (B, L, E)).
    """
    steps, weights, x_shape = cache
    grads = {k: np.zeros_like(weights[k]) for k in WEIGHT_KEYS}
    dx = np.zeros(x_shape, dtype=dh_final.dtype)
    dh = dh_final.copy()
    for t in range(len(steps) - 1, -1, -1):
        xt, h_prev, z, r, c, m = steps[t]
        dh_step = dh * m
        dh = dh * (1.0 - m)

        dc = dh_step * z
        dz = dh_step * (c - h_prev)
        dh_prev = dh_step * (1.0 - z)

        da_c = dc * (1.0 - c * c)
        grads["Wh"] += da_c.T @ xt
        grads["Uh"] += da_c.T @ (r * h_prev)
        grads["bh"] += da_c.sum(axis=0)
        drh = da_c @ weights["Uh"]
        dr = drh * h_prev
        dh_prev += drh * r

        da_z = dz * z * (1.0 - z)
        grads["Wz"] += da_z.T @ xt
        grads["Uz"] += da_z.T @ h_prev
        grads["bz"] += da_z.sum(axis=0)
        dh_prev += da_z @ weights["Uz"]

        da_r = dr * r * (1.0 - r)
        grads["Wr"] += da_r.T @ xt
        grads["Ur"] += da_r.T @ h_prev
        grads["br"] += da_r.sum(axis=0)
        dh_prev += da_r @ weights["Ur"]

        dx[:, t, :] = da_z @ weights["Wz"] + da_r @ weights["Wr"] + da_c @ weights["Wh"]
        dh += dh_prev
    return grads, dx
