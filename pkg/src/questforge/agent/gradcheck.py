"""Finite-difference verification of the hand-derived gradients."""

from __future__ import annotations

import numpy as np

from .a2c import TrainConfig, batch_loss, compute_advantages, loss_and_grads
from .model import AgentParams, assign_flat, flatten_arrays


def gradient_check(params: AgentParams, batch, config: TrainConfig | None = None,
                   epsilon: float = 1e-5, max_coords: int | None = None,
                   seed: int = 0) -> float:
    """Max relative error between analytic and central-difference gradients.

    Advantages are computed once at the incoming parameters and held fixed,
    matching the stop-gradient in the analytic policy term.  Checks every
    coordinate unless max_coords caps it, in which case a seeded subset is
    drawn.  The caller's parameters are never modified.
    """
    if not any(traj.steps for traj in batch):
        raise ValueError("gradient check requires at least one recorded step")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    config = config or TrainConfig()

    advantages = compute_advantages(params, batch, config)
    _, grads = loss_and_grads(params, batch, config, advantages=advantages)
    analytic = flatten_arrays(grads)

    work = params.copy()
    base = flatten_arrays(work.arrays)
    total = base.size
    if max_coords is not None and max_coords < total:
        rng = np.random.default_rng(seed)
        coords = rng.choice(total, size=max_coords, replace=False)
    else:
        coords = np.arange(total)

    worst = 0.0
    for i in coords:
        saved = base[i]
        base[i] = saved + epsilon
        assign_flat(work.arrays, base)
        loss_plus = batch_loss(work, batch, config, advantages)
        base[i] = saved - epsilon
        assign_flat(work.arrays, base)
        loss_minus = batch_loss(work, batch, config, advantages)
        base[i] = saved
        numeric = (loss_plus - loss_minus) / (2.0 * epsilon)
        denom = max(abs(analytic[i]) + abs(numeric), 1e-4)
        worst = max(worst, abs(analytic[i] - numeric) / denom)
    return float(worst)
