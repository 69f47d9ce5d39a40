"""Advantage actor-critic update with hand-derived gradients.

For each trajectory step t with discounted return R_t, policy pi_t and
value estimate V_t, the batch loss is

    sum_t [ -A_t * log pi_t[c_t] + c_v * (R_t - V_t)^2 - c_e * H(pi_t) ]

where A_t = R_t - V_t is treated as a constant in the policy term
(no gradient flows through the advantage), c_t is the chosen action and
H is the distribution entropy.  Optimization is plain SGD with global
gradient-norm clipping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NonFiniteLoss
from .model import (
    AgentParams,
    encode_batch,
    encode_batch_backward,
    flatten_arrays,
    softmax,
    zero_grads,
)


@dataclass(frozen=True)
class TrainConfig:
    gamma: float = 0.9
    learning_rate: float = 1e-3
    value_coef: float = 0.5
    entropy_coef: float = 0.01
    grad_clip: float = 5.0

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must be in [0, 1]")
        for name in ("learning_rate", "value_coef", "entropy_coef", "grad_clip"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class StepRecord:
    """One environment transition, stored as token ids.

    action_ids holds the encodings of every admissible command at that
    step; chosen indexes into it.
    """
    obs_ids: tuple
    inv_ids: tuple
    room_ids: tuple
    action_ids: tuple
    chosen: int
    reward: float
    value: float = 0.0


@dataclass(frozen=True)
class Trajectory:
    steps: tuple
    # Value of the state after the last step, frozen at collection time.
    # Zero for episodes that terminated; the critic's estimate when the
    # step cap truncated the run.
    bootstrap: float = 0.0
    game_id: str = ""


@dataclass(frozen=True)
class LossReport:
    policy: float
    value: float
    entropy: float
    total: float
    grad_norm: float = 0.0
    step_count: int = 0


def compute_returns(traj: Trajectory, gamma: float) -> np.ndarray:
    """Discounted returns, bootstrapped from the stored terminal value."""
    out = np.zeros(len(traj.steps))
    acc = traj.bootstrap
    for t in range(len(traj.steps) - 1, -1, -1):
        acc = traj.steps[t].reward + gamma * acc
        out[t] = acc
    return out


@dataclass
class _Forward:
    """Per-trajectory forward pass retained for the backward sweep."""
    obs: tuple
    inv: tuple
    room: tuple
    act: tuple
    g_all: np.ndarray
    slices: list
    state: np.ndarray
    q: np.ndarray
    pis: list
    values: np.ndarray
    returns: np.ndarray
    caches: dict = field(default_factory=dict)


def _trajectory_forward(params: AgentParams, traj: Trajectory,
                        gamma: float) -> _Forward:
    steps = traj.steps
    obs_h, obs_c = encode_batch(params, "observation", [s.obs_ids for s in steps])
    inv_h, inv_c = encode_batch(params, "inventory", [s.inv_ids for s in steps])
    room_h, room_c = encode_batch(params, "room", [s.room_ids for s in steps])
    flat = [seq for s in steps for seq in s.action_ids]
    g_all, act_c = encode_batch(params, "action", flat)
    slices, start = [], 0
    gbar = np.zeros((len(steps), params.d_hidden))
    for t, s in enumerate(steps):
        stop = start + len(s.action_ids)
        slices.append(slice(start, stop))
        gbar[t] = g_all[start:stop].mean(axis=0)
        start = stop
    state = np.concatenate([obs_h, inv_h, room_h, gbar], axis=1)
    q = state @ params.arrays["W_score"].T
    pis = [softmax(g_all[slices[t]] @ q[t]) for t in range(len(steps))]
    values = state @ params.arrays["w_value"] + params.arrays["b_value"][0]
    return _Forward(
        obs=(obs_h, obs_c), inv=(inv_h, inv_c), room=(room_h, room_c),
        act=(g_all, act_c), g_all=g_all, slices=slices, state=state,
        q=q, pis=pis, values=values, returns=compute_returns(traj, gamma),
    )


def _safe_log(pi: np.ndarray) -> np.ndarray:
    return np.log(np.maximum(pi, 1e-300))


def compute_advantages(params: AgentParams, batch, config: TrainConfig):
    """A_t = R_t - V_t at the current parameters, one array per trajectory."""
    out = []
    for traj in batch:
        if not traj.steps:
            out.append(np.zeros(0))
            continue
        fwd = _trajectory_forward(params, traj, config.gamma)
        out.append(fwd.returns - fwd.values)
    return out


def _loss_terms(fwd: _Forward, traj: Trajectory, adv: np.ndarray,
                config: TrainConfig):
    policy = 0.0
    entropy = 0.0
    for t, step in enumerate(traj.steps):
        logpi = _safe_log(fwd.pis[t])
        policy -= adv[t] * logpi[step.chosen]
        entropy -= float(fwd.pis[t] @ logpi)
    value = config.value_coef * float(np.sum((fwd.returns - fwd.values) ** 2))
    return policy, value, entropy


def batch_loss(params: AgentParams, batch, config: TrainConfig,
               advantages) -> float:
    """Total loss with the advantages held fixed (forward pass only)."""
    total = 0.0
    for traj, adv in zip(batch, advantages):
        if not traj.steps:
            continue
        fwd = _trajectory_forward(params, traj, config.gamma)
        policy, value, entropy = _loss_terms(fwd, traj, adv, config)
        total += policy + value - config.entropy_coef * entropy
    return total


def loss_and_grads(params: AgentParams, batch, config: TrainConfig,
                   advantages=None):
    """Loss report plus gradients for every parameter array.

    When advantages is None it is computed from the current parameters;
    pass it explicitly to evaluate the same fixed-advantage objective
    that finite differencing uses.
    """
    if advantages is None:
        advantages = compute_advantages(params, batch, config)
    grads = zero_grads(params)
    policy_sum = value_sum = entropy_sum = 0.0
    step_count = 0
    for traj, adv in zip(batch, advantages):
        if not traj.steps:
            continue
        step_count += len(traj.steps)
        fwd = _trajectory_forward(params, traj, config.gamma)
        policy, value, entropy = _loss_terms(fwd, traj, adv, config)
        policy_sum += policy
        value_sum += value
        entropy_sum += entropy

        d_q = np.zeros_like(fwd.q)
        d_g = np.zeros_like(fwd.g_all)
        d_hidden = params.d_hidden

        for t, step in enumerate(traj.steps):
            pi = fwd.pis[t]
            logpi = _safe_log(pi)
            ent = -float(pi @ logpi)
            # policy: -A log pi[c];  entropy bonus: -c_e H
            d_z = adv[t] * pi.copy()
            d_z[step.chosen] -= adv[t]
            d_z += config.entropy_coef * pi * (logpi + ent)
            sl = fwd.slices[t]
            d_q[t] = d_z @ fwd.g_all[sl]
            d_g[sl] += np.outer(d_z, fwd.q[t])

        # value head: d/dV of c_v (R - V)^2
        d_v = -2.0 * config.value_coef * (fwd.returns - fwd.values)
        grads["w_value"] += fwd.state.T @ d_v
        grads["b_value"][0] += d_v.sum()
        grads["W_score"] += d_q.T @ fwd.state

        d_state = np.outer(d_v, params.arrays["w_value"])
        d_state += d_q @ params.arrays["W_score"]
        for t, step in enumerate(traj.steps):
            # mean-pooled action summary is the last quarter of the state
            d_g[fwd.slices[t]] += d_state[t, 3 * d_hidden:] / len(step.action_ids)

        encode_batch_backward(d_state[:, :d_hidden], fwd.obs[1], grads)
        encode_batch_backward(d_state[:, d_hidden:2 * d_hidden], fwd.inv[1], grads)
        encode_batch_backward(d_state[:, 2 * d_hidden:3 * d_hidden], fwd.room[1], grads)
        encode_batch_backward(d_g, fwd.act[1], grads)

    total = policy_sum + value_sum - config.entropy_coef * entropy_sum
    report = LossReport(
        policy=float(policy_sum), value=float(value_sum),
        entropy=float(entropy_sum), total=float(total), step_count=step_count,
    )
    return report, grads


def clip_gradients(grads: dict, max_norm: float) -> float:
    """Scale all gradients in place to a global norm cap; returns the norm."""
    total = 0.0
    for arr in grads.values():
        total += float(np.sum(arr * arr))
    norm = float(np.sqrt(total))
    if max_norm > 0 and norm > max_norm:
        scale = max_norm / norm
        for arr in grads.values():
            arr *= scale
    return norm


def a2c_update(params: AgentParams, batch, config: TrainConfig | None = None):
    """One SGD step over a batch of trajectories.

    Returns (new_params, LossReport); the input parameters are untouched.
    """
    config = config or TrainConfig()
    report, grads = loss_and_grads(params, batch, config)
    if not np.isfinite(report.total):
        raise NonFiniteLoss(f"loss is not finite: {report.total}")
    norm = clip_gradients(grads, config.grad_clip)
    if not np.isfinite(norm):
        raise NonFiniteLoss(f"gradient norm is not finite: {norm}")
    new = params.copy()
    for name, arr in new.arrays.items():
        arr -= config.learning_rate * grads[name]
    report = LossReport(
        policy=report.policy, value=report.value, entropy=report.entropy,
        total=report.total, grad_norm=norm, step_count=report.step_count,
    )
    return new, report


def gradient_norm(grads: dict) -> float:
    flat = flatten_arrays(grads)
    return float(np.sqrt(flat @ flat))
