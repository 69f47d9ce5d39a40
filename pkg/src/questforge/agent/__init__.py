"""Recurrent actor-critic over text observations, differentiated by hand.

Four gated-recurrent encoders read the observation channels (feedback,
inventory, room, admissible actions); their concatenation is scored against
each admissible action's encoding and fed to a value head.  All gradients
come from explicit backward passes so they can be verified against finite
differences.
"""

from .vocab import Vocab, tokenize
from .model import (
    AgentParams,
    CHANNELS,
    init_params,
    load_params,
    param_count,
    policy_forward,
    random_policy,
    save_params,
    select_action,
)
from .a2c import LossReport, StepRecord, TrainConfig, Trajectory, a2c_update
from .optim import Adam, Sgd, make_optimizer
from .gradcheck import gradient_check

__all__ = [
    "Adam",
    "AgentParams",
    "CHANNELS",
    "Sgd",
    "LossReport",
    "StepRecord",
    "TrainConfig",
    "Trajectory",
    "Vocab",
    "a2c_update",
    "gradient_check",
    "init_params",
    "load_params",
    "make_optimizer",
    "param_count",
    "policy_forward",
    "random_policy",
    "save_params",
    "select_action",
    "tokenize",
]
