from .a2c import (
    Adam,
    Hyperparams,
    SGD,
    TrainResult,
    TrajectoryStep,
    advantages,
    build_nets,
    critic_loss,
    discounted_returns,
    epsilon_at,
    play_episode,
    policy_loss,
    sample_action,
    train_run,
)
from .gradcheck import gradient_check
from .transformer import TransformerConfig, TransformerNet, load_checkpoint, save_checkpoint

__all__ = [
    "Adam",
    "Hyperparams",
    "SGD",
    "TrainResult",
    "TrajectoryStep",
    "TransformerConfig",
    "TransformerNet",
    "advantages",
    "build_nets",
    "critic_loss",
    "discounted_returns",
    "epsilon_at",
    "gradient_check",
    "load_checkpoint",
    "play_episode",
    "policy_loss",
    "sample_action",
    "save_checkpoint",
    "train_run",
]
