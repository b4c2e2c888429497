from .checkpoint import Checkpoint, CheckpointError, checkpoint_hash, load_checkpoint, save_checkpoint
from .losses import GENERATOR_LOSS_MODES, LOG_EPS, MINIMAX, NON_SATURATING, batch_value, d_loss, g_loss
from .loop import (
    Trainer,
    TrainingConfig,
    TrainingDiverged,
    TrainingError,
    TrainingMetrics,
    fit,
    init_weights,
    resume,
    train_step,
)

__all__ = [
    "Checkpoint",
    "CheckpointError",
    "checkpoint_hash",
    "load_checkpoint",
    "save_checkpoint",
    "GENERATOR_LOSS_MODES",
    "LOG_EPS",
    "MINIMAX",
    "NON_SATURATING",
    "batch_value",
    "d_loss",
    "g_loss",
    "Trainer",
    "TrainingConfig",
    "TrainingDiverged",
    "TrainingError",
    "TrainingMetrics",
    "fit",
    "init_weights",
    "resume",
    "train_step",
]
