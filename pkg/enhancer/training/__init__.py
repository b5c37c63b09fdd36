from enhancer.training.checkpoint import TrainingState, load_checkpoint, save_checkpoint
from enhancer.training.config import TrainConfig
from enhancer.training.optim import Adam, AdamState, adam_step
from enhancer.training.trainer import (
    FINAL_NAME,
    LOG_COLUMNS,
    LOG_NAME,
    StepLog,
    Trainer,
    TrainResult,
    prepare_training_frames,
    train,
)
