"""Training loop, early stopping and pre-train / fine-tune orchestration."""

from sdds_lab.training.early_stopping import EarlyStopping
from sdds_lab.training.trainer import train
from sdds_lab.training.transfer_pipeline import pretrain_then_finetune

__all__ = ["EarlyStopping", "pretrain_then_finetune", "train"]
