"""Early stopping on the validation loss."""

import logging
import math
from typing import Optional

import numpy as np

from sdds_lab.models import EarlyStoppingConfig, ModelState

logger = logging.getLogger(__name__)


class EarlyStopping:
    """Patience-based stopping with a snapshot of the best weights.

    The snapshot follows the lowest loss seen. The patience counter only
    resets when the loss beats the last reset point by more than
    ``min_delta``.

    Examples:
        >>> stopper = EarlyStopping(EarlyStoppingConfig(patience=2, min_delta=0.0))
        >>> [stopper.update(epoch, loss) for epoch, loss in enumerate([1.0, 0.9, 0.91, 0.92], 1)]
        [False, False, False, True]
        >>> stopper.best_epoch, stopper.best_value
        (2, 0.9)
    """

    def __init__(self, config: EarlyStoppingConfig):
        self.config = config
        self.best_value = math.inf
        self.best_epoch = 0
        self.snapshot: Optional[dict[str, np.ndarray]] = None
        self._reference = math.inf
        self._wait = 0

    @property
    def wait(self) -> int:
        return self._wait

    def update(self, epoch: int, value: float, state: Optional[ModelState] = None) -> bool:
        """Record the loss of ``epoch``; True when training should stop."""
        if value < self.best_value:
            self.best_value = value
            self.best_epoch = epoch
            if state is not None and self.config.restore_best:
                self.snapshot = state.snapshot()
        if value < self._reference - self.config.min_delta:
            self._reference = value
            self._wait = 0
        else:
            self._wait += 1
        if not self.config.enabled:
            return False
        if self._wait >= self.config.patience:
            logger.info(
                f"Early stopping at epoch {epoch}: best val_loss {self.best_value:.6f} "
                f"at epoch {self.best_epoch}"
            )
            return True
        return False
