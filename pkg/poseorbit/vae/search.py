import math
from typing import List, Optional, Sequence, Tuple
from ..dataset import Dataset
from ..errors import InvalidArgumentError, TrainingFailureError
from .model import VaeModel
from .trainer import TrainingConfig, TrainingHistory, train
import logging

log = logging.getLogger(__name__)

DEFAULT_DEPTHS = (2, 3)
DEFAULT_WIDTHS = (64, 128)


class SearchTrial:

    def __init__(self, config: TrainingConfig, val_loss: float):
        self.config = config
        self.val_loss = val_loss

    @property
    def failed(self) -> bool:
        return math.isinf(self.val_loss)


class SearchResult:

    def __init__(self, trials: List[SearchTrial], selected: int, model: VaeModel, history: TrainingHistory):
        self.trials = trials
        self.selected = selected
        self.model = model
        self.history = history

    @property
    def config(self) -> TrainingConfig:
        return self.trials[self.selected].config


def hyperparameter_search(dataset: Dataset, base: Optional[TrainingConfig] = None,
                          depths: Sequence[int] = DEFAULT_DEPTHS,
                          widths: Sequence[int] = DEFAULT_WIDTHS) -> SearchResult:
    """
    Train every (depth, width) combination, same architecture for encoder and decoder,
    and keep the run with the best validation loss. Trials run depth-major in the given order,
    ties go to the earlier trial.
    """
    if base is None:
        base = TrainingConfig()
    if not depths or not widths:
        raise InvalidArgumentError("Search grid is empty!")

    trials = []  # type: List[SearchTrial]
    best = None  # type: Optional[Tuple[int, VaeModel, TrainingHistory]]
    for depth in depths:
        for width in widths:
            hidden = (int(width),) * int(depth)
            config = base.with_hidden(hidden, hidden)
            try:
                model, history = train(dataset, config)
            except TrainingFailureError as exc:
                log.warning("Trial depth {} width {} failed: {}".format(depth, width, exc))
                trials.append(SearchTrial(config, math.inf))
                continue

            trials.append(SearchTrial(config, history.best.final_val_loss))
            log.info("Trial depth {} width {}: validation loss {:.5f}".format(depth, width, trials[-1].val_loss))
            if best is None or trials[-1].val_loss < trials[best[0]].val_loss:
                best = (len(trials) - 1, model, history)

    if best is None:
        raise TrainingFailureError("Every search trial diverged!")

    return SearchResult(trials, best[0], best[1], best[2])
