# -*- coding: utf-8 -*-
# vim: tabstop=8 expandtab shiftwidth=4 softtabstop=4

# This file is part of Pose Orbit library and tool.
# Pose Orbit is free software: you can
# redistribute it and/or modify it under the terms of the GNU General Public
# License as published by the Free Software Foundation, version 2.
#
# This program is distributed in the hope that it will be useful, but WITHOUT
# ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS
# FOR A PARTICULAR PURPOSE.  See the GNU General Public License for more
# details.
#
# You should have received a copy of the GNU General Public License along with
# this program; if not, write to the Free Software Foundation, Inc., 51
# Franklin Street, Fifth Floor, Boston, MA 02110-1301 USA.
#
# Copyright (c) Jari Turkia

import csv
import math
from typing import Dict, List, Optional, Sequence, TextIO, Tuple
import numpy as np
from ..dataset import Dataset
from ..errors import InvalidArgumentError, InsufficientDataError, TrainingDivergenceError, TrainingFailureError
from ..nn import Adam, AdamState, Checkpoint, CheckpointReader, CheckpointWriter, backward
from .model import VaeModel
import logging

log = logging.getLogger(__name__)


class TrainingConfig:
    DEFAULT_K = VaeModel.DEFAULT_K
    DEFAULT_HIDDEN = VaeModel.DEFAULT_HIDDEN
    DEFAULT_LR = Adam.DEFAULT_LR
    DEFAULT_BATCH = 64
    DEFAULT_EPOCHS = 200
    DEFAULT_RESTARTS = 3
    DEFAULT_BETA = VaeModel.DEFAULT_BETA

    def __init__(self, k: int = DEFAULT_K, encoder_hidden: Sequence[int] = DEFAULT_HIDDEN,
                 decoder_hidden: Sequence[int] = DEFAULT_HIDDEN, lr: float = DEFAULT_LR,
                 batch_size: int = DEFAULT_BATCH, epochs: int = DEFAULT_EPOCHS, restarts: int = DEFAULT_RESTARTS,
                 seed: int = 0, beta: float = DEFAULT_BETA):
        self._k = None
        self._encoder_hidden = None
        self._decoder_hidden = None
        self._lr = None
        self._batch_size = None
        self._epochs = None
        self._restarts = None
        self._beta = None

        self.k = k
        self.encoder_hidden = encoder_hidden
        self.decoder_hidden = decoder_hidden
        self.lr = lr
        self.batch_size = batch_size
        self.epochs = epochs
        self.restarts = restarts
        self.seed = int(seed)
        self.beta = beta

    @staticmethod
    def _check_count(what: str, value: int, minimum: int) -> int:
        if int(value) != value or value < minimum:
            raise InvalidArgumentError("Cannot set {} {}! Need an integer >= {}.".format(what, value, minimum))

        return int(value)

    @staticmethod
    def _check_widths(what: str, widths: Sequence[int]) -> Tuple[int, ...]:
        widths = tuple(widths)
        if not widths or any(int(w) != w or w < 1 for w in widths):
            raise InvalidArgumentError("Cannot set {} {}! Need at least one positive width.".format(what, widths))

        return tuple(int(w) for w in widths)

    @property
    def k(self) -> int:
        return self._k

    @k.setter
    def k(self, k: int) -> None:
        self._k = self._check_count("frequency count", k, 1)

    @property
    def encoder_hidden(self) -> Tuple[int, ...]:
        return self._encoder_hidden

    @encoder_hidden.setter
    def encoder_hidden(self, widths: Sequence[int]) -> None:
        self._encoder_hidden = self._check_widths("encoder widths", widths)

    @property
    def decoder_hidden(self) -> Tuple[int, ...]:
        return self._decoder_hidden

    @decoder_hidden.setter
    def decoder_hidden(self, widths: Sequence[int]) -> None:
        self._decoder_hidden = self._check_widths("decoder widths", widths)

    @property
    def lr(self) -> float:
        return self._lr

    @lr.setter
    def lr(self, lr: float) -> None:
        if not (lr > 0.0 and math.isfinite(lr)):
            raise InvalidArgumentError("Cannot set learning rate {}!".format(lr))
        self._lr = float(lr)

    @property
    def batch_size(self) -> int:
        return self._batch_size

    @batch_size.setter
    def batch_size(self, batch_size: int) -> None:
        self._batch_size = self._check_count("batch size", batch_size, 1)

    @property
    def epochs(self) -> int:
        return self._epochs

    @epochs.setter
    def epochs(self, epochs: int) -> None:
        self._epochs = self._check_count("epoch count", epochs, 0)

    @property
    def restarts(self) -> int:
        return self._restarts

    @restarts.setter
    def restarts(self, restarts: int) -> None:
        self._restarts = self._check_count("restart count", restarts, 1)

    @property
    def beta(self) -> float:
        return self._beta

    @beta.setter
    def beta(self, beta: float) -> None:
        if not (beta >= 0.0 and math.isfinite(beta)):
            raise InvalidArgumentError("Cannot set KL weight {}!".format(beta))
        self._beta = float(beta)

    def with_hidden(self, encoder_hidden: Sequence[int], decoder_hidden: Sequence[int]) -> 'TrainingConfig':
        return TrainingConfig(self.k, encoder_hidden, decoder_hidden, self.lr, self.batch_size, self.epochs,
                              self.restarts, self.seed, self.beta)

    def settings(self) -> Dict[str, str]:
        """
        Hyperparameters as checkpoint settings.
        """
        return {
            'lr': "{:.17g}".format(self.lr),
            'batch_size': str(self.batch_size),
            'epochs': str(self.epochs),
            'restarts': str(self.restarts),
            'training_seed': str(self.seed),
        }

    def __str__(self) -> str:
        return "K={} encoder {} decoder {} lr={:g} batch={} epochs={} restarts={} seed={} beta={:g}".format(
            self.k, list(self.encoder_hidden), list(self.decoder_hidden), self.lr, self.batch_size, self.epochs,
            self.restarts, self.seed, self.beta)


class EpochRecord:

    def __init__(self, epoch: int, train_loss: float, val_loss: float, val_bce: float, val_kl: float):
        self.epoch = epoch
        self.train_loss = train_loss
        self.val_loss = val_loss
        self.val_bce = val_bce
        self.val_kl = val_kl


class RestartHistory:
    """
    Loss curve of one restart. diverged_step is the optimizer step at which the loss
    or a gradient went non-finite, None for a completed run.
    """

    def __init__(self, restart: int, initial_val_loss: float, initial_val_bce: float):
        self.restart = restart
        self.initial_val_loss = initial_val_loss
        self.initial_val_bce = initial_val_bce
        self.records = []  # type: List[EpochRecord]
        self.diverged_step = None  # type: Optional[int]

    @property
    def diverged(self) -> bool:
        return self.diverged_step is not None

    @property
    def final_val_loss(self) -> float:
        if self.diverged:
            return math.inf
        if not self.records:
            return self.initial_val_loss

        return self.records[-1].val_loss

    def __len__(self) -> int:
        return len(self.records)


class TrainingHistory:
    HEADER = ['restart', 'epoch', 'train_loss', 'val_loss', 'val_bce', 'val_kl']

    def __init__(self, restarts: List[RestartHistory], selected: int):
        self.restarts = restarts
        self.selected = selected

    @property
    def best(self) -> RestartHistory:
        return self.restarts[self.selected]

    def __len__(self) -> int:
        return len(self.best)

    def write_csv(self, out: TextIO) -> None:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.HEADER)
        for restart in self.restarts:
            for rec in restart.records:
                writer.writerow([restart.restart, rec.epoch] + ["{:.10g}".format(value) for value in
                                                                (rec.train_loss, rec.val_loss, rec.val_bce,
                                                                 rec.val_kl)])

    def save_csv(self, path: str) -> None:
        with open(path, "w", newline="") as out:
            self.write_csv(out)


def validation_loss(model: VaeModel, pixels: np.ndarray) -> Tuple[float, float, float]:
    """
    Loss at the posterior mean pose.
    :return: tuple, mean loss, mean BCE, mean KL
    """
    loss_node, bce, kl = model.batch_loss(pixels, np.zeros(pixels.shape[0]))

    return float(loss_node.value), bce, kl


class TrainingState:
    """
    What a restart needs to continue: model, Adam moments and the last finished epoch.
    The model seed is the initialization seed of the restart, it also seeds the minibatch order
    and the reparametrization noise of every epoch.
    """
    MOMENT_PREFIXES = ("adam.m.", "adam.v.")

    def __init__(self, model: VaeModel, optimizer_state: AdamState, epoch: int = 0):
        if len(optimizer_state.m) != len(model.parameters()):
            raise InvalidArgumentError("Optimizer state has {} moments, model {} parameters!".format(
                len(optimizer_state.m), len(model.parameters())))
        self.model = model
        self.optimizer_state = optimizer_state
        self.epoch = int(epoch)

    @classmethod
    def fresh(cls, model: VaeModel) -> 'TrainingState':
        return cls(model, AdamState([p.shape for p in model.parameters()]))

    def to_checkpoint(self, extra_settings: Optional[Dict[str, str]] = None) -> Checkpoint:
        settings = dict(extra_settings) if extra_settings else {}
        settings['adam_step'] = str(self.optimizer_state.step)
        settings['epoch'] = str(self.epoch)
        checkpoint = self.model.to_checkpoint(settings)
        m_prefix, v_prefix = self.MOMENT_PREFIXES
        for p, m, v in zip(self.model.parameters(), self.optimizer_state.m, self.optimizer_state.v):
            checkpoint.tensors[m_prefix + p.name] = m
            checkpoint.tensors[v_prefix + p.name] = v

        return checkpoint

    @classmethod
    def from_checkpoint(cls, checkpoint: Checkpoint) -> 'TrainingState':
        model = VaeModel.from_checkpoint(checkpoint)
        m_prefix, v_prefix = cls.MOMENT_PREFIXES
        try:
            step = int(checkpoint.settings['adam_step'])
            epoch = int(checkpoint.settings['epoch'])
            m = [checkpoint.tensors[m_prefix + p.name] for p in model.parameters()]
            v = [checkpoint.tensors[v_prefix + p.name] for p in model.parameters()]
        except KeyError as exc:
            raise InvalidArgumentError("Checkpoint has no optimizer state, lacks {}!".format(exc))
        except ValueError as exc:
            raise InvalidArgumentError("Bad optimizer settings in checkpoint: {}!".format(exc))

        return cls(model, AdamState.restore(m, v, step), epoch)


def save_training_state(state: TrainingState, path: str,
                        extra_settings: Optional[Dict[str, str]] = None) -> TrainingState:
    """
    Write model and optimizer state as one checkpoint, load_model reads it as a plain model.
    :return: state as read back from the file
    """
    return TrainingState.from_checkpoint(CheckpointWriter(path).write(state.to_checkpoint(extra_settings)))


def load_training_state(path: str) -> TrainingState:
    return TrainingState.from_checkpoint(CheckpointReader(path).read())


def _epoch_rng(init_seed: int, epoch: int) -> np.random.Generator:
    return np.random.default_rng([init_seed, epoch])


def _train_restart(dataset: Dataset, config: TrainingConfig, restart: int,
                   state: TrainingState) -> RestartHistory:
    model = state.model
    if model.width != dataset.width:
        raise InvalidArgumentError("Model takes width {}, dataset has {}!".format(model.width, dataset.width))
    optimizer = Adam(model.parameters(), config.lr, state=state.optimizer_state)
    _, train_x = dataset.subset(dataset.train_indices())
    _, val_x = dataset.subset(dataset.validation_indices())

    initial_loss, initial_bce, _ = validation_loss(model, val_x)
    history = RestartHistory(restart, initial_loss, initial_bce)
    train_count = train_x.shape[0]

    try:
        for epoch in range(state.epoch + 1, config.epochs + 1):
            rng = _epoch_rng(model.seed, epoch)
            order = rng.permutation(train_count)
            total = 0.0
            for start in range(0, train_count, config.batch_size):
                batch = train_x[order[start:start + config.batch_size]]
                epsilon = rng.standard_normal(batch.shape[0])
                loss_node, _, _ = model.batch_loss(batch, epsilon)
                if not math.isfinite(float(loss_node.value)):
                    raise TrainingDivergenceError("Non-finite training loss", optimizer.state.step + 1)
                backward(loss_node)
                optimizer.step()
                total += float(loss_node.value) * batch.shape[0]

            val_loss, val_bce, val_kl = validation_loss(model, val_x)
            if not math.isfinite(val_loss):
                raise TrainingDivergenceError("Non-finite validation loss", optimizer.state.step)
            history.records.append(EpochRecord(epoch, total / train_count, val_loss, val_bce, val_kl))
            state.epoch = epoch
            log.debug("Restart {} epoch {}: train {:.5f} val {:.5f}".format(restart, epoch, total / train_count,
                                                                            val_loss))
    except TrainingDivergenceError as exc:
        log.warning("Restart {} diverged at step {}: {}".format(restart, exc.step, exc))
        history.diverged_step = exc.step
    state.optimizer_state = optimizer.state

    return history


def train_state(dataset: Dataset, config: Optional[TrainingConfig] = None,
                resume: Optional[TrainingState] = None) -> Tuple[TrainingState, TrainingHistory]:
    """
    Train config.restarts independently seeded models and keep the one with the lowest
    final validation loss. Ties go to the earlier restart.
    Restart i initializes its model from the i-th seed spawned off config.seed.
    :param dataset: images with a non-empty train and validation split
    :param config: hyperparameters, defaults if None
    :param resume: continue this single restart up to config.epochs instead of starting fresh
    :return: tuple, state of the selected restart and the history of every restart
    """
    if config is None:
        config = TrainingConfig()
    if dataset.validation_count == 0:
        raise InsufficientDataError("Dataset has no validation samples!")
    if dataset.validation_count >= dataset.count:
        raise InsufficientDataError("Dataset has no training samples!")

    if resume is not None:
        log.info("Resuming after epoch {} up to {}: {}".format(resume.epoch, config.epochs, config))
        states = [resume]
    else:
        log.info("Training {} restarts: {}".format(config.restarts, config))
        states = []
        for seed_seq in np.random.SeedSequence(config.seed).spawn(config.restarts):
            init_seed = int(seed_seq.generate_state(1, np.uint64)[0])
            states.append(TrainingState.fresh(VaeModel(dataset.width, config.k, config.encoder_hidden,
                                                       config.decoder_hidden, seed=init_seed, beta=config.beta,
                                                       domain_radius=dataset.raster.domain_radius)))
    histories = [_train_restart(dataset, config, restart, state) for restart, state in enumerate(states)]

    finals = [h.final_val_loss for h in histories]
    if all(h.diverged for h in histories):
        raise TrainingFailureError("All {} restarts diverged!".format(len(histories)))
    selected = int(np.argmin(finals))
    log.info("Selected restart {} with validation loss {:.5f}".format(selected, finals[selected]))

    return states[selected], TrainingHistory(histories, selected)


def train(dataset: Dataset, config: Optional[TrainingConfig] = None) -> Tuple[VaeModel, TrainingHistory]:
    """
    :return: tuple, selected model and the history of every restart
    """
    state, history = train_state(dataset, config)

    return state.model, history
