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

import math
from typing import Dict, List, Optional, Sequence, Tuple, Union
import numpy as np
from ..geometry import Image1D, Rotation, canonical_angle, TWO_PI
from ..errors import InvalidArgumentError, NumericError
from ..nn import Node, Mlp, Checkpoint, CheckpointReader, CheckpointWriter, ops
from .irrep import IrrepEmbedding, rotate_content
import logging

log = logging.getLogger(__name__)


class EncoderOutput:
    """
    Posterior over the pose of one image: mean rotation mu and log variance on the Lie algebra.
    """

    def __init__(self, mean_vector: Tuple[float, float], mu: float, log_var: float):
        u1, u2 = float(mean_vector[0]), float(mean_vector[1])
        if not (math.isfinite(u1) and math.isfinite(u2)) or math.hypot(u1, u2) == 0.0:
            raise InvalidArgumentError("Mean vector ({}, {}) has no direction!".format(u1, u2))
        self.mean_vector = (u1, u2)
        self.mu = canonical_angle(mu)
        self.log_var = float(log_var)

    @property
    def variance(self) -> float:
        return math.exp(self.log_var)

    @property
    def rotation(self) -> Rotation:
        return Rotation.from_angle(self.mu)

    def __str__(self) -> str:
        return "mu={:.4f} deg log_var={:.4f}".format(math.degrees(self.mu), self.log_var)


class VaeModel:
    """
    SO(2) geometric VAE.
    Encoder: image -> (u1, u2, log_var), pose mu = atan2(u2, u1).
    Decoder: image logits from T(theta) c, where c is a learned content vector
    and T the direct sum of irreducible representations at frequencies 1..K.
    """
    DEFAULT_K = 4
    DEFAULT_HIDDEN = (128, 128)
    DEFAULT_BETA = 1.0
    LOG_VAR_MIN = -9.0
    LOG_VAR_MAX = 2.0
    # KL of the algebra Gaussian against the uniform circle is KL_OFFSET - log_var / 2
    KL_OFFSET = 0.5 * math.log(TWO_PI) - 0.5

    def __init__(self, width: int, k: int = DEFAULT_K, encoder_hidden: Sequence[int] = DEFAULT_HIDDEN,
                 decoder_hidden: Sequence[int] = DEFAULT_HIDDEN, seed: int = 0, beta: float = DEFAULT_BETA,
                 domain_radius: float = 1.0):
        """
        :param seed: initialization seed, the same seed gives the same initial weights
        """
        if int(width) != width or width < 2:
            raise InvalidArgumentError("Image width must be an integer >= 2, got {}!".format(width))
        if int(k) != k or k < 1:
            raise InvalidArgumentError("Need K >= 1 frequencies, got {}!".format(k))
        if not beta >= 0.0:
            raise InvalidArgumentError("KL weight must be >= 0, got {}!".format(beta))
        rng = np.random.default_rng(seed)

        self.width = int(width)
        self.k = int(k)
        self.encoder_hidden = tuple(int(h) for h in encoder_hidden)
        self.decoder_hidden = tuple(int(h) for h in decoder_hidden)
        self.seed = int(seed)
        self.beta = float(beta)
        self.domain_radius = float(domain_radius)

        self.encoder = Mlp([self.width] + list(self.encoder_hidden) + [3], "linear", rng, name="encoder")
        self.content = Node(rng.normal(0.0, 1.0, size=2 * self.k), name="content")
        self.decoder = Mlp([2 * self.k] + list(self.decoder_hidden) + [self.width], "sigmoid", rng, name="decoder")

    def parameters(self) -> List[Node]:
        return self.encoder.parameters() + [self.content] + self.decoder.parameters()

    @property
    def parameter_count(self) -> int:
        return self.encoder.parameter_count + self.content.value.size + self.decoder.parameter_count

    def _check_pixels(self, pixels) -> np.ndarray:
        x = np.atleast_2d(np.asarray(pixels, dtype=np.float64))
        if x.ndim != 2 or x.shape[1] != self.width:
            raise InvalidArgumentError("Model takes images of width {}, got shape {}!".format(self.width, x.shape))

        return x

    def encoder_forward(self, pixels: np.ndarray) -> Tuple[Node, Node, Node]:
        """
        :param pixels: images, shape (B, W)
        :return: tuple, mean vectors (B, 2), mu (B,), clamped log variance (B,)
        """
        head = self.encoder.forward(ops.constant(self._check_pixels(pixels)))
        u = ops.take(head, [0, 1])
        mu = ops.atan2(ops.take(head, 1), ops.take(head, 0))
        log_var = ops.clip(ops.take(head, 2), self.LOG_VAR_MIN, self.LOG_VAR_MAX)

        return u, mu, log_var

    def reparametrize_node(self, mu: Node, log_var: Node, epsilon) -> Node:
        """
        theta = mu + exp(log_var / 2) * epsilon, exponential map of SO(2) is angle addition.
        """
        spread = ops.exp(ops.scale(log_var, 0.5))

        return ops.add(mu, ops.mul(spread, ops.constant(epsilon)))

    def decoder_logits(self, theta: Node) -> Node:
        return self.decoder.forward(rotate_content(theta, self.content, self.k), raw_output=True)

    def kl_node(self, log_var: Node) -> Node:
        return ops.rectifier(ops.add(ops.scale(log_var, -0.5), ops.constant(self.KL_OFFSET)))

    def posterior_loss(self, pixels: np.ndarray, mu: Node, log_var: Node, epsilon) -> Tuple[Node, Node, Node]:
        """
        Loss of a batch given its posterior parameters.
        :return: tuple, batch mean loss (scalar), per-sample BCE (B,), per-sample KL (B,)
        """
        x = self._check_pixels(pixels)
        theta = self.reparametrize_node(mu, log_var, np.asarray(epsilon, dtype=np.float64).reshape(mu.shape))
        bce = ops.sum(ops.binary_cross_entropy(self.decoder_logits(theta), x), axis=1)
        kl = self.kl_node(log_var)
        total = ops.mean(ops.add(bce, ops.scale(kl, self.beta)))

        return total, bce, kl

    def batch_loss(self, pixels: np.ndarray, epsilon) -> Tuple[Node, float, float]:
        """
        Full forward pass for training.
        :return: tuple, scalar loss node, mean BCE, mean KL
        """
        _, mu, log_var = self.encoder_forward(pixels)
        total, bce, kl = self.posterior_loss(pixels, mu, log_var, epsilon)

        return total, float(np.mean(bce.value)), float(np.mean(kl.value))

    def encode_batch(self, pixels) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        :return: tuple, mean vectors (B, 2), canonical mu (B,), log variance (B,)
        """
        u, mu, log_var = self.encoder_forward(pixels)
        bad = ~(np.all(np.isfinite(u.value), axis=1) & np.isfinite(log_var.value))
        if np.any(bad):
            raise NumericError("Non-finite encoder activations", int(np.argmax(bad)))
        zero = np.all(u.value == 0.0, axis=1)
        if np.any(zero):
            raise InvalidArgumentError("Zero mean vector at batch index {}, pose is undefined!".format(
                int(np.argmax(zero))))

        mu_canonical = np.mod(mu.value, TWO_PI)
        mu_canonical[mu_canonical >= TWO_PI] = 0.0

        return u.value, mu_canonical, log_var.value

    def decode_batch(self, thetas) -> np.ndarray:
        theta = ops.constant(np.atleast_1d(np.asarray(thetas, dtype=np.float64)))
        pixels = ops.sigmoid(self.decoder_logits(theta)).value
        bad = ~np.all(np.isfinite(pixels), axis=1)
        if np.any(bad):
            raise NumericError("Non-finite decoder activations", int(np.argmax(bad)))

        return pixels

    def settings(self) -> Dict[str, str]:
        return {
            'width': str(self.width),
            'k': str(self.k),
            'encoder_hidden': " ".join(str(h) for h in self.encoder_hidden),
            'decoder_hidden': " ".join(str(h) for h in self.decoder_hidden),
            'seed': str(self.seed),
            'beta': "{:.17g}".format(self.beta),
            'domain_radius': "{:.17g}".format(self.domain_radius),
        }

    def to_checkpoint(self, extra_settings: Optional[Dict[str, str]] = None) -> Checkpoint:
        settings = dict(extra_settings) if extra_settings else {}
        settings.update(self.settings())
        tensors = {p.name: p.value for p in self.parameters()}

        return Checkpoint(settings, tensors)

    @classmethod
    def from_checkpoint(cls, checkpoint: Checkpoint) -> 'VaeModel':
        s = checkpoint.settings
        try:
            model = cls(int(s['width']), int(s['k']),
                        [int(h) for h in s['encoder_hidden'].split()],
                        [int(h) for h in s['decoder_hidden'].split()],
                        seed=int(s['seed']), beta=float(s['beta']), domain_radius=float(s['domain_radius']))
        except KeyError as exc:
            raise InvalidArgumentError("Checkpoint lacks setting {}!".format(exc))

        for p in model.parameters():
            if p.name not in checkpoint.tensors:
                raise InvalidArgumentError("Checkpoint lacks tensor '{}'!".format(p.name))
            value = checkpoint.tensors[p.name]
            if value.shape != p.shape:
                raise InvalidArgumentError("Tensor '{}' has shape {}, model needs {}!".format(
                    p.name, value.shape, p.shape))
            p.value = np.array(value, dtype=np.float64)
            p.zero_grad()

        return model

    def copy(self) -> 'VaeModel':
        return VaeModel.from_checkpoint(self.to_checkpoint())

    def __str__(self) -> str:
        return "VAE W={} K={} encoder {} decoder {}, {} parameters".format(
            self.width, self.k, list(self.encoder_hidden), list(self.decoder_hidden), self.parameter_count)


def encode(model: VaeModel, image: Union[Image1D, np.ndarray]) -> EncoderOutput:
    pixels = image.pixels if isinstance(image, Image1D) else np.asarray(image, dtype=np.float64)
    u, mu, log_var = model.encode_batch(pixels.reshape(1, -1))

    return EncoderOutput((u[0, 0], u[0, 1]), mu[0], log_var[0])


def reparametrize(mu: float, log_var: float, epsilon: float) -> Rotation:
    return Rotation.from_angle(mu + math.exp(0.5 * log_var) * epsilon)


def decode(model: VaeModel, emb: IrrepEmbedding) -> Image1D:
    """
    Decoder applied to T(R) c.
    """
    if emb.k != model.k:
        raise InvalidArgumentError("Embedding has K={}, model K={}!".format(emb.k, model.k))

    z = ops.constant((emb.matrix @ model.content.value).reshape(1, -1))
    pixels = ops.sigmoid(model.decoder.forward(z, raw_output=True)).value
    if not np.all(np.isfinite(pixels)):
        raise NumericError("Non-finite decoder activations", 0)

    return Image1D(pixels[0], model.domain_radius)


def loss(model: VaeModel, image: Union[Image1D, np.ndarray], theta_sample: float, mu: float,
         log_var: float) -> float:
    """
    BCE of the image against its reconstruction at theta_sample, plus beta times the KL term.
    mu enters only through theta_sample.
    """
    pixels = image.pixels if isinstance(image, Image1D) else np.asarray(image, dtype=np.float64)
    if np.any(pixels < 0.0) or np.any(pixels > 1.0) or not np.all(np.isfinite(pixels)):
        raise InvalidArgumentError("Image pixels must lie in [0, 1]!")
    log_var = min(max(log_var, VaeModel.LOG_VAR_MIN), VaeModel.LOG_VAR_MAX)

    theta = ops.constant([theta_sample])
    bce = ops.sum(ops.binary_cross_entropy(model.decoder_logits(theta), pixels.reshape(1, -1)))
    kl = max(0.0, VaeModel.KL_OFFSET - 0.5 * log_var)

    return float(bce.value) + model.beta * kl


def save_model(model: VaeModel, path: str, extra_settings: Optional[Dict[str, str]] = None) -> VaeModel:
    """
    Write the model as a checkpoint.
    :return: model as read back from the file
    """
    checkpoint = CheckpointWriter(path).write(model.to_checkpoint(extra_settings))

    return VaeModel.from_checkpoint(checkpoint)


def load_model(path: str) -> VaeModel:
    return VaeModel.from_checkpoint(CheckpointReader(path).read())
