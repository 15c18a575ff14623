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
from typing import List, Optional, Tuple
import numpy as np
from ..geometry import PointVolume, Image1D, RasterSettings, render_poses, canonical_angle, TWO_PI
from ..errors import InvalidArgumentError
import logging

log = logging.getLogger(__name__)

TRAIN = "train"
VALIDATION = "val"


class PoseSample:

    def __init__(self, theta_true: float, image: Image1D):
        self.theta_true = canonical_angle(theta_true)
        self.image = image

    def __str__(self) -> str:
        return "sample at {:.4f} deg, {}".format(math.degrees(self.theta_true), self.image)


class Dataset:
    """
    Images of one volume at random poses. Poses and pixels are kept as arrays,
    row k is sample k. The last validation_count rows form the validation split.
    """
    DEFAULT_COUNT = 2000
    DEFAULT_VAL_FRACTION = 0.1

    def __init__(self, volume: PointVolume, thetas, pixels, raster: RasterSettings,
                 noise_sigma: float = 0.0, seed: int = 0, val_fraction: float = DEFAULT_VAL_FRACTION):
        theta_arr = np.array(thetas, dtype=float).reshape(-1)
        pixel_arr = np.array(pixels, dtype=float)
        if pixel_arr.ndim != 2 or pixel_arr.shape[0] != theta_arr.shape[0]:
            raise InvalidArgumentError("Need one image row per pose, got {} poses and pixels of shape {}!".format(
                theta_arr.shape[0], pixel_arr.shape))
        if theta_arr.shape[0] < 1:
            raise InvalidArgumentError("Dataset needs at least one sample!")
        if raster.splat_sigma is None or raster.domain_radius is None:
            raise InvalidArgumentError("Dataset raster settings must be resolved, got {}!".format(raster))
        if pixel_arr.shape[1] != raster.width:
            raise InvalidArgumentError("Images have width {}, raster settings say {}!".format(
                pixel_arr.shape[1], raster.width))
        if not np.all(np.isfinite(pixel_arr)) or np.any(pixel_arr < 0.0) or np.any(pixel_arr > 1.0):
            raise InvalidArgumentError("Image pixels must lie in [0, 1]!")
        if not np.all((theta_arr >= 0.0) & (theta_arr < TWO_PI)):
            raise InvalidArgumentError("Poses must be canonical angles in [0, 2*pi)!")
        _check_fraction(val_fraction)
        if not noise_sigma >= 0.0:
            raise InvalidArgumentError("Noise sigma must be >= 0, got {}!".format(noise_sigma))

        theta_arr.setflags(write=False)
        pixel_arr.setflags(write=False)
        self.volume = volume
        self.raster = raster
        self.noise_sigma = float(noise_sigma)
        self.seed = int(seed)
        self.val_fraction = float(val_fraction)
        self._thetas = theta_arr
        self._pixels = pixel_arr

    @property
    def count(self) -> int:
        return self._thetas.shape[0]

    @property
    def width(self) -> int:
        return self._pixels.shape[1]

    @property
    def thetas(self) -> np.ndarray:
        return self._thetas

    @property
    def pixels(self) -> np.ndarray:
        return self._pixels

    @property
    def validation_count(self) -> int:
        return validation_count(self.count, self.val_fraction)

    @property
    def split(self) -> List[str]:
        train_count = self.count - self.validation_count

        return [TRAIN] * train_count + [VALIDATION] * self.validation_count

    def train_indices(self) -> np.ndarray:
        return np.arange(self.count - self.validation_count)

    def validation_indices(self) -> np.ndarray:
        return np.arange(self.count - self.validation_count, self.count)

    def subset(self, indices) -> Tuple[np.ndarray, np.ndarray]:
        """
        :return: tuple, poses and image rows of the given samples
        """
        return self._thetas[indices], self._pixels[indices]

    @property
    def samples(self) -> List[PoseSample]:
        return [self.sample(k) for k in range(self.count)]

    def sample(self, index: int) -> PoseSample:
        return PoseSample(self._thetas[index], Image1D(self._pixels[index], self.raster.domain_radius))

    def __len__(self) -> int:
        return self.count

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented

        return (self.volume == other.volume and self.raster == other.raster and
                self.noise_sigma == other.noise_sigma and self.seed == other.seed and
                self.val_fraction == other.val_fraction and
                bool(np.array_equal(self._thetas, other._thetas)) and
                bool(np.array_equal(self._pixels, other._pixels)))

    def __str__(self) -> str:
        return "Dataset of {} images ({} validation), {}, noise {:.3g}, seed {}".format(
            self.count, self.validation_count, self.raster, self.noise_sigma, self.seed)


def validation_count(count: int, val_fraction: float) -> int:
    return int(math.ceil(count * val_fraction))


def _check_fraction(val_fraction: float) -> None:
    if not (0.0 <= val_fraction < 1.0):
        raise InvalidArgumentError("Validation fraction must be within [0, 1), got {}!".format(val_fraction))


def generate_dataset(v: PointVolume, count: int = Dataset.DEFAULT_COUNT, width: int = RasterSettings.DEFAULT_WIDTH,
                     splat_sigma: Optional[float] = None, noise_sigma: float = 0.0, seed: int = 0,
                     val_fraction: float = Dataset.DEFAULT_VAL_FRACTION) -> Dataset:
    """
    Render count images of the volume at poses drawn uniformly on the circle.
    :param v: volume, d=2
    :param count: number of samples
    :param width: image width W
    :param splat_sigma: None for the default splat, 0 for nearest-pixel binning
    :param noise_sigma: std of Gaussian pixel noise, images are clamped back to [0, 1]
    :param seed: seed for poses and noise
    :param val_fraction: fraction of samples, rounded up, tagged validation
    :return: Dataset
    """
    if int(count) != count or count < 1:
        raise InvalidArgumentError("Sample count must be a positive integer, got {}!".format(count))
    _check_fraction(val_fraction)
    if not noise_sigma >= 0.0:
        raise InvalidArgumentError("Noise sigma must be >= 0, got {}!".format(noise_sigma))

    raster = RasterSettings(width, splat_sigma, v.domain_radius).resolved(v)
    rng = np.random.default_rng(seed)
    thetas = rng.uniform(0.0, TWO_PI, size=int(count))
    pixels = render_poses(v, thetas, raster)
    if noise_sigma > 0.0:
        pixels = np.clip(pixels + rng.normal(0.0, noise_sigma, size=pixels.shape), 0.0, 1.0)

    dataset = Dataset(v, thetas, pixels, raster, noise_sigma, seed, val_fraction)
    log.info("Generated {}".format(dataset))

    return dataset
