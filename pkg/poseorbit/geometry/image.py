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
from typing import Optional
import numpy as np
from .rotation import rotation_from_angle
from .volume import PointVolume, ProjectedMasses, apply_rotation, project, project_many
from ..errors import InvalidArgumentError, OutOfDomainError, UnsupportedDimensionError, NumericError
import logging

log = logging.getLogger(__name__)


class Image1D:
    """
    Discretized projected image. Pixel j covers [-r + 2rj/W, -r + 2r(j+1)/W).
    """

    def __init__(self, pixels, domain_radius: float):
        data = np.array(pixels, dtype=float).reshape(-1)
        if data.shape[0] < 2:
            raise InvalidArgumentError("Image needs width >= 2, got {}!".format(data.shape[0]))
        if not np.all(np.isfinite(data)) or np.any(data < 0.0) or np.any(data > 1.0):
            raise InvalidArgumentError("Image pixels must lie in [0, 1]!")
        if not domain_radius > 0.0:
            raise InvalidArgumentError("Domain radius must be positive, got {}!".format(domain_radius))

        data.setflags(write=False)
        self._pixels = data
        self._domain_radius = float(domain_radius)

    @property
    def width(self) -> int:
        return self._pixels.shape[0]

    @property
    def pixels(self) -> np.ndarray:
        return self._pixels

    @property
    def domain_radius(self) -> float:
        return self._domain_radius

    def pixel_centers(self) -> np.ndarray:
        return pixel_centers(self.width, self._domain_radius)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Image1D):
            return NotImplemented

        return self._domain_radius == other._domain_radius and bool(np.array_equal(self._pixels, other._pixels))

    def __str__(self) -> str:
        return "Image W={}, radius {:.6g}".format(self.width, self._domain_radius)


class RasterSettings:
    """
    How projections are rendered into images.
    splat_sigma None means DEFAULT_SPLAT_FRACTION of the domain radius, 0 means nearest-pixel binning.
    domain_radius None means: take it from the volume being rendered.
    """
    DEFAULT_WIDTH = 64
    DEFAULT_SPLAT_FRACTION = 0.05

    def __init__(self, width: int = DEFAULT_WIDTH, splat_sigma: Optional[float] = None,
                 domain_radius: Optional[float] = None):
        self._width = None
        self._splat_sigma = None
        self._domain_radius = None

        self.width = width
        self.splat_sigma = splat_sigma
        self.domain_radius = domain_radius

    @property
    def width(self) -> int:
        return self._width

    @width.setter
    def width(self, width: int) -> None:
        if int(width) != width or width < 2:
            raise InvalidArgumentError("Cannot set image width {}! Need an integer >= 2.".format(width))
        self._width = int(width)

    @property
    def splat_sigma(self) -> Optional[float]:
        return self._splat_sigma

    @splat_sigma.setter
    def splat_sigma(self, sigma: Optional[float]) -> None:
        if sigma is not None and not (sigma >= 0.0 and math.isfinite(sigma)):
            raise InvalidArgumentError("Cannot set splat sigma {}! Need a finite value >= 0.".format(sigma))
        self._splat_sigma = None if sigma is None else float(sigma)

    @property
    def domain_radius(self) -> Optional[float]:
        return self._domain_radius

    @domain_radius.setter
    def domain_radius(self, radius: Optional[float]) -> None:
        if radius is not None and not radius > 0.0:
            raise InvalidArgumentError("Cannot set domain radius {}!".format(radius))
        self._domain_radius = None if radius is None else float(radius)

    @property
    def is_exact(self) -> bool:
        """
        Nearest-pixel binning, projections are then compared as exact multisets.
        """
        return self._splat_sigma == 0.0

    def resolved(self, volume: PointVolume) -> 'RasterSettings':
        radius = self._domain_radius if self._domain_radius is not None else volume.domain_radius
        sigma = self._splat_sigma if self._splat_sigma is not None else self.DEFAULT_SPLAT_FRACTION * radius

        return RasterSettings(self._width, sigma, radius)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RasterSettings):
            return NotImplemented

        return (self._width, self._splat_sigma, self._domain_radius) == \
               (other._width, other._splat_sigma, other._domain_radius)

    def __str__(self) -> str:
        return "W={} splat_sigma={} radius={}".format(self._width, self._splat_sigma, self._domain_radius)


def pixel_centers(width: int, domain_radius: float) -> np.ndarray:
    # Integer numerators keep the centers exactly antisymmetric.
    return domain_radius * ((2.0 * np.arange(width) + 1.0 - width) / width)


def raster_rows(positions: np.ndarray, masses: np.ndarray, width: int, splat_sigma: float,
                domain_radius: float) -> np.ndarray:
    """
    Render a batch of 1D projections.
    :param positions: array (B, n) of projected positions
    :param masses: array (n,) of masses
    :return: array (B, W), each row max-normalized into [0, 1]
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    masses = np.asarray(masses, dtype=float).reshape(1, -1)
    batch, n = positions.shape
    if np.any(np.abs(positions) > domain_radius * (1.0 + PointVolume.RADIUS_SLACK)):
        worst = float(np.max(np.abs(positions)))
        raise OutOfDomainError("Projected mass at {:.17g} is outside domain [-{:.17g}, {:.17g}]!".format(
            worst, domain_radius, domain_radius
        ))

    if splat_sigma == 0.0:
        index = np.floor((positions + domain_radius) * (width / (2.0 * domain_radius))).astype(int)
        index = np.clip(index, 0, width - 1)
        rows = np.zeros((batch, width))
        row_index = np.repeat(np.arange(batch), n)
        np.add.at(rows, (row_index, index.reshape(-1)), np.broadcast_to(masses, positions.shape).reshape(-1))
    else:
        centers = pixel_centers(width, domain_radius).reshape(1, 1, -1)
        offsets = centers - positions[:, :, np.newaxis]
        bumps = np.exp(-0.5 * (offsets / splat_sigma) ** 2)
        rows = np.sum(bumps * masses[:, :, np.newaxis], axis=1)

    peaks = np.max(rows, axis=1, keepdims=True)
    if np.any(~(peaks > 0.0)):
        raise NumericError("Rendered signal vanished! Splat sigma {} too narrow for width {}.".format(
            splat_sigma, width
        ))

    return rows / peaks


def rasterize(p: ProjectedMasses, width: int, splat_sigma: float, domain_radius: float) -> Image1D:
    """
    Deposit every projected mass as a Gaussian bump sampled at pixel centers, or
    into its pixel when splat_sigma is 0, then divide by the maximum.
    """
    if p.dim != 1:
        raise UnsupportedDimensionError(p.dim + 1)
    if width < 2:
        raise InvalidArgumentError("Image width must be >= 2, got {}!".format(width))
    if not splat_sigma >= 0.0:
        raise InvalidArgumentError("Splat sigma must be >= 0, got {}!".format(splat_sigma))

    rows = raster_rows(p.positions.reshape(1, -1), p.masses, width, splat_sigma, domain_radius)

    return Image1D(rows[0], domain_radius)


def image_distance(a: Image1D, b: Image1D) -> float:
    """
    Root mean square pixel difference.
    """
    if a.width != b.width:
        raise InvalidArgumentError("Cannot compare images of width {} and {}!".format(a.width, b.width))

    return float(np.sqrt(np.mean((a.pixels - b.pixels) ** 2)))


def render_pose(v: PointVolume, theta: float, settings: RasterSettings) -> Image1D:
    """
    Image formation: rotate by theta, project, rasterize.
    """
    s = settings.resolved(v)
    projected = project(apply_rotation(rotation_from_angle(theta), v))

    return rasterize(projected, s.width, s.splat_sigma, s.domain_radius)


def render_poses(v: PointVolume, thetas, settings: RasterSettings) -> np.ndarray:
    """
    Batched image formation for a d=2 volume.
    :return: array (len(thetas), W) of pixels
    """
    s = settings.resolved(v)
    positions = project_many(v, thetas)

    return raster_rows(positions, v.masses, s.width, s.splat_sigma, s.domain_radius)
