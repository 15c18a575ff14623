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

from typing import Tuple, Optional, Sequence
import numpy as np
from .rotation import Rotation
from ..errors import InvalidArgumentError, OutOfDomainError, UnsupportedDimensionError


class PointVolume:
    """
    Volume as a finite sum of weighted Dirac masses inside the ball of radius domain_radius.
    """
    # Rotating a point sitting on the boundary may push it out by an ulp.
    RADIUS_SLACK = 1e-9

    def __init__(self, points, masses: Optional[Sequence[float]] = None, domain_radius: Optional[float] = None):
        pts = np.array(points, dtype=float)
        if pts.ndim != 2:
            raise InvalidArgumentError("Points need to be a n x d table, got shape {}!".format(pts.shape))
        n, dim = pts.shape
        if n < 1:
            raise InvalidArgumentError("Volume needs at least one point!")
        if dim < 2:
            raise UnsupportedDimensionError(dim, "d >= 2")
        if not np.all(np.isfinite(pts)):
            raise InvalidArgumentError("Point coordinates must be finite!")

        if masses is None:
            mass = np.ones(n)
        else:
            mass = np.array(masses, dtype=float).reshape(-1)
        if mass.shape[0] != n:
            raise InvalidArgumentError("Got {} points but {} masses!".format(n, mass.shape[0]))
        if not np.all(np.isfinite(mass)) or np.any(mass <= 0.0):
            raise InvalidArgumentError("All masses must be positive and finite!")

        norms = np.linalg.norm(pts, axis=1)
        if domain_radius is None:
            domain_radius = float(np.max(norms)) if np.max(norms) > 0.0 else 1.0
        domain_radius = float(domain_radius)
        if not domain_radius > 0.0 or not np.isfinite(domain_radius):
            raise InvalidArgumentError("Domain radius must be positive, got {}!".format(domain_radius))
        if np.any(norms > domain_radius * (1.0 + self.RADIUS_SLACK)):
            idx = int(np.argmax(norms))
            raise OutOfDomainError("Point {} at distance {:.17g} is outside domain radius {:.17g}!".format(
                idx, norms[idx], domain_radius
            ))

        pts.setflags(write=False)
        mass.setflags(write=False)
        self._points = pts
        self._masses = mass
        self._domain_radius = domain_radius

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    @property
    def n(self) -> int:
        return self._points.shape[0]

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def masses(self) -> np.ndarray:
        return self._masses

    @property
    def domain_radius(self) -> float:
        return self._domain_radius

    @property
    def total_mass(self) -> float:
        return float(np.sum(self._masses))

    def polar(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Polar coordinates of a d=2 volume.
        :return: tuple, radii and angles of the points
        """
        if self.dim != 2:
            raise UnsupportedDimensionError(self.dim)

        radii = np.hypot(self._points[:, 0], self._points[:, 1])
        angles = np.arctan2(self._points[:, 1], self._points[:, 0])

        return radii, angles

    def with_masses(self, masses) -> 'PointVolume':
        return PointVolume(self._points, masses, self._domain_radius)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointVolume):
            return NotImplemented

        return (self._domain_radius == other._domain_radius and
                self._points.shape == other._points.shape and
                bool(np.array_equal(self._points, other._points)) and
                bool(np.array_equal(self._masses, other._masses)))

    def __str__(self) -> str:
        return "Point volume d={}, {} points, total mass {:.6g}, radius {:.6g}".format(
            self.dim, self.n, self.total_mass, self._domain_radius
        )


class ProjectedMasses:
    """
    Exact projection of a point volume: positions in R^(d-1) with the masses carried over.
    """

    def __init__(self, positions, masses):
        pos = np.array(positions, dtype=float)
        if pos.ndim == 1:
            pos = pos.reshape(-1, 1)
        mass = np.array(masses, dtype=float).reshape(-1)
        if pos.shape[0] != mass.shape[0]:
            raise InvalidArgumentError("Got {} positions but {} masses!".format(pos.shape[0], mass.shape[0]))

        pos.setflags(write=False)
        mass.setflags(write=False)
        self._positions = pos
        self._masses = mass

    @property
    def dim(self) -> int:
        return self._positions.shape[1]

    @property
    def positions(self) -> np.ndarray:
        return self._positions

    @property
    def masses(self) -> np.ndarray:
        return self._masses

    @property
    def total_mass(self) -> float:
        return float(np.sum(self._masses))

    def __len__(self) -> int:
        return self._positions.shape[0]


def apply_rotation(r: Rotation, v: PointVolume) -> PointVolume:
    """
    Oriented volume R.V(x) = V(R^-1 x): every point mass is carried forward by R.
    """
    if r.dim != v.dim:
        raise InvalidArgumentError("Cannot rotate a d={} volume with SO({})!".format(v.dim, r.dim))

    return PointVolume(v.points @ r.matrix.T, v.masses, v.domain_radius)


def project(v: PointVolume) -> ProjectedMasses:
    """
    Integrate along the last axis: drop the last coordinate, keep the masses.
    """
    return ProjectedMasses(v.points[:, :-1], v.masses)


def project_many(v: PointVolume, thetas) -> np.ndarray:
    """
    Projected positions of a d=2 volume for a batch of poses.
    :param v: volume, d=2
    :param thetas: array of angles
    :return: array, shape (len(thetas), n), position of point i at pose k
    """
    if v.dim != 2:
        raise UnsupportedDimensionError(v.dim)

    angles = np.asarray(thetas, dtype=float).reshape(-1, 1)
    x = v.points[:, 0].reshape(1, -1)
    y = v.points[:, 1].reshape(1, -1)

    return np.cos(angles) * x - np.sin(angles) * y
