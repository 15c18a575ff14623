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
from ..errors import InvalidArgumentError

TWO_PI = 2.0 * math.pi


def canonical_angle(theta: float) -> float:
    """
    Map an angle into [0, 2*pi). A value landing on 2*pi maps to 0.
    :param theta: angle in radians, finite
    :return: canonical angle
    """
    angle = math.fmod(theta, TWO_PI)
    if angle < 0.0:
        angle += TWO_PI
    if angle >= TWO_PI:
        angle = 0.0

    # Get rid of -0.0
    return angle + 0.0


def wrap_angle(theta):
    """
    Signed circular difference, into [-pi, pi). Works on scalars and numpy arrays.
    """
    return np.mod(np.asarray(theta, dtype=float) + math.pi, TWO_PI) - math.pi


class Rotation:
    """
    Element of SO(d), stored as an orthonormal matrix with determinant +1.
    For d=2 the canonical angle is kept alongside the matrix.
    """
    TOLERANCE = 1e-12

    def __init__(self, matrix: np.ndarray, angle: Optional[float] = None):
        # Use the factory methods. Constructor trusts its input.
        self._matrix = np.array(matrix, dtype=float)
        self._matrix.setflags(write=False)
        self._angle = angle

    @classmethod
    def from_angle(cls, theta: float) -> 'Rotation':
        if not math.isfinite(theta):
            raise InvalidArgumentError("Rotation angle must be finite, got {}!".format(theta))

        angle = canonical_angle(theta)
        c = math.cos(angle)
        s = math.sin(angle)

        return cls(np.array([[c, -s], [s, c]]), angle)

    @classmethod
    def from_matrix(cls, matrix) -> 'Rotation':
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise InvalidArgumentError("Rotation matrix must be square with d >= 2, got shape {}!".format(m.shape))
        if not np.all(np.isfinite(m)):
            raise InvalidArgumentError("Rotation matrix has non-finite entries!")

        dim = m.shape[0]
        deviation = np.max(np.abs(m.T @ m - np.eye(dim)))
        if deviation > cls.TOLERANCE:
            raise InvalidArgumentError("Matrix is not orthonormal! Deviation {:.3g}".format(deviation))
        det = np.linalg.det(m)
        if abs(det - 1.0) > cls.TOLERANCE:
            raise InvalidArgumentError("Matrix determinant is {:.17g}, need +1!".format(det))

        if dim == 2:
            return cls.from_angle(math.atan2(m[1, 0], m[0, 0]))

        return cls(m)

    @classmethod
    def identity(cls, dim: int = 2) -> 'Rotation':
        if dim < 2:
            raise InvalidArgumentError("Need d >= 2, got {}!".format(dim))
        if dim == 2:
            return cls.from_angle(0.0)

        return cls(np.eye(dim))

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator) -> 'Rotation':
        """
        Draw a rotation uniformly (Haar measure) from SO(d).
        """
        if dim < 2:
            raise InvalidArgumentError("Need d >= 2, got {}!".format(dim))
        if dim == 2:
            return cls.from_angle(rng.uniform(0.0, TWO_PI))

        q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
        q = q * np.sign(np.diag(r))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]

        return cls(q)

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def angle(self) -> Optional[float]:
        """
        Canonical angle in [0, 2*pi), d=2 only.
        """
        return self._angle

    def inverse(self) -> 'Rotation':
        if self.dim == 2:
            return Rotation.from_angle(-self._angle)

        return Rotation(self._matrix.T)

    def is_identity(self, tol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self._matrix - np.eye(self.dim))) <= tol)

    def __matmul__(self, other: 'Rotation') -> 'Rotation':
        return compose(self, other)

    def __str__(self) -> str:
        if self.dim == 2:
            return "SO(2) rotation {:.6f} rad ({:.3f} deg)".format(self._angle, math.degrees(self._angle))

        return "SO({}) rotation".format(self.dim)

    def __repr__(self) -> str:
        if self.dim == 2:
            return "Rotation.from_angle({!r})".format(self._angle)

        return "Rotation({!r})".format(self._matrix.tolist())


def rotation_from_angle(theta: float) -> Rotation:
    return Rotation.from_angle(theta)


def compose(r1: Rotation, r2: Rotation) -> Rotation:
    """
    Group law of SO(d): matrix product r1 * r2.
    :param r1: left rotation
    :param r2: right rotation
    :return: composed rotation
    """
    if r1.dim != r2.dim:
        raise InvalidArgumentError("Cannot compose SO({}) with SO({})!".format(r1.dim, r2.dim))

    if r1.dim == 2:
        return Rotation.from_angle(r1.angle + r2.angle)

    return Rotation(r1.matrix @ r2.matrix)
