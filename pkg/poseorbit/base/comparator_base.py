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

from abc import ABC, abstractmethod
import numpy as np
from ..geometry import PointVolume
from ..errors import UnsupportedDimensionError, InvalidArgumentError
import logging

log = logging.getLogger(__name__)


class ComparatorBase(ABC):
    """
    Decides equality of projected images of one d=2 volume at different poses.
    Every pose is turned into a signature vector, two poses are compared by the
    root mean square difference of their signatures.
    """
    # Rows per block when building distance tables
    CHUNK_ROWS = 32

    def __init__(self, volume: PointVolume):
        if volume.dim != 2:
            raise UnsupportedDimensionError(volume.dim)
        self.volume = volume

    @property
    @abstractmethod
    def name(self) -> str:
        """
        Short name of the comparison path, stored into verdicts
        :return: str
        """
        pass

    @property
    @abstractmethod
    def default_tolerance(self) -> float:
        """
        Coincidence tolerance used when caller doesn't give one
        :return: float
        """
        pass

    @abstractmethod
    def signatures(self, thetas) -> np.ndarray:
        """
        Signatures of the projections of the volume at given poses
        :param thetas: array of angles
        :return: array (len(thetas), F)
        """
        pass

    def distance(self, theta1: float, theta2: float) -> float:
        sig = self.signatures([theta1, theta2])

        return float(np.sqrt(np.mean((sig[0] - sig[1]) ** 2)))

    def distance_table(self, thetas) -> np.ndarray:
        """
        Pairwise distances between all given poses
        :param thetas: array of angles
        :return: symmetric array (len(thetas), len(thetas))
        """
        sig = self.signatures(thetas)

        return self.signature_distances(sig, sig)

    @classmethod
    def signature_distances(cls, sig_a: np.ndarray, sig_b: np.ndarray) -> np.ndarray:
        if sig_a.shape[1] != sig_b.shape[1]:
            raise InvalidArgumentError("Signature lengths {} and {} differ!".format(sig_a.shape[1], sig_b.shape[1]))

        table = np.empty((sig_a.shape[0], sig_b.shape[0]))
        for start in range(0, sig_a.shape[0], cls.CHUNK_ROWS):
            block = sig_a[start:start + cls.CHUNK_ROWS]
            diff = block[:, np.newaxis, :] - sig_b[np.newaxis, :, :]
            table[start:start + block.shape[0]] = np.sqrt(np.mean(diff * diff, axis=2))

        return table
