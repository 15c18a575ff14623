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
from ..geometry import PointVolume, TWO_PI, wrap_angle
from ..errors import InvalidArgumentError, UnsupportedDimensionError, VolumeTooLargeError
from .verdict import CompatibilityVerdict, PermutationWitness
import logging

log = logging.getLogger(__name__)


class PoseEquations:
    """
    Point i projects to r_i cos(phi_i + theta). Two poses give the same projected
    point masses when, for a mass preserving permutation s,
      r_i cos(phi_i + theta1) = r_s(i) cos(phi_s(i) + theta2)   for every point i.
    """
    RESIDUAL_LIMIT = 1e-9
    POLISH_TARGET = 1e-12
    POLISH_ITERATIONS = 60
    MASS_RTOL = 1e-9

    def __init__(self, volume: PointVolume):
        if volume.dim != 2:
            raise UnsupportedDimensionError(volume.dim)

        self.volume = volume
        self._radii, self._phases = volume.polar()
        self._scale = max(1.0, float(np.max(self._radii)))

    @property
    def scale(self) -> float:
        return self._scale

    def same_mass(self) -> np.ndarray:
        """
        :return: boolean array (n, n), True where points i and j carry equal mass
        """
        masses = self.volume.masses

        return np.isclose(masses[:, np.newaxis], masses[np.newaxis, :], rtol=self.MASS_RTOL, atol=0.0)

    def residuals(self, sigma, theta1, theta2) -> np.ndarray:
        """
        :return: array (..., n) of equation residuals
        """
        sigma = np.asarray(sigma)
        t1 = np.asarray(theta1, dtype=float)[..., np.newaxis]
        t2 = np.asarray(theta2, dtype=float)[..., np.newaxis]

        return self._radii * np.cos(self._phases + t1) - self._radii[sigma] * np.cos(self._phases[sigma] + t2)

    def _jacobian(self, sigma: np.ndarray, theta1: float, theta2: float) -> np.ndarray:
        d1 = -self._radii * np.sin(self._phases + theta1)
        d2 = self._radii[sigma] * np.sin(self._phases[sigma] + theta2)

        return np.stack([d1, d2], axis=1)

    def polish(self, sigma, theta1: float, theta2: float) -> Tuple[float, float, float]:
        """
        Gauss-Newton refinement of a candidate solution.
        :return: tuple, theta1, theta2, max abs residual
        """
        sigma = np.asarray(sigma)
        residual = self.residuals(sigma, theta1, theta2)
        worst = float(np.max(np.abs(residual)))
        for _ in range(self.POLISH_ITERATIONS):
            if worst <= self.POLISH_TARGET * self._scale:
                break
            step = np.linalg.lstsq(self._jacobian(sigma, theta1, theta2), -residual, rcond=None)[0]
            new_theta1 = theta1 + step[0]
            new_theta2 = theta2 + step[1]
            new_residual = self.residuals(sigma, new_theta1, new_theta2)
            new_worst = float(np.max(np.abs(new_residual)))
            if not new_worst < worst:
                break
            theta1, theta2, residual, worst = new_theta1, new_theta2, new_residual, new_worst

        return theta1, theta2, worst

    def is_solution(self, worst: float) -> bool:
        return worst < self.RESIDUAL_LIMIT * self._scale


class AlgebraicSolver(PoseEquations):
    """
    Searches for distinct poses theta1 != theta2 solving the pose equations for some
    mass preserving permutation. No solution means the projections never coincide.

    Per permutation the system has one free parameter after eliminating theta2 through
    one equation, so theta1 is swept and the candidates are polished with Gauss-Newton.
    """
    DEFAULT_RESOLUTION = 4096
    MAX_POINTS = 8
    MIN_SEPARATION = 1e-6
    # Permutations whose 4 column system has no null vector can't have a solution
    NULL_SPACE_RTOL = 1e-6
    MAX_CANDIDATES = 32

    def __init__(self, volume: PointVolume, angular_resolution: int = DEFAULT_RESOLUTION):
        if volume.dim != 2:
            raise UnsupportedDimensionError(volume.dim)
        if volume.n > self.MAX_POINTS:
            raise VolumeTooLargeError("Algebraic check enumerates n! permutations, n={} is over the limit {}!".format(
                volume.n, self.MAX_POINTS))
        if int(angular_resolution) != angular_resolution or angular_resolution < 8:
            raise InvalidArgumentError("Angular resolution must be an integer >= 8, got {}!".format(
                angular_resolution))
        super().__init__(volume)

        self.resolution = int(angular_resolution)

    def mass_preserving_permutations(self) -> List[Tuple[int, ...]]:
        """
        Permutations s of the points with m_i = m_s(i), lexicographic order.
        """
        n = self.volume.n
        allowed = self.same_mass()

        perms = []
        # Depth first over positions keeps the lexicographic order and prunes early
        def extend(prefix: List[int], used: List[bool]) -> None:
            i = len(prefix)
            if i == n:
                perms.append(tuple(prefix))
                return
            for j in range(n):
                if not used[j] and allowed[i, j]:
                    used[j] = True
                    prefix.append(j)
                    extend(prefix, used)
                    prefix.pop()
                    used[j] = False

        extend([], [False] * n)

        return perms

    def feasible_permutations(self) -> List[Tuple[int, ...]]:
        perms = self.mass_preserving_permutations()
        if self.volume.n < 4 or not perms:
            return perms

        # X_i . u1 = X_s(i) . u2 with unit u1, u2 needs a null vector of [X | -X_s]
        points = self.volume.points
        index = np.array(perms)
        systems = np.concatenate([np.broadcast_to(points, (len(perms),) + points.shape), -points[index]], axis=2)
        smallest = np.linalg.svd(systems, compute_uv=False)[:, -1]
        keep = smallest <= self.NULL_SPACE_RTOL * self._scale
        log.debug("Null space test kept {} of {} permutations".format(int(np.sum(keep)), len(perms)))

        return [p for p, k in zip(perms, keep) if k]

    def candidates(self, sigma: Tuple[int, ...]) -> List[Tuple[float, float, float]]:
        """
        Sweep theta1, solve one equation for theta2 on both arccos branches and
        keep the local minima of the summed squared residuals. Sweep points lying
        on theta1 == theta2 itself are skipped, near misses are kept for polishing.
        :return: list of tuples theta1, theta2, sum of squares; best first
        """
        sig = np.asarray(sigma)
        theta1 = np.arange(self.resolution) * (TWO_PI / self.resolution)
        # Eliminate through the point whose partner is farthest from the origin
        pivot = int(np.argmax(self._radii[sig]))
        partner = sig[pivot]
        ratio = self._radii[pivot] * np.cos(self._phases[pivot] + theta1) / self._radii[partner]
        feasible = np.abs(ratio) <= 1.0 + 1e-12
        base = np.arccos(np.clip(ratio, -1.0, 1.0))

        found = []
        for branch in (1.0, -1.0):
            theta2 = branch * base - self._phases[partner]
            cost = np.sum(self.residuals(sig, theta1, theta2) ** 2, axis=1)
            cost[~feasible] = np.inf

            minima = (cost <= np.roll(cost, 1)) & (cost <= np.roll(cost, -1)) & np.isfinite(cost)
            minima &= np.abs(wrap_angle(theta2 - theta1)) > self.MIN_SEPARATION
            idx = np.nonzero(minima)[0]
            idx = idx[np.argsort(cost[idx], kind="stable")][:self.MAX_CANDIDATES]
            found.extend((float(theta1[k]), float(theta2[k]), float(cost[k])) for k in idx)

        found.sort(key=lambda c: c[2])

        return found

    def find_witness(self) -> Optional[PermutationWitness]:
        n = self.volume.n
        if np.all(self._radii == 0.0):
            # Every rotation fixes a volume sitting at the origin
            return PermutationWitness(tuple(range(n)), 0.0, math.pi, 0.0)

        for sigma in self.feasible_permutations():
            for theta1, theta2, _ in self.candidates(sigma):
                theta1, theta2, worst = self.polish(sigma, theta1, theta2)
                if not self.is_solution(worst):
                    continue
                # Judged after polishing: the candidate may have slid onto theta1 == theta2
                if abs(wrap_angle(theta2 - theta1)) <= self.MIN_SEPARATION:
                    continue
                witness = PermutationWitness(sigma, theta1, theta2, worst)
                log.debug("Found witness: {}".format(witness))

                return witness

        return None

    def check(self) -> CompatibilityVerdict:
        witness = self.find_witness()
        verdict = CompatibilityVerdict("algebraic", self.resolution, self.RESIDUAL_LIMIT,
                                       satisfies_injectivity=witness is None, permutation_witness=witness)
        log.info("Algebraic injectivity check, n={}: {}".format(self.volume.n, verdict.satisfies_injectivity))

        return verdict


def check_injectivity_algebraic(v: PointVolume,
                                angular_resolution: int = AlgebraicSolver.DEFAULT_RESOLUTION) -> CompatibilityVerdict:
    return AlgebraicSolver(v, angular_resolution).check()
