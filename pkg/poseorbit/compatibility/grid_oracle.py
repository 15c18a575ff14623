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
from scipy.optimize import linear_sum_assignment
from ..base import ComparatorBase
from ..geometry import PointVolume, RasterSettings, TWO_PI, canonical_angle, wrap_angle, project_many
from ..errors import InvalidArgumentError, UnsupportedDimensionError, IncompatibleVolumeError
from .exact import ExactComparator
from .raster import RasterComparator
from .verdict import CoincidencePair, StarViolation, CompatibilityVerdict
from .algebraic import PoseEquations
import logging

log = logging.getLogger(__name__)


class GroupActionReport:

    def __init__(self, sample_count: int, tolerance: float, identity_deviation: float,
                 compatibility_deviation: float, max_preimages: int):
        self.sample_count = sample_count
        self.tolerance = tolerance
        self.identity_deviation = identity_deviation
        self.compatibility_deviation = compatibility_deviation
        self.max_preimages = max_preimages

    @property
    def worst_deviation(self) -> float:
        return max(self.identity_deviation, self.compatibility_deviation)

    @property
    def passed(self) -> bool:
        return self.worst_deviation <= self.tolerance

    def __bool__(self) -> bool:
        return self.passed

    def __str__(self) -> str:
        return "group action {}: {} samples, worst deviation {:.3g} (identity {:.3g}), " \
               "max {} preimages per image".format(
                   "holds" if self.passed else "FAILS", self.sample_count, self.worst_deviation,
                   self.identity_deviation, self.max_preimages
               )


class GridOracle:
    """
    Brute force over a uniform grid of grid_size poses. Pose k is the angle 2*pi*k/grid_size.
    The full table of pairwise projection distances is computed once and every
    check is answered from it.

    On the exact path coincidences between grid poses are found too: local minima
    of the table that miss the tolerance by less than the grid can resolve are
    polished with the pose equations and kept when they converge.
    """
    DEFAULT_GRID_SIZE = 720
    DEFAULT_ROTATION_COUNT = 36
    MIN_GRID_SIZE = 8
    # Pairs closer than this many grid steps are treated as the same pose
    GUARD_STEPS = 2
    # Near misses within this many grid steps, times the largest radius, are polished
    REFINE_STEPS = 2.0
    MAX_REFINE_CANDIDATES = 4096
    MAX_MATCHINGS = 16

    def __init__(self, volume: PointVolume, grid_size: int = DEFAULT_GRID_SIZE,
                 raster: Optional[RasterSettings] = None, tol: Optional[float] = None):
        """
        :param volume: volume to check, d=2
        :param grid_size: number of poses on the grid
        :param raster: None or splat_sigma 0 selects the exact multiset comparison, otherwise images are compared
        :param tol: coincidence tolerance, None for the comparison path default
        """
        if volume.dim != 2:
            raise UnsupportedDimensionError(volume.dim)
        if int(grid_size) != grid_size or grid_size < self.MIN_GRID_SIZE:
            raise InvalidArgumentError("Grid size must be an integer >= {}, got {}!".format(
                self.MIN_GRID_SIZE, grid_size))
        if tol is not None and not tol >= 0.0:
            raise InvalidArgumentError("Tolerance must be >= 0, got {}!".format(tol))

        self.volume = volume
        self.grid_size = int(grid_size)
        if raster is None or raster.is_exact:
            self.comparator = ExactComparator(volume)  # type: ComparatorBase
        else:
            self.comparator = RasterComparator(volume, raster)
        self.tolerance = self.comparator.default_tolerance if tol is None else float(tol)
        self._table = None
        self._equations = PoseEquations(volume) if isinstance(self.comparator, ExactComparator) else None
        self._refined = None  # type: Optional[List[CoincidencePair]]

    @property
    def method(self) -> str:
        return "grid-{}".format(self.comparator.name)

    @property
    def step(self) -> float:
        return TWO_PI / self.grid_size

    @property
    def thetas(self) -> np.ndarray:
        return np.arange(self.grid_size) * self.step

    @property
    def table(self) -> np.ndarray:
        if self._table is None:
            log.debug("Computing {0}x{0} distance table, {1} comparison".format(
                self.grid_size, self.comparator.name))
            self._table = self.comparator.distance_table(self.thetas)

        return self._table

    def coincident_indices(self, guarded: bool) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Grid index pairs a < b whose projections coincide, ordered by distance.
        :param guarded: drop pairs within the resolution guard of each other
        :return: tuple, index arrays a and b, distances
        """
        a_idx, b_idx = np.nonzero(np.triu(self.table <= self.tolerance, k=1))
        if guarded:
            keep = self._separated(a_idx, b_idx)
            a_idx = a_idx[keep]
            b_idx = b_idx[keep]
        rms = self.table[a_idx, b_idx]
        order = np.lexsort((b_idx, a_idx, rms))

        return a_idx[order], b_idx[order], rms[order]

    def _separated(self, a_idx: np.ndarray, b_idx: np.ndarray) -> np.ndarray:
        steps = np.abs(b_idx - a_idx)

        return np.minimum(steps, self.grid_size - steps) > self.GUARD_STEPS

    def _pairs(self, a_idx: np.ndarray, b_idx: np.ndarray, rms: np.ndarray) -> List[CoincidencePair]:
        thetas = self.thetas

        return [CoincidencePair(thetas[a], thetas[b], d) for a, b, d in zip(a_idx, b_idx, rms)]

    def refine_candidates(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Grid index pairs a < b at local minima of the distance table which miss the
        tolerance but lie close enough to it for a coincidence between grid poses.
        :return: tuple, index arrays a and b, best first
        """
        if self._equations is None:
            return np.zeros(0, dtype=int), np.zeros(0, dtype=int)

        table = self.table
        threshold = self.tolerance + self.REFINE_STEPS * self.step * self._equations.scale
        minima = (table <= threshold) & (table > self.tolerance)
        for da in (-1, 0, 1):
            for db in (-1, 0, 1):
                if da or db:
                    minima &= table <= np.roll(table, (da, db), axis=(0, 1))
        a_idx, b_idx = np.nonzero(np.triu(minima, k=1))
        keep = self._separated(a_idx, b_idx)
        a_idx = a_idx[keep]
        b_idx = b_idx[keep]
        order = np.argsort(table[a_idx, b_idx], kind="stable")[:self.MAX_REFINE_CANDIDATES]

        return a_idx[order], b_idx[order]

    def matchings(self, theta1: float, theta2: float, limit: float) -> List[Tuple[int, ...]]:
        """
        Mass preserving permutations s moving every projected point i at theta1 within
        limit of point s(i) at theta2, at most MAX_MATCHINGS of them.
        """
        x1 = project_many(self.volume, [theta1])[0]
        x2 = project_many(self.volume, [theta2])[0]
        allowed = self._equations.same_mass() & (np.abs(x1[:, np.newaxis] - x2[np.newaxis, :]) <= limit)
        n = self.volume.n

        found = []
        def extend(prefix: List[int], used: List[bool]) -> None:
            if len(found) >= self.MAX_MATCHINGS:
                return
            i = len(prefix)
            if i == n:
                found.append(tuple(prefix))
                return
            for j in np.nonzero(allowed[i] & ~np.array(used))[0]:
                used[j] = True
                prefix.append(int(j))
                extend(prefix, used)
                prefix.pop()
                used[j] = False

        extend([], [False] * n)

        return found

    def _refine(self, theta1: float, theta2: float, limit: float) -> Optional[CoincidencePair]:
        for sigma in self.matchings(theta1, theta2, limit):
            t1, t2, worst = self._equations.polish(sigma, theta1, theta2)
            if not self._equations.is_solution(worst):
                continue
            t1 = canonical_angle(t1)
            t2 = canonical_angle(t2)
            if abs(float(wrap_angle(t2 - t1))) <= self.GUARD_STEPS * self.step:
                continue
            rms = self.comparator.distance(t1, t2)
            if rms > self.tolerance:
                continue

            return CoincidencePair(min(t1, t2), max(t1, t2), rms)

        return None

    def _grid_key(self, pair: CoincidencePair) -> Tuple[int, int]:
        a = int(round(pair.theta1 / self.step)) % self.grid_size
        b = int(round(pair.theta2 / self.step)) % self.grid_size

        return min(a, b), max(a, b)

    def refined_pairs(self) -> List[CoincidencePair]:
        """
        Coincidences between grid poses, one per grid cell not already holding a
        grid coincidence. Always empty when images are compared.
        """
        if self._refined is not None:
            return self._refined

        self._refined = []
        a_idx, b_idx = self.refine_candidates()
        if not len(a_idx):
            return self._refined

        grid_a, grid_b, _ = self.coincident_indices(guarded=True)
        seen = set(zip(grid_a.tolist(), grid_b.tolist()))
        limit = 2.0 * self.REFINE_STEPS * self.step * self._equations.scale
        thetas = self.thetas
        for a, b in zip(a_idx, b_idx):
            pair = self._refine(thetas[a], thetas[b], limit)
            if pair is None:
                continue
            key = self._grid_key(pair)
            if key in seen:
                continue
            seen.add(key)
            self._refined.append(pair)
        log.debug("Polished {} near misses into {} coincidences between grid poses".format(
            len(a_idx), len(self._refined)))

        return self._refined

    def coincidences(self, guarded: bool) -> List[CoincidencePair]:
        """
        Grid coincidences ordered by distance, followed by the ones between grid poses.
        """
        return self._pairs(*self.coincident_indices(guarded)) + self.refined_pairs()

    def find_coincidences(self) -> List[CoincidencePair]:
        return self.coincidences(guarded=False)

    def check_injectivity(self) -> CompatibilityVerdict:
        pairs = self.coincidences(guarded=True)
        verdict = CompatibilityVerdict(self.method, self.grid_size, self.tolerance,
                                       satisfies_injectivity=not pairs, coincidences=pairs)
        log.info("Injectivity at resolution {}: {}, {} coincidences".format(
            self.grid_size, verdict.satisfies_injectivity, len(pairs)))

        return verdict

    def rotation_shifts(self, rotation_count: int) -> np.ndarray:
        if int(rotation_count) != rotation_count or rotation_count < 8:
            raise InvalidArgumentError("Rotation count must be an integer >= 8, got {}!".format(rotation_count))

        shifts = np.round(np.arange(rotation_count) * self.grid_size / rotation_count).astype(int)

        return np.unique(shifts % self.grid_size)

    def check_star(self, rotation_count: int = DEFAULT_ROTATION_COUNT) -> CompatibilityVerdict:
        a_idx, b_idx, rms = self.coincident_indices(guarded=True)
        shifts = self.rotation_shifts(rotation_count)
        rotated_a = (a_idx[:, np.newaxis] + shifts[np.newaxis, :]) % self.grid_size
        rotated_b = (b_idx[:, np.newaxis] + shifts[np.newaxis, :]) % self.grid_size
        distances = self.table[rotated_a, rotated_b]

        pairs = self._pairs(a_idx, b_idx, rms)
        violations = []
        for pair_no, shift_no in zip(*np.nonzero(distances > self.tolerance)):
            violations.append(StarViolation(pairs[pair_no], shifts[shift_no] * self.step,
                                            distances[pair_no, shift_no]))

        # Poses between grid points are rotated off the table, compare their signatures directly
        rotations = shifts * self.step
        for pair in self.refined_pairs():
            sig1 = self.comparator.signatures(pair.theta1 + rotations)
            sig2 = self.comparator.signatures(pair.theta2 + rotations)
            off_grid = ComparatorBase.signature_distances(sig1, sig2).diagonal()
            for shift_no in np.nonzero(off_grid > self.tolerance)[0]:
                violations.append(StarViolation(pair, rotations[shift_no], off_grid[shift_no]))
        pairs = pairs + self.refined_pairs()

        verdict = CompatibilityVerdict(self.method, self.grid_size, self.tolerance,
                                       satisfies_star=not violations, satisfies_injectivity=not pairs,
                                       coincidences=pairs, star_violations=violations)
        log.info("Condition (*) at resolution {} with {} rotations: {}, {} violations".format(
            self.grid_size, len(shifts), verdict.satisfies_star, len(violations)))

        return verdict

    def preimages(self, index: int) -> np.ndarray:
        """
        All grid poses whose projection equals the projection at pose index.
        """
        return np.nonzero(self.table[:, index] <= self.tolerance)[0]

    def verify_group_action(self, sample_count: int, seed: int = 0, enforce_precondition: bool = True,
                            rotation_count: int = DEFAULT_ROTATION_COUNT) -> GroupActionReport:
        """
        Check the axioms of rho(R, P[S.V]) = P[R.S.V] on the image space.
        An image is acted on through every pose producing it, so a multi-valued rho
        shows up as a deviation.
        :param sample_count: number of random (theta_I, theta1, theta2) triples
        :param seed: seed of the generator drawing the triples
        :param enforce_precondition: refuse volumes failing (*)
        :return: report with worst deviations
        """
        if sample_count < 1:
            raise InvalidArgumentError("Need at least one sample, got {}!".format(sample_count))
        if enforce_precondition:
            verdict = self.check_star(rotation_count)
            if not verdict.satisfies_star:
                raise IncompatibleVolumeError(
                    "Volume fails condition (*), rho is not a group action on its images! First violation: {}".format(
                        verdict.star_violations[0]))

        rng = np.random.default_rng(seed)
        table = self.table
        identity_worst = 0.0
        compat_worst = 0.0
        max_preimages = 0
        for image_idx, k1, k2 in rng.integers(0, self.grid_size, size=(sample_count, 3)):
            pre = self.preimages(image_idx)
            max_preimages = max(max_preimages, len(pre))
            identity_worst = max(identity_worst, float(np.max(table[pre, image_idx])))

            # rho(theta2, rho(theta1, I))
            first = (pre + k1) % self.grid_size
            second = np.unique(np.concatenate([(self.preimages(j) + k2) % self.grid_size for j in first]))
            # rho(theta2 + theta1, I)
            direct = (pre + k1 + k2) % self.grid_size
            compat_worst = max(compat_worst, float(np.max(table[np.ix_(second, direct)])))

        report = GroupActionReport(sample_count, self.tolerance, identity_worst, compat_worst, max_preimages)
        log.info("Group action check: {}".format(report))

        return report


def find_coincidences(v: PointVolume, grid_size: int = GridOracle.DEFAULT_GRID_SIZE,
                      raster: Optional[RasterSettings] = None, tol: Optional[float] = None) -> List[CoincidencePair]:
    return GridOracle(v, grid_size, raster, tol).find_coincidences()


def check_injectivity(v: PointVolume, grid_size: int = GridOracle.DEFAULT_GRID_SIZE,
                      raster: Optional[RasterSettings] = None, tol: Optional[float] = None) -> CompatibilityVerdict:
    return GridOracle(v, grid_size, raster, tol).check_injectivity()


def check_star(v: PointVolume, grid_size: int = GridOracle.DEFAULT_GRID_SIZE,
               rotation_count: int = GridOracle.DEFAULT_ROTATION_COUNT,
               raster: Optional[RasterSettings] = None, tol: Optional[float] = None) -> CompatibilityVerdict:
    return GridOracle(v, grid_size, raster, tol).check_star(rotation_count)


def verify_group_action(v: PointVolume, sample_count: int = 100, raster: Optional[RasterSettings] = None,
                        tol: Optional[float] = None, grid_size: int = GridOracle.DEFAULT_GRID_SIZE,
                        seed: int = 0, enforce_precondition: bool = True) -> GroupActionReport:
    oracle = GridOracle(v, grid_size, raster, tol)

    return oracle.verify_group_action(sample_count, seed, enforce_precondition)


def stabilizer_angles(v: PointVolume, grid_size: int = GridOracle.DEFAULT_GRID_SIZE,
                      tol: float = 1e-9) -> List[float]:
    """
    Grid rotations mapping the volume onto itself, as point masses.
    :return: list of angles, always starting with 0
    """
    if v.dim != 2:
        raise UnsupportedDimensionError(v.dim)

    scale = max(1.0, v.domain_radius)
    mass_mismatch = np.abs(v.masses[:, np.newaxis] - v.masses[np.newaxis, :]) > tol * np.max(v.masses)
    angles = []
    for k in range(grid_size):
        theta = k * TWO_PI / grid_size
        c, s = math.cos(theta), math.sin(theta)
        moved = v.points @ np.array([[c, -s], [s, c]]).T
        cost = np.linalg.norm(moved[:, np.newaxis, :] - v.points[np.newaxis, :, :], axis=2)
        cost[mass_mismatch] = 4.0 * scale + 1.0
        rows, cols = linear_sum_assignment(cost)
        if np.max(cost[rows, cols]) <= tol * scale:
            angles.append(theta)

    return angles
