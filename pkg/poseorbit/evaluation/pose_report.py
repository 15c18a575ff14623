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
from typing import Dict, List, Optional, Sequence, Tuple
import numpy as np
from scipy.stats import spearmanr
from ..compatibility import CoincidencePair
from ..dataset import Dataset
from ..errors import InvalidArgumentError, InsufficientDataError
from ..geometry import RasterSettings, PointVolume, render_poses, wrap_angle, TWO_PI
from ..vae import VaeModel
import logging

log = logging.getLogger(__name__)

PosePairs = Sequence[Tuple[float, float]]

FOLD_MIN_PAIRS = 8
FOLD_SLOPE_STARTS = (0.0, 1.0, -1.0, 2.0, -2.0)
FOLD_ITERATIONS = 20


def _pair_arrays(pairs: PosePairs, minimum: int) -> Tuple[np.ndarray, np.ndarray]:
    table = np.asarray(pairs, dtype=np.float64).reshape(-1, 2)
    if table.shape[0] < minimum:
        raise InsufficientDataError("Need at least {} pose pairs, got {}!".format(minimum, table.shape[0]))

    return table[:, 0], table[:, 1]


def circular_mean(angles: np.ndarray) -> float:
    """
    Direction of the mean unit vector. 0 for a vanishing mean vector.
    """
    s = float(np.mean(np.sin(angles)))
    c = float(np.mean(np.cos(angles)))
    if math.hypot(s, c) < 1e-15:
        return 0.0

    return math.atan2(s, c)


class FoldFit:
    """
    Best folded model theta_est = slope * |wrap(theta_true - axis)| + offset.
    """

    def __init__(self, axis: float, slope: float, offset: float, median_error: float):
        self.axis = axis
        self.slope = slope
        self.offset = offset
        self.median_error = median_error

    def __str__(self) -> str:
        return "axis {:.2f} deg, slope {:.3f}, offset {:.2f} deg, median error {:.3f} deg".format(
            math.degrees(self.axis), self.slope, math.degrees(self.offset), math.degrees(self.median_error))


class PoseReport:
    """
    Estimated poses aligned to the true ones by theta_est ~ g * theta_true + c.
    table rows are (theta_true, theta_est, residual), residual in [-pi, pi).
    """

    def __init__(self, g: int, c: float, median_error: float, mean_error: float, table: np.ndarray,
                 spearman: float, errors_by_class: Dict[int, float], fold_score: Optional[float] = None,
                 fold_fit: Optional[FoldFit] = None):
        if g not in (1, -1):
            raise InvalidArgumentError("Reflection class must be +1 or -1, got {}!".format(g))
        self.g = g
        self.c = c
        self.median_error = median_error
        self.mean_error = mean_error
        self.table = table
        self.spearman = spearman
        self.errors_by_class = errors_by_class
        self.fold_score = fold_score
        self.fold_fit = fold_fit

    @property
    def count(self) -> int:
        return self.table.shape[0]

    @property
    def reflected(self) -> bool:
        return self.g == -1

    @property
    def aligned_estimates(self) -> np.ndarray:
        """
        Estimates mapped back onto the true pose axis, unwrapped next to the true pose.
        """
        return self.table[:, 0] + self.table[:, 2] * self.g

    def passed(self, max_error: float) -> bool:
        return self.median_error <= max_error

    def report_lines(self, max_error: Optional[float] = None) -> List[str]:
        lines = [
            "samples={}".format(self.count),
            "reflection={}".format(self.g),
            "offset_deg={:.6f}".format(math.degrees(self.c)),
            "median_error_deg={:.6f}".format(math.degrees(self.median_error)),
            "mean_error_deg={:.6f}".format(math.degrees(self.mean_error)),
            "spearman={:.6f}".format(self.spearman),
        ]
        if self.fold_score is not None:
            lines.append("fold_score_deg={:.6f}".format(math.degrees(self.fold_score)))
        if self.fold_fit is not None:
            lines.append("fold_axis_deg={:.6f}".format(math.degrees(self.fold_fit.axis)))
            lines.append("fold_slope={:.6f}".format(self.fold_fit.slope))
        if max_error is not None:
            lines.append("max_error_deg={:.6f}".format(math.degrees(max_error)))
            lines.append("passed={}".format("true" if self.passed(max_error) else "false"))

        return lines

    def __str__(self) -> str:
        return "g={} c={:.2f} deg median error {:.3f} deg".format(self.g, math.degrees(self.c),
                                                                  math.degrees(self.median_error))


def infer_poses(model: VaeModel, dataset: Dataset, chunk: int = 256) -> List[Tuple[float, float]]:
    """
    Posterior mean pose of every sample, in dataset order.
    :return: list of (theta_true, theta_est)
    """
    if model.width != dataset.width:
        raise InvalidArgumentError("Model takes images of width {}, dataset has {}!".format(
            model.width, dataset.width))

    estimates = []
    for start in range(0, dataset.count, chunk):
        _, mu, _ = model.encode_batch(dataset.pixels[start:start + chunk])
        estimates.append(mu)
    est = np.concatenate(estimates)

    return [(float(t), float(e)) for t, e in zip(dataset.thetas, est)]


def _one_to_one(t: np.ndarray, e: np.ndarray, g: int) -> Tuple[float, np.ndarray]:
    c = circular_mean(wrap_angle(e - g * t))
    residual = wrap_angle(e - g * t - c)

    return c, residual


def align_poses(pairs: PosePairs, fold_grid: int = 360) -> PoseReport:
    """
    Fit theta_est = g * theta_true + c for both reflection classes, keep the one with the lower
    median circular error. Ties go to g = +1.
    Fold score is filled in when there are enough pairs for it.
    """
    t, e = _pair_arrays(pairs, 2)

    fits = {}
    for g in (1, -1):
        c, residual = _one_to_one(t, e, g)
        fits[g] = (c, residual, float(np.median(np.abs(residual))))
    g = -1 if fits[-1][2] < fits[1][2] else 1
    c, residual, median_error = fits[g]

    aligned = t + g * residual
    if np.ptp(aligned) > 0.0 and np.ptp(t) > 0.0:
        rho = float(spearmanr(t, aligned)[0])
    else:
        rho = 0.0
    table = np.column_stack([t, e, residual])

    report = PoseReport(g, float(wrap_angle(c)), median_error, float(np.mean(np.abs(residual))), table,
                        rho, {k: v[2] for k, v in fits.items()})
    if t.shape[0] >= FOLD_MIN_PAIRS:
        fit = fit_fold(pairs, fold_grid)
        report.fold_fit = fit
        report.fold_score = _one_to_one_error(t, e, fits) - fit.median_error

    return report


def _one_to_one_error(t: np.ndarray, e: np.ndarray, fits) -> float:
    """
    Best median error of the one-to-one family, constants included.
    """
    constant = float(np.median(np.abs(wrap_angle(e - circular_mean(e)))))

    return min(fits[1][2], fits[-1][2], constant)


def fit_fold(pairs: PosePairs, grid_size: int = 360) -> FoldFit:
    """
    Circular least squares fit of theta_est = b * |wrap(theta_true - a)| + c for every
    fold axis a on the grid, Gauss-Newton from a few slope starts.
    The sign of b carries the reflection class.
    """
    t, e = _pair_arrays(pairs, FOLD_MIN_PAIRS)
    if int(grid_size) != grid_size or grid_size < 1:
        raise InvalidArgumentError("Fold axis grid needs at least one axis, got {}!".format(grid_size))

    axes = np.arange(grid_size) * (TWO_PI / grid_size)
    x = np.abs(wrap_angle(t[np.newaxis, :] - axes[:, np.newaxis]))  # (G, n)
    n = t.shape[0]
    sx = x.sum(axis=1)
    sxx = (x * x).sum(axis=1)
    det = n * sxx - sx * sx
    solvable = det > 1e-12 * n * n

    best = None
    for start in FOLD_SLOPE_STARTS:
        start_b = np.full(grid_size, start)
        shifted = e - start * x
        start_c = np.arctan2(np.mean(np.sin(shifted), axis=1), np.mean(np.cos(shifted), axis=1))
        start_medians = _fold_medians(e, x, start_b, start_c)

        b = start_b
        c = start_c
        for _ in range(FOLD_ITERATIONS):
            r = wrap_angle(e - b[:, np.newaxis] * x - c[:, np.newaxis])
            sr = r.sum(axis=1)
            sxr = (x * r).sum(axis=1)
            safe = np.where(solvable, det, 1.0)
            b = b + np.where(solvable, (n * sxr - sx * sr) / safe, 0.0)
            c = c + np.where(solvable, (sxx * sr - sx * sxr) / safe, sr / n)
        medians = _fold_medians(e, x, b, c)

        # Iterating may diverge on wrapped residuals, fall back to the start
        worse = medians > start_medians
        medians = np.where(worse, start_medians, medians)
        b = np.where(worse, start_b, b)
        c = np.where(worse, start_c, c)

        idx = int(np.argmin(medians))
        if best is None or medians[idx] < best.median_error:
            best = FoldFit(float(axes[idx]), float(b[idx]), float(wrap_angle(c[idx])), float(medians[idx]))

    return best


def _fold_medians(e: np.ndarray, x: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return np.median(np.abs(wrap_angle(e - b[:, np.newaxis] * x - c[:, np.newaxis])), axis=1)


def fold_score(pairs: PosePairs, grid_size: int = 360) -> float:
    """
    Best one-to-one median error minus best folded median error.
    Positive when a V-shaped map explains the estimates better than any rotation or reflection.
    """
    t, e = _pair_arrays(pairs, FOLD_MIN_PAIRS)
    fits = {}
    for g in (1, -1):
        c, residual = _one_to_one(t, e, g)
        fits[g] = (c, residual, float(np.median(np.abs(residual))))

    return _one_to_one_error(t, e, fits) - fit_fold(pairs, grid_size).median_error


def coincidence_gap(model: VaeModel, volume: PointVolume, pairs: Sequence[CoincidencePair],
                    raster: RasterSettings) -> float:
    """
    Largest circular distance between the estimates of the two poses of a coincidence pair.
    Zero up to rounding for any deterministic encoder.
    """
    if not pairs:
        return 0.0
    settings = raster.resolved(volume)
    first = render_poses(volume, [p.theta1 for p in pairs], settings)
    second = render_poses(volume, [p.theta2 for p in pairs], settings)
    _, mu1, _ = model.encode_batch(first)
    _, mu2, _ = model.encode_batch(second)

    return float(np.max(np.abs(wrap_angle(mu1 - mu2))))


class PoseEvaluator:
    DEFAULT_MAX_ERROR_DEG = 15.0
    DEFAULT_FOLD_GRID = 360

    def __init__(self, max_error_deg: float = DEFAULT_MAX_ERROR_DEG, fold_grid: int = DEFAULT_FOLD_GRID):
        if not 0.0 < max_error_deg <= 180.0:
            raise InvalidArgumentError("Error threshold must be in (0, 180] degrees, got {}!".format(max_error_deg))
        self.max_error_deg = float(max_error_deg)
        self.fold_grid = int(fold_grid)

    @property
    def max_error(self) -> float:
        return math.radians(self.max_error_deg)

    def evaluate(self, model: VaeModel, dataset: Dataset) -> PoseReport:
        pairs = infer_poses(model, dataset)
        report = align_poses(pairs, self.fold_grid)
        log.info("Pose report: {}, {}".format(report, "passed" if report.passed(self.max_error) else "failed"))

        return report

    def passed(self, report: PoseReport) -> bool:
        return report.passed(self.max_error)


def evaluate_model(model: VaeModel, dataset: Dataset,
                   max_error_deg: float = PoseEvaluator.DEFAULT_MAX_ERROR_DEG) -> Tuple[PoseReport, bool]:
    """
    Infer, align, score folding and judge.
    :return: tuple, report and whether median error is within max_error_deg
    """
    evaluator = PoseEvaluator(max_error_deg)
    report = evaluator.evaluate(model, dataset)

    return report, evaluator.passed(report)
