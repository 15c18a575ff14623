import csv
import math
import os
from typing import List
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
from ..dataset import Dataset
from ..errors import InvalidArgumentError
from ..geometry import TWO_PI
from .pose_report import PoseReport
import logging

log = logging.getLogger(__name__)

FLOAT_FORMAT = "{:.17g}"
# Text stays text and element ids don't change between runs
PLOT_STYLE = {
    'svg.fonttype': 'none',
    'svg.hashsalt': 'poseorbit',
    'figure.figsize': (5.0, 4.5),
    'axes.grid': True,
    'grid.alpha': 0.3,
}
LATENT_TITLE = "Latent SO(2)"
POSES_TITLE = "True vs estimated pose"


def _write_csv(path: str, header: List[str], rows) -> None:
    with open(path, "w", newline="") as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([FLOAT_FORMAT.format(v) if isinstance(v, float) else v for v in row])


def _true_degrees(report: PoseReport) -> np.ndarray:
    return np.degrees(np.mod(report.table[:, 0], TWO_PI))


def latent_figure(report: PoseReport):
    """
    Estimated poses on the latent circle, colored by true pose.
    """
    fig, ax = plt.subplots()
    circle = np.linspace(0.0, TWO_PI, 361)
    ax.plot(np.cos(circle), np.sin(circle), color="gray", linewidth=0.8)
    estimates = report.table[:, 1]
    points = ax.scatter(np.cos(estimates), np.sin(estimates), c=_true_degrees(report), cmap="hsv", vmin=0.0,
                        vmax=360.0, s=8)
    fig.colorbar(points, ax=ax, label="true pose [deg]")
    ax.set_aspect("equal")
    ax.set_xlim(-1.2, 1.2)
    ax.set_ylim(-1.2, 1.2)
    ax.set_xlabel("cos")
    ax.set_ylabel("sin")
    ax.set_title(LATENT_TITLE)

    return fig


def poses_figure(report: PoseReport):
    """
    True against estimated pose, both axes in [0, 360) degrees.
    """
    fig, ax = plt.subplots()
    true_deg = _true_degrees(report)
    est_deg = np.degrees(np.mod(report.table[:, 1], TWO_PI))
    ax.scatter(true_deg, est_deg, c=true_deg, cmap="hsv", vmin=0.0, vmax=360.0, s=8)
    ax.set_xlim(0.0, 360.0)
    ax.set_ylim(0.0, 360.0)
    ax.set_xticks(np.arange(0, 361, 90))
    ax.set_yticks(np.arange(0, 361, 90))
    ax.set_xlabel("true pose [deg]")
    ax.set_ylabel("estimated pose [deg]")
    ax.set_title(POSES_TITLE)

    return fig


def _save_figure(fig, path: str) -> None:
    fig.savefig(path, format="svg", metadata={'Date': None})
    plt.close(fig)


def emit_plots(report: PoseReport, dataset: Dataset, out_stem: str, svg: bool = True) -> List[str]:
    """
    Write plot data of a pose report.
    <out_stem>_latent.csv: cos and sin of the estimate, true pose, split
    <out_stem>_poses.csv: true pose, estimate, aligned estimate, residual
    and with svg the two matching figures.
    :return: list of written paths
    """
    if report.count != dataset.count:
        raise InvalidArgumentError("Report has {} samples, dataset {}!".format(report.count, dataset.count))
    out_dir = os.path.dirname(out_stem)
    if out_dir and not os.path.isdir(out_dir):
        raise FileNotFoundError("Output directory '{}' doesn't exist!".format(out_dir))

    split = dataset.split
    aligned = report.aligned_estimates
    paths = []

    latent_path = "{}_latent.csv".format(out_stem)
    _write_csv(latent_path, ['cos_est', 'sin_est', 'theta_true', 'split'],
               ((math.cos(e), math.sin(e), float(t), s) for (t, e, _), s in zip(report.table, split)))
    paths.append(latent_path)

    poses_path = "{}_poses.csv".format(out_stem)
    _write_csv(poses_path, ['theta_true', 'theta_est', 'theta_aligned', 'residual'],
               ((float(t), float(e), float(a), float(r)) for (t, e, r), a in zip(report.table, aligned)))
    paths.append(poses_path)

    if svg:
        with plt.rc_context(PLOT_STYLE):
            for name, build in (("latent", latent_figure), ("poses", poses_figure)):
                path = "{}_{}.svg".format(out_stem, name)
                _save_figure(build(report), path)
                paths.append(path)
    log.debug("Wrote plots: {}".format(", ".join(paths)))

    return paths
