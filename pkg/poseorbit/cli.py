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

import os
import sys
import math
import argparse
from typing import Dict, List, Optional, Sequence, TextIO, Tuple
from .errors import PoseOrbitError, InvalidArgumentError
from .geometry import PointVolume, RasterSettings, VolumeReader, VolumeWriter
from .compatibility import GridOracle, AlgebraicSolver, CompatibilityVerdict, random_compatible_volume, \
    stabilizer_angles, volumes
from .dataset import Dataset, generate_dataset, save_dataset, load_dataset
from .vae import TrainingConfig, train_state, hyperparameter_search, save_model, load_model, save_training_state, \
    load_training_state, DEFAULT_DEPTHS, DEFAULT_WIDTHS
from .evaluation import PoseEvaluator, PoseReport, coincidence_gap, emit_plots
import logging

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2

COMMAND_GEN_VOLUME = "gen-volume"
COMMAND_CHECK_VOLUME = "check-volume"
COMMAND_GEN_DATASET = "gen-dataset"
COMMAND_TRAIN = "train"
COMMAND_EVAL = "eval"
COMMAND_REPRODUCE = "reproduce-fig3"
COMMAND_REPRODUCE_ALIASES = ["compare-volumes"]

SHAPE_RANDOM = "random"
HANDLER_NAME = "poseorbit-console"
DEFAULT_SEED = 1
MAX_GAP_PAIRS = 256


def _setup_logger(log_level_in: str) -> None:
    if log_level_in.upper() not in logging._nameToLevel:
        raise ValueError("Unkown logging level '{}'!".format(log_level_in))
    log_level = logging._nameToLevel[log_level_in.upper()]

    lib_log = logging.getLogger('poseorbit')
    lib_log.setLevel(log_level)
    if any(h.get_name() == HANDLER_NAME for h in lib_log.handlers):
        return

    log_formatter = logging.Formatter("%(asctime)s [%(threadName)-12.12s] [%(levelname)-5.5s]  %(message)s")
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(log_formatter)
    console_handler.set_name(HANDLER_NAME)
    lib_log.addHandler(console_handler)


class NegateAction(argparse.Action):
    """
    Argparse helper to enable --toggle / --non-toggle
    """

    def __call__(self, parser, ns, values, option):
        setattr(ns, self.dest, option[2:5] != 'non')


class RunConfig:
    """
    Fully resolved configuration of one invocation.
    """
    MANIFEST_SUFFIX = ".manifest"
    HIDDEN_KEYS = ("func",)

    def __init__(self, subcommand: str, options: Dict[str, object], seed: int, output_dir: str):
        self.subcommand = subcommand
        self.options = {k: v for k, v in options.items() if k not in self.HIDDEN_KEYS}
        self.seed = seed
        self.output_dir = output_dir

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> 'RunConfig':
        return cls(args.command, vars(args), args.seed, args.output_dir)

    @staticmethod
    def _format(value) -> str:
        if value is None:
            return "none"
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            return "{:.17g}".format(value)
        if isinstance(value, (list, tuple)):
            return " ".join(RunConfig._format(v) for v in value)

        return str(value)

    def manifest_lines(self) -> List[str]:
        resolved = dict(self.options)
        resolved['command'] = self.subcommand
        resolved['seed'] = self.seed
        resolved['output_dir'] = self.output_dir

        return ["{}={}".format(key, self._format(resolved[key])) for key in sorted(resolved)]

    @property
    def manifest_path(self) -> str:
        return os.path.join(self.output_dir, "{}{}".format(self.subcommand, self.MANIFEST_SUFFIX))

    def write_manifest(self) -> str:
        with open(self.manifest_path, "w", encoding="utf-8", newline="\n") as manifest:
            for line in self.manifest_lines():
                manifest.write("{}\n".format(line))

        return self.manifest_path

    def path(self, filename: str) -> str:
        return os.path.join(self.output_dir, filename)


def _raster(width: int, splat: Optional[float]) -> Optional[RasterSettings]:
    if splat is None:
        return None

    return RasterSettings(width, splat)


def _save_lines(lines: Sequence[str], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as report_file:
        for line in lines:
            report_file.write("{}\n".format(line))


def _verdict(volume: PointVolume, grid: int = GridOracle.DEFAULT_GRID_SIZE, tol: Optional[float] = None,
             rotations: int = GridOracle.DEFAULT_ROTATION_COUNT, raster: Optional[RasterSettings] = None,
             algebraic: bool = False) -> Tuple[CompatibilityVerdict, List[float]]:
    if algebraic:
        verdict = AlgebraicSolver(volume).check()  # type: CompatibilityVerdict
    else:
        verdict = GridOracle(volume, grid, raster, tol).check_star(rotations)

    return verdict, stabilizer_angles(volume, grid)


def verdict_lines(verdict: CompatibilityVerdict, stabilizer: Sequence[float]) -> List[str]:
    """
    :return: list of report lines, first line is the compatibility outcome
    """
    lines = ["compatible={}".format("true" if verdict.is_compatible else "false")]
    lines.extend(verdict.report_lines())
    lines.append("stabilizer_deg={}".format(" ".join("{:.6f}".format(math.degrees(a)) for a in stabilizer)))
    log.info("Volume verdict: star={} injective={}".format(verdict.satisfies_star, verdict.satisfies_injectivity))

    return lines


def check_volume(volume: PointVolume, grid: int = GridOracle.DEFAULT_GRID_SIZE, tol: Optional[float] = None,
                 rotations: int = GridOracle.DEFAULT_ROTATION_COUNT, raster: Optional[RasterSettings] = None,
                 algebraic: bool = False) -> List[str]:
    """
    Verdict report of a volume, with the stabilizer of its point masses on the grid.
    """
    return verdict_lines(*_verdict(volume, grid, tol, rotations, raster, algebraic))


def command_gen_volume(cfg: RunConfig, out: TextIO) -> int:
    opts = cfg.options
    if opts['shape'] == SHAPE_RANDOM:
        volume = random_compatible_volume(opts['n'], cfg.seed, opts['radius'])
    else:
        volume = volumes.REFERENCE_VOLUMES[opts['shape']]()

    path = opts['out'] or cfg.path("volume.txt")
    VolumeWriter(path).write(volume)
    print("volume={}".format(path), file=out)

    return EXIT_OK


def command_check_volume(cfg: RunConfig, out: TextIO) -> int:
    opts = cfg.options
    volume = VolumeReader(opts['volume']).read()
    lines = check_volume(volume, opts['grid'], opts['tol'], opts['rotations'], _raster(opts['width'], opts['splat']),
                         opts['algebraic'])
    for line in lines:
        print(line, file=out)
    if opts['out']:
        _save_lines(lines, opts['out'])

    return EXIT_OK if lines[0] == "compatible=true" else EXIT_NEGATIVE


def command_gen_dataset(cfg: RunConfig, out: TextIO) -> int:
    opts = cfg.options
    volume = VolumeReader(opts['volume']).read()
    dataset = generate_dataset(volume, opts['count'], opts['width'], opts['splat'], opts['noise'], cfg.seed,
                               opts['val_fraction'])
    stem = opts['out'] or cfg.path("dataset")
    save_dataset(dataset, stem)
    print("dataset={}".format(stem), file=out)

    return EXIT_OK


def _training_config(opts: Dict[str, object], seed: int) -> TrainingConfig:
    return TrainingConfig(opts['k'], opts['encoder_hidden'], opts['decoder_hidden'], opts['lr'], opts['batch_size'],
                          opts['epochs'], opts['restarts'], seed, opts['beta'])


def command_train(cfg: RunConfig, out: TextIO) -> int:
    opts = cfg.options
    dataset = load_dataset(opts['dataset'])
    config = _training_config(opts, cfg.seed)
    path = opts['out'] or cfg.path("model.ckpt")
    if opts['search'] and opts['resume']:
        raise InvalidArgumentError("Cannot resume a search!")
    if opts['search']:
        result = hyperparameter_search(dataset, config, opts['depths'], opts['widths'])
        save_model(result.model, path, result.config.settings())
        history = result.history
    else:
        resume = load_training_state(opts['resume']) if opts['resume'] else None
        state, history = train_state(dataset, config, resume)
        save_training_state(state, path, config.settings())
    if opts['history']:
        history.save_csv(opts['history'])
    else:
        history.write_csv(out)

    return EXIT_OK


def evaluate(model_path: str, dataset: Dataset, out_stem: str, max_error_deg: float, fold_grid: int,
             svg: bool) -> PoseReport:
    """
    Evaluate a checkpoint, write <out_stem>.txt and the plot files.
    """
    evaluator = PoseEvaluator(max_error_deg, fold_grid)
    report = evaluator.evaluate(load_model(model_path), dataset)
    _save_lines(report.report_lines(evaluator.max_error), "{}.txt".format(out_stem))
    emit_plots(report, dataset, out_stem, svg)

    return report


def command_eval(cfg: RunConfig, out: TextIO) -> int:
    opts = cfg.options
    dataset = load_dataset(opts['dataset'])
    stem = opts['out'] or cfg.path("report")
    report = evaluate(opts['model'], dataset, stem, opts['max_error_deg'], opts['fold_grid'], opts['svg'])
    max_error = math.radians(opts['max_error_deg'])
    for line in report.report_lines(max_error):
        print(line, file=out)

    return EXIT_OK if report.passed(max_error) else EXIT_NEGATIVE


def _flag(value: Optional[bool]) -> str:
    if value is None:
        return "none"

    return "true" if value else "false"


def _experiment(cfg: RunConfig, name: str, volume: PointVolume, config: TrainingConfig) -> Dict[str, str]:
    """
    Check, render, search, train and evaluate one volume inside <output-dir>/<name>/.
    :return: summary fields of the experiment
    """
    opts = cfg.options
    directory = cfg.path(name)
    os.makedirs(directory, exist_ok=True)
    log.info("Experiment '{}' into {}".format(name, directory))

    VolumeWriter(os.path.join(directory, "volume.txt")).write(volume)
    verdict, stabilizer = _verdict(volume, opts['grid'])
    _save_lines(verdict_lines(verdict, stabilizer), os.path.join(directory, "check.txt"))

    dataset = generate_dataset(volume, opts['count'], opts['width'], None, 0.0, cfg.seed)
    save_dataset(dataset, os.path.join(directory, "dataset"))
    result = hyperparameter_search(dataset, config, opts['depths'], opts['widths'])
    model_path = os.path.join(directory, "model.ckpt")
    save_model(result.model, model_path, result.config.settings())
    result.history.save_csv(os.path.join(directory, "history.csv"))

    report = evaluate(model_path, dataset, os.path.join(directory, "report"), opts['max_error_deg'],
                      PoseEvaluator.DEFAULT_FOLD_GRID, opts['svg'])
    max_error = math.radians(opts['max_error_deg'])
    gap = coincidence_gap(result.model, volume, verdict.coincidences[:MAX_GAP_PAIRS], RasterSettings(opts['width']))
    hidden = result.config.encoder_hidden

    return {
        'volume_compatible': _flag(verdict.is_compatible),
        'satisfies_star': _flag(verdict.satisfies_star),
        'satisfies_injectivity': _flag(verdict.satisfies_injectivity),
        'coincidence_pairs': str(len(verdict.coincidences)),
        'coincidence_gap_deg': "{:.3f}".format(math.degrees(gap)),
        'search_depth': str(len(hidden)),
        'search_width': str(hidden[0]) if hidden else "0",
        'reflection': str(report.g),
        'median_error_deg': "{:.3f}".format(math.degrees(report.median_error)),
        'mean_error_deg': "{:.3f}".format(math.degrees(report.mean_error)),
        'fold_score_deg': "{:.3f}".format(math.degrees(report.fold_score)) if report.fold_score is not None
        else "none",
        'spearman': "{:.4f}".format(report.spearman),
        'best_val_loss': "{:.4f}".format(result.history.best.final_val_loss),
        'pose_inference': "passed" if report.passed(max_error) else "failed",
    }


def summary_lines(compatible: Dict[str, str], incompatible: Dict[str, str]) -> List[str]:
    row = "{:<24} {:>14} {:>14}"
    lines = [row.format("", "compatible", "incompatible")]
    for key in compatible:
        lines.append(row.format(key, compatible[key], incompatible[key]))

    return lines


def command_reproduce(cfg: RunConfig, out: TextIO) -> int:
    """
    The same pipeline on a seeded compatible volume and on a mirror-symmetric one.
    Success means the first is injective and passes pose inference,
    the second breaks (*) and fails it.
    """
    opts = cfg.options
    config = _training_config(opts, cfg.seed)
    compatible = _experiment(cfg, "compatible", random_compatible_volume(opts['n'], cfg.seed), config)
    incompatible = _experiment(cfg, "incompatible", volumes.mirror_triple(), config)

    lines = summary_lines(compatible, incompatible)
    _save_lines(lines, cfg.path("summary.txt"))
    for line in lines:
        print(line, file=out)

    expected = (compatible['satisfies_injectivity'] == "true" and compatible['pose_inference'] == "passed" and
                incompatible['satisfies_star'] == "false" and incompatible['pose_inference'] == "failed")

    return EXIT_OK if expected else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=DEFAULT_SEED,
                        help="Seed of every random draw. Default: {}".format(DEFAULT_SEED))
    common.add_argument('--output-dir', default=".",
                        help="Directory for manifest and default outputs. Default: current directory")
    common.add_argument('--log-level', default="WARNING",
                        help='Set logging level. Python default is: WARNING')

    training = argparse.ArgumentParser(add_help=False)
    training.add_argument('--k', type=int, default=TrainingConfig.DEFAULT_K,
                          help="Irreducible representation frequencies. Default: {}".format(TrainingConfig.DEFAULT_K))
    training.add_argument('--encoder-hidden', type=int, nargs='+', default=list(TrainingConfig.DEFAULT_HIDDEN),
                          help="Encoder hidden widths. Default: {}".format(list(TrainingConfig.DEFAULT_HIDDEN)))
    training.add_argument('--decoder-hidden', type=int, nargs='+', default=list(TrainingConfig.DEFAULT_HIDDEN),
                          help="Decoder hidden widths. Default: {}".format(list(TrainingConfig.DEFAULT_HIDDEN)))
    training.add_argument('--lr', type=float, default=TrainingConfig.DEFAULT_LR,
                          help="Adam learning rate. Default: {}".format(TrainingConfig.DEFAULT_LR))
    training.add_argument('--batch-size', type=int, default=TrainingConfig.DEFAULT_BATCH,
                          help="Minibatch size. Default: {}".format(TrainingConfig.DEFAULT_BATCH))
    training.add_argument('--epochs', type=int, default=TrainingConfig.DEFAULT_EPOCHS,
                          help="Epochs per restart. Default: {}".format(TrainingConfig.DEFAULT_EPOCHS))
    training.add_argument('--restarts', type=int, default=TrainingConfig.DEFAULT_RESTARTS,
                          help="Independently seeded restarts. Default: {}".format(TrainingConfig.DEFAULT_RESTARTS))
    training.add_argument('--beta', type=float, default=TrainingConfig.DEFAULT_BETA,
                          help="KL weight. Default: {}".format(TrainingConfig.DEFAULT_BETA))
    training.add_argument('--depths', type=int, nargs='+', default=list(DEFAULT_DEPTHS),
                          help="Hidden depths tried by the search. Default: {}".format(list(DEFAULT_DEPTHS)))
    training.add_argument('--widths', type=int, nargs='+', default=list(DEFAULT_WIDTHS),
                          help="Hidden widths tried by the search. Default: {}".format(list(DEFAULT_WIDTHS)))

    parser = argparse.ArgumentParser(description='Projection compatibility checks and SO(2) pose inference')
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    cmd = commands.add_parser(COMMAND_GEN_VOLUME, parents=[common], help="Write a point volume")
    cmd.add_argument('--n', type=int, default=3, help="Points of a random compatible volume. Default: 3")
    cmd.add_argument('--shape', default=SHAPE_RANDOM, choices=[SHAPE_RANDOM] + sorted(volumes.REFERENCE_VOLUMES),
                     help="Random compatible volume or a reference volume. Default: {}".format(SHAPE_RANDOM))
    cmd.add_argument('--radius', type=float, default=1.0, help="Domain radius of a random volume. Default: 1.0")
    cmd.add_argument('--out', help="Volume file. Default: volume.txt in output directory")
    cmd.set_defaults(func=command_gen_volume)

    cmd = commands.add_parser(COMMAND_CHECK_VOLUME, parents=[common], help="Check conditions (*) and (**)")
    cmd.add_argument('--volume', required=True, help="Volume file")
    cmd.add_argument('--grid', type=int, default=GridOracle.DEFAULT_GRID_SIZE,
                     help="Grid size. Default: {}".format(GridOracle.DEFAULT_GRID_SIZE))
    cmd.add_argument('--tol', type=float,
                     help="Coincidence tolerance. Default: 1e-6 exact, 1e-3 with --splat")
    cmd.add_argument('--rotations', type=int, default=GridOracle.DEFAULT_ROTATION_COUNT,
                     help="Third rotations tried for (*). Default: {}".format(GridOracle.DEFAULT_ROTATION_COUNT))
    cmd.add_argument('--splat', type=float,
                     help="Compare rendered images with this splat instead of exact projections")
    cmd.add_argument('--width', type=int, default=RasterSettings.DEFAULT_WIDTH,
                     help="Image width with --splat. Default: {}".format(RasterSettings.DEFAULT_WIDTH))
    cmd.add_argument('--algebraic', action='store_true', default=False,
                     help="Solve for coincidences per permutation instead of the grid")
    cmd.add_argument('--out', help="(optional) Also write the report into this file")
    cmd.set_defaults(func=command_check_volume)

    cmd = commands.add_parser(COMMAND_GEN_DATASET, parents=[common], help="Render a pose dataset")
    cmd.add_argument('--volume', required=True, help="Volume file")
    cmd.add_argument('--count', type=int, default=Dataset.DEFAULT_COUNT,
                     help="Samples. Default: {}".format(Dataset.DEFAULT_COUNT))
    cmd.add_argument('--width', type=int, default=RasterSettings.DEFAULT_WIDTH,
                     help="Image width. Default: {}".format(RasterSettings.DEFAULT_WIDTH))
    cmd.add_argument('--splat', type=float,
                     help="Splat sigma, 0 for nearest pixel. Default: {} of domain radius".format(
                         RasterSettings.DEFAULT_SPLAT_FRACTION))
    cmd.add_argument('--noise', type=float, default=0.0, help="Pixel noise sigma. Default: 0")
    cmd.add_argument('--val-fraction', type=float, default=Dataset.DEFAULT_VAL_FRACTION,
                     help="Validation fraction. Default: {}".format(Dataset.DEFAULT_VAL_FRACTION))
    cmd.add_argument('--out', help="Dataset stem. Default: dataset in output directory")
    cmd.set_defaults(func=command_gen_dataset)

    cmd = commands.add_parser(COMMAND_TRAIN, parents=[common, training], help="Train the VAE")
    cmd.add_argument('--dataset', required=True, help="Dataset stem")
    cmd.add_argument('--search', action='store_true', default=False,
                     help="Search encoder and decoder depth and width instead of the given hidden widths")
    cmd.add_argument('--resume', help="Continue training from this checkpoint up to --epochs")
    cmd.add_argument('--history', help="Loss history CSV file. Default: stdout")
    cmd.add_argument('--out', help="Checkpoint. Default: model.ckpt in output directory")
    cmd.set_defaults(func=command_train)

    cmd = commands.add_parser(COMMAND_EVAL, parents=[common], help="Evaluate inferred poses")
    cmd.add_argument('--model', required=True, help="Checkpoint")
    cmd.add_argument('--dataset', required=True, help="Dataset stem")
    cmd.add_argument('--max-error-deg', type=float, default=PoseEvaluator.DEFAULT_MAX_ERROR_DEG,
                     help="Pass threshold of median error. Default: {}".format(PoseEvaluator.DEFAULT_MAX_ERROR_DEG))
    cmd.add_argument('--fold-grid', type=int, default=PoseEvaluator.DEFAULT_FOLD_GRID,
                     help="Fold axes tried. Default: {}".format(PoseEvaluator.DEFAULT_FOLD_GRID))
    cmd.add_argument('--svg', '--non-svg', dest='svg', action=NegateAction, nargs=0, default=True,
                     help="Render SVG plots. Default: render")
    cmd.add_argument('--out', help="Report stem. Default: report in output directory")
    cmd.set_defaults(func=command_eval)

    cmd = commands.add_parser(COMMAND_REPRODUCE, aliases=COMMAND_REPRODUCE_ALIASES, parents=[common, training],
                              help="Compatible against incompatible volume, end to end")
    cmd.add_argument('--n', type=int, default=3, help="Points of the compatible volume. Default: 3")
    cmd.add_argument('--count', type=int, default=Dataset.DEFAULT_COUNT,
                     help="Samples per dataset. Default: {}".format(Dataset.DEFAULT_COUNT))
    cmd.add_argument('--width', type=int, default=RasterSettings.DEFAULT_WIDTH,
                     help="Image width. Default: {}".format(RasterSettings.DEFAULT_WIDTH))
    cmd.add_argument('--max-error-deg', type=float, default=PoseEvaluator.DEFAULT_MAX_ERROR_DEG,
                     help="Pass threshold of median error. Default: {}".format(PoseEvaluator.DEFAULT_MAX_ERROR_DEG))
    cmd.add_argument('--svg', '--non-svg', dest='svg', action=NegateAction, nargs=0, default=True,
                     help="Render SVG plots. Default: render")
    cmd.add_argument('--grid', type=int, default=GridOracle.DEFAULT_GRID_SIZE,
                     help="Grid size of the volume checks. Default: {}".format(GridOracle.DEFAULT_GRID_SIZE))
    cmd.set_defaults(func=command_reproduce, command=COMMAND_REPRODUCE)

    return parser


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    """
    Run one subcommand.
    :return: exit code, 0 success, 1 negative outcome, 2 error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    if out is None:
        out = sys.stdout

    try:
        _setup_logger(args.log_level)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_ERROR

    cfg = RunConfig.from_args(args)
    log.info("Starting {} ...".format(cfg.subcommand))
    try:
        os.makedirs(cfg.output_dir, exist_ok=True)
        cfg.write_manifest()
        return args.func(cfg, out)
    except (PoseOrbitError, ValueError, OSError) as exc:
        log.error("{} failed: {}".format(cfg.subcommand, exc))
        return EXIT_ERROR
