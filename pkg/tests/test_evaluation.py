import csv
import math
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from lxml import etree

from poseorbit.errors import InvalidArgumentError, InsufficientDataError
from poseorbit.geometry import RasterSettings, TWO_PI, wrap_angle
from poseorbit.compatibility import find_coincidences, volumes
from poseorbit.dataset import generate_dataset
from poseorbit.vae import VaeModel, TrainingConfig, train
from poseorbit.evaluation import PoseReport, PoseEvaluator, infer_poses, align_poses, fit_fold, fold_score, \
    coincidence_gap, circular_mean, evaluate_model, emit_plots
from poseorbit.evaluation.plots import LATENT_TITLE, POSES_TITLE

TRUE_POSES = np.arange(72) * (TWO_PI / 72)


def _pairs(estimates) -> list:
    return list(zip(TRUE_POSES, np.mod(estimates, TWO_PI)))


def _folded(slope: float = 2.0) -> np.ndarray:
    return slope * np.abs(wrap_angle(TRUE_POSES - math.pi))


@pytest.fixture
def tiny_model():
    return VaeModel(8, k=2, encoder_hidden=(6,), decoder_hidden=(6,), seed=1)


@pytest.fixture
def tiny_dataset():
    return generate_dataset(volumes.asymmetric_triple(), count=30, width=8, seed=2, val_fraction=0.2)


def test_circular_mean():
    assert circular_mean(np.array([0.1, -0.1])) == pytest.approx(0.0)
    assert circular_mean(np.array([2.0, 2.2])) == pytest.approx(2.1)
    assert circular_mean(np.array([0.0, math.pi])) == 0.0


def test_align_rotation():
    report = align_poses(_pairs(TRUE_POSES + 1.0))
    assert report.g == 1
    assert not report.reflected
    assert report.c == pytest.approx(1.0)
    assert report.median_error < 1e-9
    assert report.spearman == pytest.approx(1.0)
    assert report.count == 72
    assert np.allclose(report.aligned_estimates, TRUE_POSES)


def test_align_reflection():
    report = align_poses(_pairs(0.5 - TRUE_POSES))
    assert report.g == -1
    assert report.reflected
    assert report.c == pytest.approx(0.5)
    assert report.median_error < 1e-9
    assert report.errors_by_class[1] > math.radians(30.0)


def test_tie_goes_to_rotation():
    report = align_poses([(0.0, 0.0), (0.0, 0.0)])
    assert report.g == 1
    assert report.spearman == 0.0
    assert report.fold_score is None


@given(st.floats(min_value=0.0, max_value=TWO_PI), st.sampled_from([1, -1]),
       st.floats(min_value=0.0, max_value=TWO_PI))
@settings(max_examples=25, deadline=None)
def test_alignment_is_rotation_invariant(offset, g, shift):
    noise = np.random.default_rng(0).normal(0.0, 0.02, size=TRUE_POSES.shape)
    t = np.mod(TRUE_POSES + shift, TWO_PI)
    e = np.mod(g * t + offset + noise, TWO_PI)
    report = align_poses(list(zip(t, e)))
    assert report.g == g
    assert abs(float(wrap_angle(report.c - offset))) < 0.01
    assert report.median_error < 0.05


def test_noisy_alignment_errors():
    noise = np.random.default_rng(3).normal(0.0, 0.1, size=TRUE_POSES.shape)
    report = align_poses(_pairs(TRUE_POSES + 2.0 + noise))
    assert report.g == 1
    assert report.median_error == pytest.approx(np.median(np.abs(report.table[:, 2])))
    assert report.mean_error >= 0.0
    assert np.all((report.table[:, 2] >= -math.pi) & (report.table[:, 2] < math.pi))


def test_fold_detected():
    pairs = _pairs(_folded())
    fit = fit_fold(pairs)
    assert fit.median_error < 1e-6
    assert abs(fit.slope) == pytest.approx(2.0)

    score = fold_score(pairs)
    assert score > math.radians(30.0)
    report = align_poses(pairs)
    assert report.fold_score == pytest.approx(score)
    assert report.median_error > math.radians(30.0)


def test_fold_score_of_one_to_one_maps():
    assert fold_score(_pairs(TRUE_POSES + 0.7)) <= 0.0
    assert fold_score(_pairs(-TRUE_POSES)) <= 0.0
    assert abs(fold_score(_pairs(np.full(72, 1.2)))) < 1e-9


def test_too_few_pairs():
    with pytest.raises(InsufficientDataError):
        align_poses([(0.0, 0.0)])
    with pytest.raises(InsufficientDataError):
        fold_score(_pairs(TRUE_POSES)[:7])
    with pytest.raises(InvalidArgumentError):
        fit_fold(_pairs(TRUE_POSES), grid_size=0)
    assert align_poses(_pairs(TRUE_POSES)[:7]).fold_score is None


def test_report_lines():
    report = align_poses(_pairs(TRUE_POSES + 0.01))
    lines = report.report_lines(math.radians(15.0))
    assert "samples=72" in lines
    assert "reflection=1" in lines
    assert "passed=true" in lines
    assert any(line.startswith("fold_score_deg=") for line in lines)

    with pytest.raises(InvalidArgumentError):
        PoseReport(0, 0.0, 0.0, 0.0, report.table, 1.0, {})


def test_infer_poses(tiny_model, tiny_dataset):
    pairs = infer_poses(tiny_model, tiny_dataset, chunk=7)
    assert len(pairs) == 30
    assert [t for t, _ in pairs] == list(tiny_dataset.thetas)
    _, mu, _ = tiny_model.encode_batch(tiny_dataset.pixels)
    assert np.allclose([e for _, e in pairs], mu)

    with pytest.raises(InvalidArgumentError):
        infer_poses(VaeModel(16, k=2, encoder_hidden=(4,), decoder_hidden=(4,)), tiny_dataset)


def test_evaluate_model(tiny_model, tiny_dataset):
    report, passed = evaluate_model(tiny_model, tiny_dataset)
    assert report.count == 30
    assert report.fold_score is not None
    assert passed == (report.median_error <= math.radians(15.0))

    evaluator = PoseEvaluator(180.0)
    assert evaluator.passed(evaluator.evaluate(tiny_model, tiny_dataset))
    with pytest.raises(InvalidArgumentError):
        PoseEvaluator(0.0)


def test_coincident_poses_get_one_estimate(tiny_model):
    volume = volumes.mirror_triple()
    pairs = find_coincidences(volume, grid_size=72)
    assert pairs
    gap = coincidence_gap(tiny_model, volume, pairs, RasterSettings(8))
    assert gap < 1e-6
    assert coincidence_gap(tiny_model, volume, [], RasterSettings(8)) == 0.0


def test_emit_plots(tmp_path, tiny_model, tiny_dataset):
    report, _ = evaluate_model(tiny_model, tiny_dataset)
    stem = str(tmp_path / "report")
    paths = emit_plots(report, tiny_dataset, stem)
    assert paths == [stem + "_latent.csv", stem + "_poses.csv", stem + "_latent.svg", stem + "_poses.svg"]

    with open(paths[0], newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ['cos_est', 'sin_est', 'theta_true', 'split']
    assert len(rows) == 31
    for row in rows[1:]:
        assert float(row[0]) ** 2 + float(row[1]) ** 2 == pytest.approx(1.0)
    assert [row[3] for row in rows[1:]] == tiny_dataset.split

    with open(paths[1], newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ['theta_true', 'theta_est', 'theta_aligned', 'residual']
    assert len(rows) == 31
    assert float(rows[1][0]) == tiny_dataset.thetas[0]

    for path, title in zip(paths[2:], (LATENT_TITLE, POSES_TITLE)):
        svg = etree.parse(path).getroot()
        assert svg.tag == "{http://www.w3.org/2000/svg}svg"
        assert title in "".join(svg.itertext())

    with open(paths[3], "rb") as f:
        first = f.read()
    emit_plots(report, tiny_dataset, stem)
    with open(paths[3], "rb") as f:
        assert f.read() == first

    assert emit_plots(report, tiny_dataset, str(tmp_path / "bare"), svg=False) == \
        [str(tmp_path / "bare_latent.csv"), str(tmp_path / "bare_poses.csv")]


def test_emit_plots_errors(tmp_path, tiny_model, tiny_dataset):
    report, _ = evaluate_model(tiny_model, tiny_dataset)
    with pytest.raises(FileNotFoundError):
        emit_plots(report, tiny_dataset, str(tmp_path / "missing" / "report"))

    other = generate_dataset(volumes.asymmetric_triple(), count=10, width=8)
    with pytest.raises(InvalidArgumentError):
        emit_plots(report, other, str(tmp_path / "report"))


@pytest.fixture(scope="module")
def trained_pair():
    """
    Default sized models trained on a compatible and a mirror symmetric volume.
    """
    config = TrainingConfig(restarts=1, seed=0)
    trained = {}
    for name, volume in (("compatible", volumes.asymmetric_triple()), ("mirror", volumes.mirror_triple())):
        dataset = generate_dataset(volume, count=2000, width=64, seed=3)
        model, _ = train(dataset, config)
        trained[name] = (volume, dataset, model)

    return trained


@pytest.mark.slow
def test_compatible_volume_poses_are_recovered(trained_pair):
    _, dataset, model = trained_pair["compatible"]
    report, passed = evaluate_model(model, dataset)
    assert passed
    assert report.median_error < math.radians(15.0)
    assert abs(report.spearman) > 0.9


@pytest.mark.slow
def test_mirror_volume_poses_fold(trained_pair):
    volume, dataset, model = trained_pair["mirror"]
    report, passed = evaluate_model(model, dataset)
    assert not passed
    assert report.median_error > math.radians(30.0)
    assert report.fold_score > 0.0

    pairs = find_coincidences(volume, grid_size=720)[:256]
    assert coincidence_gap(model, volume, pairs, dataset.raster) < 1e-6
