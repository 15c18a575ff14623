import math
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poseorbit.errors import InvalidArgumentError, OutOfDomainError, UnsupportedDimensionError, ParseError
from poseorbit.geometry import Rotation, rotation_from_angle, compose, canonical_angle, wrap_angle, TWO_PI, \
    PointVolume, apply_rotation, project, project_many, Image1D, RasterSettings, rasterize, image_distance, \
    render_pose, render_poses, VolumeReader, VolumeWriter

angles = st.floats(min_value=-20.0, max_value=20.0, allow_nan=False, allow_infinity=False)


@st.composite
def volume_strategy(draw, max_n=6):
    n = draw(st.integers(min_value=1, max_value=max_n))
    radii = draw(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=n, max_size=n))
    phis = draw(st.lists(st.floats(min_value=0.0, max_value=TWO_PI), min_size=n, max_size=n))
    masses = draw(st.lists(st.floats(min_value=0.1, max_value=5.0), min_size=n, max_size=n))
    points = [(r * math.cos(p), r * math.sin(p)) for r, p in zip(radii, phis)]

    return PointVolume(points, masses, domain_radius=1.0)


def test_canonical_angle():
    assert canonical_angle(0.0) == 0.0
    assert canonical_angle(TWO_PI) == 0.0
    assert canonical_angle(-0.0) == 0.0
    assert canonical_angle(-math.pi / 2) == pytest.approx(1.5 * math.pi)
    assert canonical_angle(5 * math.pi) == pytest.approx(math.pi)


@given(angles)
def test_canonical_angle_range(theta):
    angle = canonical_angle(theta)
    assert 0.0 <= angle < TWO_PI


def test_wrap_angle():
    assert float(wrap_angle(math.pi)) == pytest.approx(-math.pi)
    assert float(wrap_angle(0.5)) == pytest.approx(0.5)
    wrapped = wrap_angle(np.array([TWO_PI + 0.1, -TWO_PI - 0.1]))
    assert np.allclose(wrapped, [0.1, -0.1])


def test_rotation_from_angle():
    r = rotation_from_angle(math.pi / 2)
    assert r.dim == 2
    assert np.allclose(r.matrix, [[0.0, -1.0], [1.0, 0.0]])
    assert r.angle == pytest.approx(math.pi / 2)

    with pytest.raises(InvalidArgumentError):
        Rotation.from_angle(math.inf)


def test_rotation_from_matrix():
    r = Rotation.from_matrix([[0.0, -1.0], [1.0, 0.0]])
    assert r.angle == pytest.approx(math.pi / 2)

    with pytest.raises(InvalidArgumentError):
        Rotation.from_matrix([[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(InvalidArgumentError):
        Rotation.from_matrix([[2.0, 0.0], [0.0, 0.5]])


def test_identity_and_inverse():
    assert Rotation.identity().is_identity()
    assert Rotation.identity(3).is_identity()
    r = Rotation.from_angle(1.3)
    assert compose(r, r.inverse()).is_identity(1e-12)


@given(angles, angles)
def test_compose_is_angle_addition(a, b):
    r = compose(Rotation.from_angle(a), Rotation.from_angle(b))
    assert np.allclose(r.matrix, Rotation.from_angle(a + b).matrix, atol=1e-9)
    assert np.allclose((Rotation.from_angle(a) @ Rotation.from_angle(b)).matrix, r.matrix)


def test_random_rotation_is_special_orthogonal():
    rng = np.random.default_rng(3)
    for dim in (2, 3, 4):
        r = Rotation.random(dim, rng)
        assert np.allclose(r.matrix.T @ r.matrix, np.eye(dim))
        assert np.linalg.det(r.matrix) == pytest.approx(1.0)


def test_compose_dimension_mismatch():
    with pytest.raises(InvalidArgumentError):
        compose(Rotation.identity(2), Rotation.identity(3))


def test_point_volume_validation():
    v = PointVolume([(0.5, 0.0), (0.0, -1.0)], [1.0, 2.0])
    assert v.n == 2
    assert v.dim == 2
    assert v.domain_radius == 1.0
    assert v.total_mass == 3.0

    with pytest.raises(InvalidArgumentError):
        PointVolume([(0.5, 0.0)], [0.0])
    with pytest.raises(InvalidArgumentError):
        PointVolume(np.zeros((0, 2)))
    with pytest.raises(UnsupportedDimensionError):
        PointVolume([(0.5,)])
    with pytest.raises(OutOfDomainError):
        PointVolume([(2.0, 0.0)], domain_radius=1.0)


def test_point_volume_is_immutable():
    v = PointVolume([(0.5, 0.0)])
    with pytest.raises(ValueError):
        v.points[0, 0] = 1.0


def test_projection_of_rotated_point():
    v = PointVolume([(1.0, 0.0)], domain_radius=1.0)
    p = project(apply_rotation(Rotation.from_angle(math.pi / 2), v))
    assert p.positions.shape == (1, 1)
    assert p.positions[0, 0] == pytest.approx(0.0, abs=1e-15)

    p = project(apply_rotation(Rotation.from_angle(math.pi), v))
    assert p.positions[0, 0] == pytest.approx(-1.0)


@given(volume_strategy(), angles)
@settings(max_examples=50)
def test_projection_preserves_mass(v, theta):
    p = project(apply_rotation(Rotation.from_angle(theta), v))
    assert p.total_mass == pytest.approx(v.total_mass)
    assert np.all(np.abs(p.positions) <= v.domain_radius * (1.0 + 1e-9))


@given(volume_strategy(), angles, angles)
@settings(max_examples=50)
def test_rotation_action_composes(v, a, b):
    stepwise = apply_rotation(Rotation.from_angle(a), apply_rotation(Rotation.from_angle(b), v))
    at_once = apply_rotation(Rotation.from_angle(a + b), v)
    assert np.allclose(stepwise.points, at_once.points, atol=1e-9)


def test_project_many_matches_project():
    v = PointVolume([(0.3, 0.4), (-0.5, 0.1), (0.0, -0.9)])
    thetas = [0.0, 0.7, 2.5, 5.9]
    batch = project_many(v, thetas)
    for row, theta in zip(batch, thetas):
        single = project(apply_rotation(Rotation.from_angle(theta), v))
        assert np.allclose(row, single.positions[:, 0])


def test_rasterize_is_max_normalized():
    v = PointVolume([(0.3, 0.4), (-0.5, 0.1)], [1.0, 3.0])
    image = render_pose(v, 0.4, RasterSettings(32))
    assert image.width == 32
    assert image.pixels.max() == pytest.approx(1.0)
    assert image.pixels.min() >= 0.0


def test_rasterize_symmetric_pair():
    p = project(PointVolume([(-0.5, 0.2), (0.5, -0.7)], domain_radius=1.0))
    image = rasterize(p, 64, 0.05, 1.0)
    assert np.allclose(image.pixels, image.pixels[::-1], rtol=0.0, atol=1e-9)
    assert image.pixels.max() == pytest.approx(1.0)


@given(volume_strategy(), angles, st.sampled_from([0.5, 2.0, 10.0, 1e-3]))
@settings(max_examples=40, deadline=None)
def test_rasterize_ignores_mass_scale(v, theta, scale):
    scaled = PointVolume(v.points, v.masses * scale, domain_radius=v.domain_radius)
    for splat in (0.05, 0.0):
        raster = RasterSettings(32, splat)
        a = render_pose(v, theta, raster).pixels
        b = render_pose(scaled, theta, raster).pixels
        assert np.allclose(a, b, rtol=0.0, atol=1e-12)


def test_rasterize_binning():
    p = project(PointVolume([(0.0, 0.5), (0.99, 0.0)], domain_radius=1.0))
    image = rasterize(p, 4, 0.0, 1.0)
    # x=0 lands in pixel 2, x=0.99 in pixel 3, equal masses
    assert np.allclose(image.pixels, [0.0, 0.0, 1.0, 1.0])


def test_rasterize_rejects_outside():
    p = project(PointVolume([(0.5, 0.0)], domain_radius=1.0))
    with pytest.raises(OutOfDomainError):
        rasterize(p, 8, 0.1, 0.25)


def test_image_validation():
    with pytest.raises(InvalidArgumentError):
        Image1D([0.5, 1.5], 1.0)
    with pytest.raises(InvalidArgumentError):
        Image1D([0.5], 1.0)


def test_image_distance():
    a = Image1D([0.0, 1.0], 1.0)
    b = Image1D([1.0, 1.0], 1.0)
    assert image_distance(a, a) == 0.0
    assert image_distance(a, b) == pytest.approx(math.sqrt(0.5))


def test_raster_settings():
    s = RasterSettings()
    assert s.width == RasterSettings.DEFAULT_WIDTH
    v = PointVolume([(0.0, 2.0)])
    resolved = s.resolved(v)
    assert resolved.domain_radius == 2.0
    assert resolved.splat_sigma == pytest.approx(RasterSettings.DEFAULT_SPLAT_FRACTION * 2.0)
    assert RasterSettings(16, 0.0).is_exact

    with pytest.raises(InvalidArgumentError):
        RasterSettings(1)
    with pytest.raises(InvalidArgumentError):
        RasterSettings(16, -0.1)


def test_render_poses_matches_render_pose():
    v = PointVolume([(0.3, 0.4), (-0.5, 0.1), (0.0, -0.9)])
    settings_ = RasterSettings(24, 0.1)
    thetas = [0.1, 1.9, 4.0]
    batch = render_poses(v, thetas, settings_)
    for row, theta in zip(batch, thetas):
        assert np.allclose(row, render_pose(v, theta, settings_).pixels)


def test_volume_file_round_trip(tmp_path):
    v = PointVolume([(0.1, 1.0 / 3.0), (-0.7, 0.2)], [1.0, 2.5], domain_radius=1.5)
    path = str(tmp_path / "volume.txt")
    read_back = VolumeWriter(path).write(v)
    assert read_back == v
    assert VolumeReader(path).read() == v


def test_volume_reader_errors(tmp_path):
    path = tmp_path / "broken.txt"
    path.write_text("dim=2 radius=1\n0.1 0.2 1\n0.1 oops 1\n")
    with pytest.raises(ParseError) as exc_info:
        VolumeReader(str(path)).read()
    assert exc_info.value.line == 3

    path.write_text("0.1 0.2 1\n")
    with pytest.raises(ParseError) as exc_info:
        VolumeReader(str(path)).read()
    assert exc_info.value.line == 1

    with pytest.raises(InvalidArgumentError):
        VolumeReader(str(tmp_path / "missing.txt")).read()
