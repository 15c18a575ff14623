import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poseorbit.errors import InvalidArgumentError, UnsupportedDimensionError, VolumeTooLargeError, ConstructionError, \
    IncompatibleVolumeError
from poseorbit.geometry import PointVolume, Rotation, RasterSettings, apply_rotation, wrap_angle, TWO_PI
from poseorbit.compatibility import CoincidencePair, CompatibilityVerdict, PermutationWitness, ExactComparator, \
    RasterComparator, GridOracle, AlgebraicSolver, find_coincidences, check_injectivity, check_star, \
    verify_group_action, stabilizer_angles, check_injectivity_algebraic, random_compatible_volume, volumes


def _rotated(v: PointVolume, theta: float) -> PointVolume:
    return apply_rotation(Rotation.from_angle(theta), v)


def _assert_valid_witness(volume: PointVolume, witness: PermutationWitness):
    solver = AlgebraicSolver(volume)
    assert witness.sigma in solver.mass_preserving_permutations()
    residual = solver.residuals(witness.sigma, witness.theta1, witness.theta2)
    assert np.max(np.abs(residual)) < 1e-8
    delta = abs(witness.theta2 - witness.theta1)
    assert min(delta, TWO_PI - delta) > 1e-6


def test_coincidence_pair():
    pair = CoincidencePair(0.1, TWO_PI - 0.1, 0.0)
    assert pair.separation == pytest.approx(0.2)

    with pytest.raises(ValueError):
        CoincidencePair(1.0, 1.0 + TWO_PI, 0.0)
    with pytest.raises(ValueError):
        CoincidencePair(1.0, 2.0, -1.0)


def test_verdict_consistency():
    verdict = CompatibilityVerdict("exact", 16, satisfies_injectivity=True)
    assert verdict.satisfies_star is True
    assert verdict.is_compatible

    undecided = CompatibilityVerdict("algebraic", 16)
    assert not undecided.is_compatible
    assert "satisfies_star=unknown" in undecided.report_lines()

    with pytest.raises(ValueError):
        CompatibilityVerdict("exact", 16, satisfies_injectivity=True,
                             coincidences=[CoincidencePair(0.0, 1.0, 0.0)])
    with pytest.raises(ValueError):
        CompatibilityVerdict("exact", 16, satisfies_star=False, satisfies_injectivity=True)
    with pytest.raises(ValueError):
        CompatibilityVerdict("exact", 16, satisfies_star=False)


def test_oracle_argument_validation():
    v = volumes.asymmetric_triple()
    with pytest.raises(InvalidArgumentError):
        GridOracle(v, grid_size=4)
    with pytest.raises(InvalidArgumentError):
        GridOracle(v, tol=-1.0)
    with pytest.raises(InvalidArgumentError):
        GridOracle(v).rotation_shifts(4)
    with pytest.raises(UnsupportedDimensionError):
        GridOracle(PointVolume([(0.1, 0.2, 0.3)]))


def test_comparator_paths():
    oracle = GridOracle(volumes.mirror_triple())
    assert isinstance(oracle.comparator, ExactComparator)
    assert oracle.method == "grid-exact"

    oracle = GridOracle(volumes.mirror_triple(), raster=RasterSettings(32, 0.05))
    assert isinstance(oracle.comparator, RasterComparator)
    assert oracle.tolerance == RasterComparator.DEFAULT_TOLERANCE


def test_exact_comparator_distances():
    mirror = ExactComparator(volumes.mirror_triple())
    assert mirror.distance(0.7, -0.7) < 1e-12

    asym = ExactComparator(volumes.asymmetric_triple())
    assert asym.distance(0.0, 1.0) > 1e-3
    table = asym.distance_table(np.linspace(0.0, 6.0, 40))
    assert table.shape == (40, 40)
    assert np.allclose(table, table.T)
    assert np.allclose(np.diag(table), 0.0)


def test_asymmetric_triple_is_compatible():
    v = volumes.asymmetric_triple()
    verdict = check_injectivity(v, grid_size=720)
    assert verdict.satisfies_injectivity
    assert verdict.satisfies_star
    assert verdict.coincidences == []

    algebraic = check_injectivity_algebraic(v)
    assert algebraic.satisfies_injectivity
    assert algebraic.permutation_witness is None


def test_triangle_coincides():
    v = volumes.equilateral_triangle()
    verdict = check_injectivity(v, grid_size=360)
    assert not verdict.satisfies_injectivity
    assert any(abs(p.separation - TWO_PI / 3) < 1e-9 for p in verdict.coincidences)

    algebraic = AlgebraicSolver(v).check()
    assert not algebraic.satisfies_injectivity
    witness = algebraic.permutation_witness
    assert not witness.is_identity_permutation()
    _assert_valid_witness(v, witness)


def test_pinwheel_satisfies_star_only():
    v = volumes.chiral_pinwheel()
    verdict = check_star(v, grid_size=720)
    assert verdict.satisfies_star
    assert not verdict.satisfies_injectivity
    assert verdict.star_violations == []
    assert all(abs(p.separation - TWO_PI / 3) < 1e-9 for p in verdict.coincidences)

    report = verify_group_action(v, sample_count=50, grid_size=720)
    assert report.passed
    assert report.max_preimages == 3

    algebraic = check_injectivity_algebraic(v)
    assert not algebraic.satisfies_injectivity
    _assert_valid_witness(v, algebraic.permutation_witness)


@pytest.mark.parametrize("volume", [volumes.mirror_triple(), volumes.mirrored_kite()], ids=["mirror", "kite"])
def test_mirror_symmetry_breaks_star(volume):
    verdict = check_star(volume, grid_size=720)
    assert not verdict.satisfies_star
    assert not verdict.satisfies_injectivity
    violation = verdict.star_violations[0]
    assert violation.image_rms > verdict.tolerance

    report = verify_group_action(volume, sample_count=100, grid_size=720, enforce_precondition=False)
    assert not report.passed
    assert report.worst_deviation > 1e-3

    with pytest.raises(IncompatibleVolumeError):
        verify_group_action(volume, sample_count=10, grid_size=720)


def test_compatible_volume_gives_group_action():
    report = verify_group_action(volumes.asymmetric_triple(), sample_count=50, grid_size=720)
    assert report.passed
    assert bool(report)
    assert report.max_preimages == 1


def test_point_at_origin():
    v = volumes.point_at_origin()
    pairs = find_coincidences(v, grid_size=16)
    assert len(pairs) == 16 * 15 // 2

    witness = check_injectivity_algebraic(v).permutation_witness
    assert witness.is_identity_permutation()


def test_blurred_circle_on_raster_path():
    v = volumes.discretized_circle(12, 0.5, domain_radius=1.0)
    verdict = check_star(v, grid_size=120, raster=RasterSettings(64, 0.5, 1.0), tol=1e-3)
    assert verdict.method == "grid-raster"
    assert verdict.satisfies_star
    assert not verdict.satisfies_injectivity


def test_stabilizer_angles():
    assert stabilizer_angles(volumes.asymmetric_triple()) == [0.0]

    pinwheel = stabilizer_angles(volumes.chiral_pinwheel())
    assert np.allclose(np.degrees(pinwheel), [0.0, 120.0, 240.0])

    assert len(stabilizer_angles(volumes.discretized_circle(12))) == 12
    assert len(stabilizer_angles(volumes.equilateral_triangle())) == 3


def test_mass_preserving_permutations():
    v = PointVolume([(0.1, 0.0), (0.0, 0.2), (-0.3, 0.1)], [1.0, 1.0, 2.0])
    assert AlgebraicSolver(v).mass_preserving_permutations() == [(0, 1, 2), (1, 0, 2)]

    with pytest.raises(VolumeTooLargeError):
        AlgebraicSolver(volumes.discretized_circle(9))
    with pytest.raises(InvalidArgumentError):
        AlgebraicSolver(v, angular_resolution=4)


@given(st.floats(min_value=0.0, max_value=TWO_PI))
@settings(max_examples=10, deadline=None)
def test_algebraic_verdict_is_rotation_invariant(theta):
    assert check_injectivity_algebraic(_rotated(volumes.asymmetric_triple(), theta)).satisfies_injectivity

    mirror = _rotated(volumes.mirror_triple(), theta)
    verdict = check_injectivity_algebraic(mirror)
    assert not verdict.satisfies_injectivity
    _assert_valid_witness(mirror, verdict.permutation_witness)


@given(st.integers(min_value=0, max_value=359))
@settings(max_examples=10, deadline=None)
def test_grid_verdict_is_rotation_invariant(k):
    theta = k * TWO_PI / 360
    assert not check_star(_rotated(volumes.mirror_triple(), theta), grid_size=360).satisfies_star
    assert check_star(_rotated(volumes.chiral_pinwheel(), theta), grid_size=360).satisfies_star


def test_random_compatible_volume():
    v = random_compatible_volume(3, seed=7)
    assert v.n == 3
    assert v == random_compatible_volume(3, seed=7)
    assert check_injectivity_algebraic(v).satisfies_injectivity
    assert check_injectivity(v, grid_size=360).satisfies_injectivity

    with pytest.raises(InvalidArgumentError):
        random_compatible_volume(0, seed=1)
    with pytest.raises(InvalidArgumentError):
        random_compatible_volume(9, seed=1)


def test_construction_gives_up():
    # One point off the origin always has a mirror pose
    with pytest.raises(ConstructionError):
        random_compatible_volume(1, seed=3, max_attempts=5)
    with pytest.raises(InvalidArgumentError):
        random_compatible_volume(2, seed=3, max_attempts=0)


def _random_volume(seed: int) -> PointVolume:
    """
    One to four points in the unit disk with masses 1 or 2, so equal mass pairs are common.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    radii = np.sqrt(rng.uniform(0.05, 1.0, size=n))
    angles = rng.uniform(0.0, TWO_PI, size=n)
    points = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1)

    return PointVolume(points, rng.integers(1, 3, size=n).astype(float), domain_radius=1.0)


def _equal_mass_pair(seed: int) -> PointVolume:
    rng = np.random.default_rng(seed)
    radii = np.sqrt(rng.uniform(0.05, 1.0, size=2))
    angles = rng.uniform(0.0, TWO_PI, size=2)

    return PointVolume(np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1), domain_radius=1.0)


def test_rotated_mirror_found_between_grid_poses():
    v = _rotated(volumes.mirror_triple(), 0.123)
    verdict = check_star(v, grid_size=720)
    assert not verdict.satisfies_star
    assert not verdict.satisfies_injectivity

    oracle = GridOracle(v, grid_size=720)
    refined = oracle.refined_pairs()
    assert refined
    solver = AlgebraicSolver(v)
    for pair in refined:
        worst = min(np.max(np.abs(solver.residuals(sigma, pair.theta1, pair.theta2)))
                    for sigma in solver.mass_preserving_permutations())
        assert worst < 1e-8
        assert pair.separation > 2 * oracle.step


def test_refinement_is_off_for_images():
    v = _rotated(volumes.mirror_triple(), 0.123)
    oracle = GridOracle(v, grid_size=120, raster=RasterSettings(64, 0.05, 1.0), tol=1e-3)
    assert oracle.refined_pairs() == []


@pytest.mark.parametrize("seed", range(8))
def test_equal_mass_pairs_always_coincide(seed):
    v = _equal_mass_pair(seed)
    assert not check_injectivity(v, grid_size=720).satisfies_injectivity
    assert not check_injectivity_algebraic(v).satisfies_injectivity


@pytest.mark.parametrize("name", sorted(volumes.REFERENCE_VOLUMES))
def test_grid_and_algebraic_agree_on_reference_volumes(name):
    v = volumes.REFERENCE_VOLUMES[name]()
    if v.n > AlgebraicSolver.MAX_POINTS:
        pytest.skip("too many points for the algebraic solver")
    for theta in (0.0, 0.123, 2.5):
        rotated = _rotated(v, theta)
        assert check_injectivity(rotated, grid_size=720).satisfies_injectivity == \
            check_injectivity_algebraic(rotated).satisfies_injectivity


def test_grid_and_algebraic_agree_on_random_volumes():
    for seed in range(50):
        v = _random_volume(seed)
        grid = check_injectivity(v, grid_size=720)
        algebraic = check_injectivity_algebraic(v)
        assert grid.satisfies_injectivity == algebraic.satisfies_injectivity, "seed {}".format(seed)


def test_injectivity_implies_star():
    for seed in range(50):
        v = random_compatible_volume(3 + seed % 3, seed=seed)
        verdict = check_star(v, grid_size=360)
        assert verdict.satisfies_injectivity, "seed {}".format(seed)
        assert verdict.satisfies_star, "seed {}".format(seed)


@pytest.mark.parametrize("scale", [0.5, 2.0, 10.0])
@pytest.mark.parametrize("name", ["asymmetric", "mirror", "pinwheel", "triangle"])
def test_verdict_ignores_mass_scale(name, scale):
    v = volumes.REFERENCE_VOLUMES[name]()
    scaled = PointVolume(v.points, v.masses * scale, domain_radius=v.domain_radius)

    before = check_star(v, grid_size=360)
    after = check_star(scaled, grid_size=360)
    assert after.satisfies_star == before.satisfies_star
    assert after.satisfies_injectivity == before.satisfies_injectivity
    assert len(after.coincidences) == len(before.coincidences)
    assert check_injectivity_algebraic(scaled).satisfies_injectivity == \
        check_injectivity_algebraic(v).satisfies_injectivity


def test_group_action_over_many_samples():
    report = verify_group_action(volumes.asymmetric_triple(), sample_count=1000, grid_size=720, seed=11)
    assert report.sample_count == 1000
    assert report.passed
    assert report.worst_deviation < 1e-9


def test_near_diagonal_candidates_are_kept():
    # Each point alone has a mirror pose, together they only coincide on theta1 == theta2
    v = PointVolume([(0.5, 0.1), (-0.2, 0.6)], [1.0, 2.0], domain_radius=1.0)
    solver = AlgebraicSolver(v)
    separations = [abs(float(wrap_angle(t2 - t1))) for t1, t2, _ in solver.candidates((0, 1))]
    near = [s for s in separations if s < np.radians(0.5)]
    assert near
    assert min(near) > AlgebraicSolver.MIN_SEPARATION

    # Polishing slides them onto the diagonal, where they are rejected
    assert solver.find_witness() is None
    assert check_injectivity(v, grid_size=720).satisfies_injectivity
