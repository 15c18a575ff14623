import numpy as np
from ..geometry import PointVolume
from ..errors import InvalidArgumentError, ConstructionError
from .algebraic import AlgebraicSolver
import logging

log = logging.getLogger(__name__)

DEFAULT_MAX_ATTEMPTS = 100


def random_compatible_volume(n: int, seed: int, domain_radius: float = 1.0,
                             max_attempts: int = DEFAULT_MAX_ATTEMPTS,
                             angular_resolution: int = AlgebraicSolver.DEFAULT_RESOLUTION) -> PointVolume:
    """
    Draw n unit masses uniformly in the disk until the algebraic check finds no coincidence.
    :param n: number of points, 1 <= n <= 8
    :param seed: generator seed, same seed gives the same volume
    :param domain_radius: radius of the disk
    :param max_attempts: number of volumes to try
    :return: volume satisfying (**)
    """
    if int(n) != n or n < 1 or n > AlgebraicSolver.MAX_POINTS:
        raise InvalidArgumentError("Point count must be within 1..{}, got {}!".format(AlgebraicSolver.MAX_POINTS, n))
    if not domain_radius > 0.0:
        raise InvalidArgumentError("Domain radius must be positive, got {}!".format(domain_radius))
    if max_attempts < 1:
        raise InvalidArgumentError("Need at least one attempt, got {}!".format(max_attempts))

    rng = np.random.default_rng(seed)
    for attempt in range(1, max_attempts + 1):
        radii = domain_radius * np.sqrt(rng.uniform(0.0, 1.0, size=n))
        angles = rng.uniform(0.0, 2.0 * np.pi, size=n)
        points = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1)
        volume = PointVolume(points, domain_radius=domain_radius)

        verdict = AlgebraicSolver(volume, angular_resolution).check()
        if verdict.satisfies_injectivity:
            log.info("Compatible {}-point volume found on attempt {}".format(n, attempt))
            return volume
        log.debug("Attempt {} rejected: {}".format(attempt, verdict.permutation_witness))

    raise ConstructionError("No compatible {}-point volume in {} attempts with seed {}!".format(
        n, max_attempts, seed))
