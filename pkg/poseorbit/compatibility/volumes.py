"""
Reference volumes with known symmetry.
"""
import math
from typing import Callable, Dict
import numpy as np
from ..geometry import PointVolume


def equilateral_triangle(radius: float = 1.0) -> PointVolume:
    """
    Three equal masses 120 degrees apart. Projections coincide every 120 degrees.
    """
    angles = np.arange(3) * (2.0 * math.pi / 3.0)

    return PointVolume(radius * np.stack([np.cos(angles), np.sin(angles)], axis=1))


def antipodal_pair(radius: float = 1.0) -> PointVolume:
    return PointVolume([[radius, 0.0], [-radius, 0.0]])


def discretized_circle(count: int = 12, radius: float = 1.0, domain_radius: float = None) -> PointVolume:
    """
    Equal masses uniformly on a circle, the point mass stand-in for a sphere.
    """
    angles = np.arange(count) * (2.0 * math.pi / count)

    return PointVolume(radius * np.stack([np.cos(angles), np.sin(angles)], axis=1),
                       domain_radius=domain_radius if domain_radius else radius)


def point_at_origin(domain_radius: float = 1.0) -> PointVolume:
    return PointVolume([[0.0, 0.0]], domain_radius=domain_radius)


def asymmetric_triple() -> PointVolume:
    """
    Generic three point volume, projections never coincide.
    """
    return PointVolume([[1.0, 0.0], [0.0, 2.0], [-1.5, -1.0]], domain_radius=2.0)


def mirror_triple(radius: float = 1.0) -> PointVolume:
    """
    Isosceles triple, mirror symmetric about the x axis. Poses theta and -theta
    give the same projection and that coincidence breaks under further rotation.
    """
    return PointVolume(radius * np.array([[1.0, 0.0], [-0.5, 0.75], [-0.5, -0.75]]), domain_radius=radius)


def mirrored_kite() -> PointVolume:
    """
    (1, 0) and (0, 2) plus the mirror image of (0, 2).
    """
    return PointVolume([[1.0, 0.0], [0.0, 2.0], [0.0, -2.0]], domain_radius=2.0)


def chiral_pinwheel(radius: float = 1.0) -> PointVolume:
    """
    Two 3-fold orbits of different mass, twisted 40 degrees against each other.
    Pure rotational symmetry without mirror axes: satisfies (*) but not (**).
    """
    outer = np.arange(3) * (2.0 * math.pi / 3.0)
    inner = outer + math.radians(40.0)
    points = np.concatenate([
        radius * np.stack([np.cos(outer), np.sin(outer)], axis=1),
        0.5 * radius * np.stack([np.cos(inner), np.sin(inner)], axis=1),
    ])

    return PointVolume(points, [1.0, 1.0, 1.0, 2.0, 2.0, 2.0], domain_radius=radius)


REFERENCE_VOLUMES = {
    'triangle': equilateral_triangle,
    'antipodal': antipodal_pair,
    'circle': discretized_circle,
    'origin': point_at_origin,
    'asymmetric': asymmetric_triple,
    'mirror': mirror_triple,
    'kite': mirrored_kite,
    'pinwheel': chiral_pinwheel,
}  # type: Dict[str, Callable[[], PointVolume]]
