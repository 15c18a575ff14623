from .rotation import Rotation, rotation_from_angle, compose, canonical_angle, wrap_angle, TWO_PI
from .volume import PointVolume, ProjectedMasses, apply_rotation, project, project_many
from .image import Image1D, RasterSettings, rasterize, image_distance, render_pose, render_poses
from .volume_reader import VolumeReader
from .volume_writer import VolumeWriter

__all__ = ['Rotation', 'rotation_from_angle', 'compose', 'canonical_angle', 'wrap_angle', 'TWO_PI',
           'PointVolume', 'ProjectedMasses', 'apply_rotation', 'project', 'project_many',
           'Image1D', 'RasterSettings', 'rasterize', 'image_distance', 'render_pose', 'render_poses',
           'VolumeReader', 'VolumeWriter']
