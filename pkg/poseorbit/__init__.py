from .errors import PoseOrbitError

__all__ = ['PoseOrbitError']
