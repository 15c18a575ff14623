import numpy as np
from ..base import ComparatorBase
from ..geometry import PointVolume, project_many


class ExactComparator(ComparatorBase):
    """
    Multiset comparison of projected point masses. The signature of a pose is
    the projected positions sorted ascending followed by the masses in the same
    order, masses divided by their mean.
    """
    DEFAULT_TOLERANCE = 1e-6

    def __init__(self, volume: PointVolume):
        super().__init__(volume)
        self._masses = volume.masses / np.mean(volume.masses)

    @property
    def name(self) -> str:
        return "exact"

    @property
    def default_tolerance(self) -> float:
        return self.DEFAULT_TOLERANCE

    def signatures(self, thetas) -> np.ndarray:
        positions = project_many(self.volume, thetas)
        masses = np.broadcast_to(self._masses, positions.shape)
        # Sort key: position first, mass breaks ties
        order = np.lexsort((masses, positions))
        sorted_positions = np.take_along_axis(positions, order, axis=1)
        sorted_masses = np.take_along_axis(masses, order, axis=1)

        return np.concatenate([sorted_positions, sorted_masses], axis=1)
