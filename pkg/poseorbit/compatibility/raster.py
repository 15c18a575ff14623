from typing import Optional
import numpy as np
from ..base import ComparatorBase
from ..geometry import PointVolume, RasterSettings, render_poses


class RasterComparator(ComparatorBase):
    """
    Image level comparison: the signature of a pose is its rendered image.
    """
    DEFAULT_TOLERANCE = 1e-3

    def __init__(self, volume: PointVolume, settings: Optional[RasterSettings] = None):
        super().__init__(volume)
        if settings is None:
            settings = RasterSettings()
        self.settings = settings.resolved(volume)

    @property
    def name(self) -> str:
        return "raster"

    @property
    def default_tolerance(self) -> float:
        return self.DEFAULT_TOLERANCE

    def signatures(self, thetas) -> np.ndarray:
        return render_poses(self.volume, thetas, self.settings)
