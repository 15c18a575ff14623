from .verdict import CoincidencePair, StarViolation, PermutationWitness, CompatibilityVerdict
from .exact import ExactComparator
from .raster import RasterComparator
from .grid_oracle import GridOracle, GroupActionReport, find_coincidences, check_injectivity, check_star, \
    verify_group_action, stabilizer_angles
from .algebraic import AlgebraicSolver, check_injectivity_algebraic
from .construction import random_compatible_volume
from . import volumes

__all__ = ['CoincidencePair', 'StarViolation', 'PermutationWitness', 'CompatibilityVerdict',
           'ExactComparator', 'RasterComparator',
           'GridOracle', 'GroupActionReport', 'find_coincidences', 'check_injectivity', 'check_star',
           'verify_group_action', 'stabilizer_angles',
           'AlgebraicSolver', 'check_injectivity_algebraic',
           'random_compatible_volume', 'volumes']
