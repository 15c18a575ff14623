from .comparator_base import ComparatorBase

__all__ = ['ComparatorBase']
