from .dataset import PoseSample, Dataset, generate_dataset, TRAIN, VALIDATION
from .dataset_reader import DatasetReader
from .dataset_writer import DatasetWriter, save_dataset, load_dataset

__all__ = ['PoseSample', 'Dataset', 'generate_dataset', 'TRAIN', 'VALIDATION',
           'DatasetReader', 'DatasetWriter', 'save_dataset', 'load_dataset']
