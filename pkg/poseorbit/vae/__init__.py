from .irrep import IrrepEmbedding, irrep_matrix, rotate_content
from .model import VaeModel, EncoderOutput, encode, reparametrize, decode, loss, save_model, load_model
from .trainer import TrainingConfig, TrainingHistory, RestartHistory, EpochRecord, TrainingState, train, train_state, \
    validation_loss, save_training_state, load_training_state
from .search import hyperparameter_search, SearchResult, SearchTrial, DEFAULT_DEPTHS, DEFAULT_WIDTHS

__all__ = ['IrrepEmbedding', 'irrep_matrix', 'rotate_content',
           'VaeModel', 'EncoderOutput', 'encode', 'reparametrize', 'decode', 'loss', 'save_model', 'load_model',
           'TrainingConfig', 'TrainingHistory', 'RestartHistory', 'EpochRecord', 'TrainingState', 'train',
           'train_state', 'validation_loss', 'save_training_state', 'load_training_state',
           'hyperparameter_search', 'SearchResult', 'SearchTrial', 'DEFAULT_DEPTHS', 'DEFAULT_WIDTHS']
