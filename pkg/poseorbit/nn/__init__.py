from .node import Node, backward, as_node
from . import ops
from .mlp import Mlp
from .adam import Adam, AdamState, adam_step
from .checkpoint_reader import Checkpoint, CheckpointReader
from .checkpoint_writer import CheckpointWriter

__all__ = ['Node', 'backward', 'as_node', 'ops', 'Mlp', 'Adam', 'AdamState', 'adam_step',
           'Checkpoint', 'CheckpointReader', 'CheckpointWriter']
