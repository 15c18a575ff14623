from typing import List, Optional, Sequence, Tuple
import numpy as np
from ..errors import InvalidArgumentError, TrainingDivergenceError
from .node import Node


class AdamState:
    """
    First and second moment estimates, one pair per parameter, plus the step count.
    """

    def __init__(self, shapes: Sequence[Tuple[int, ...]]):
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.step = 0

    @classmethod
    def restore(cls, m: Sequence[np.ndarray], v: Sequence[np.ndarray], step: int) -> 'AdamState':
        if len(m) != len(v) or any(a.shape != b.shape for a, b in zip(m, v)):
            raise InvalidArgumentError("First and second moments don't pair up!")
        if int(step) != step or step < 0:
            raise InvalidArgumentError("Step count must be a non-negative integer, got {}!".format(step))
        state = cls([])
        state.m = [np.array(a, dtype=np.float64) for a in m]
        state.v = [np.array(b, dtype=np.float64) for b in v]
        state.step = int(step)

        return state


def adam_step(params: List[np.ndarray], grads: List[np.ndarray], state: AdamState, lr: float = 1e-3,
              beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> Tuple[List[np.ndarray], AdamState]:
    """
    One bias corrected Adam update.
    :return: tuple, new parameter values and the updated state
    """
    if len(params) != len(grads) or len(params) != len(state.m):
        raise InvalidArgumentError("Got {} parameters, {} gradients and state for {}!".format(
            len(params), len(grads), len(state.m)))
    step = state.step + 1
    for idx, (p, g) in enumerate(zip(params, grads)):
        if p.shape != g.shape or p.shape != state.m[idx].shape:
            raise InvalidArgumentError("Parameter {} shape {} doesn't match gradient {} or state {}!".format(
                idx, p.shape, g.shape, state.m[idx].shape))
        if not np.all(np.isfinite(g)):
            raise TrainingDivergenceError("Non-finite gradient for parameter {}".format(idx), step)

    updated = []
    for idx, (p, g) in enumerate(zip(params, grads)):
        state.m[idx] = beta1 * state.m[idx] + (1.0 - beta1) * g
        state.v[idx] = beta2 * state.v[idx] + (1.0 - beta2) * g * g
        m_hat = state.m[idx] / (1.0 - beta1 ** step)
        v_hat = state.v[idx] / (1.0 - beta2 ** step)
        updated.append(p - lr * m_hat / (np.sqrt(v_hat) + eps))
    state.step = step

    return updated, state


class Adam:
    DEFAULT_LR = 1e-3

    def __init__(self, params: List[Node], lr: float = DEFAULT_LR, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8, state: Optional[AdamState] = None):
        """
        :param state: moments to continue from, fresh zero moments if None
        """
        if not lr > 0.0:
            raise InvalidArgumentError("Learning rate must be positive, got {}!".format(lr))
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        shapes = [p.shape for p in self.params]
        if state is None:
            state = AdamState(shapes)
        elif [m.shape for m in state.m] != shapes or [v.shape for v in state.v] != shapes:
            raise InvalidArgumentError("Optimizer state doesn't match the {} parameters!".format(len(shapes)))
        self.state = state

    def step(self) -> None:
        values, self.state = adam_step([p.value for p in self.params], [p.grad for p in self.params], self.state,
                                       self.lr, self.beta1, self.beta2, self.eps)
        for p, value in zip(self.params, values):
            p.value = value
