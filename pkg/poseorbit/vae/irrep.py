import math
import numpy as np
from ..errors import InvalidArgumentError
from ..geometry import canonical_angle
from ..nn import Node, ops


class IrrepEmbedding:
    """
    Direct sum of the SO(2) irreducible representations at frequencies 1..K:
    block k is the rotation by k*theta.
    """

    def __init__(self, theta: float, k: int):
        if int(k) != k or k < 1:
            raise InvalidArgumentError("Need K >= 1 frequencies, got {}!".format(k))
        self.theta = canonical_angle(theta)
        self.k = int(k)

        matrix = np.zeros((2 * self.k, 2 * self.k))
        for freq in range(1, self.k + 1):
            c = math.cos(freq * theta)
            s = math.sin(freq * theta)
            block = 2 * (freq - 1)
            matrix[block:block + 2, block:block + 2] = [[c, -s], [s, c]]
        matrix.setflags(write=False)
        self._matrix = matrix

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def size(self) -> int:
        return 2 * self.k


def irrep_matrix(theta: float, k: int) -> IrrepEmbedding:
    return IrrepEmbedding(theta, k)


def rotate_content(theta: Node, content: Node, k: int) -> Node:
    """
    T(theta) c for a batch of angles, differentiable in theta and c.
    :param theta: angles, shape (B,)
    :param content: vector c, shape (2K,), pairs (c[2j], c[2j+1]) rotate at frequency j+1
    :return: node of shape (B, 2K)
    """
    if content.shape != (2 * k,):
        raise InvalidArgumentError("Content vector must have shape ({},), got {}!".format(2 * k, content.shape))

    freqs = ops.constant(np.arange(1, k + 1, dtype=np.float64))
    angles = ops.mul(ops.reshape(theta, (-1, 1)), freqs)
    cos_a = ops.cos(angles)
    sin_a = ops.sin(angles)
    c_even = ops.take(content, list(range(0, 2 * k, 2)))
    c_odd = ops.take(content, list(range(1, 2 * k, 2)))

    first = ops.sub(ops.mul(cos_a, c_even), ops.mul(sin_a, c_odd))
    second = ops.add(ops.mul(sin_a, c_even), ops.mul(cos_a, c_odd))
    # Interleave back into (first_0, second_0, first_1, second_1, ...)
    order = [j // 2 + (k if j % 2 else 0) for j in range(2 * k)]

    return ops.take(ops.concat([first, second]), order)