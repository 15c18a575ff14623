from typing import Dict, List, Sequence
import numpy as np
from ..errors import InvalidArgumentError, ShapeError
from .node import Node
from . import ops


class Mlp:
    """
    Fully connected network, rectifier between layers.
    Output activation is 'linear' or 'sigmoid'.
    """
    OUTPUT_ACTIVATIONS = ("linear", "sigmoid")

    def __init__(self, widths: Sequence[int], output_activation: str = "linear",
                 rng: np.random.Generator = None, name: str = "mlp"):
        widths = [int(w) for w in widths]
        if len(widths) < 2 or min(widths) < 1:
            raise InvalidArgumentError("MLP needs at least input and output widths >= 1, got {}!".format(widths))
        if output_activation not in self.OUTPUT_ACTIVATIONS:
            raise InvalidArgumentError("Unknown output activation '{}'! Choices: {}".format(
                output_activation, ", ".join(self.OUTPUT_ACTIVATIONS)))
        if rng is None:
            rng = np.random.default_rng(0)

        self.widths = widths
        self.output_activation = output_activation
        self.name = name
        self.weights = []  # type: List[Node]
        self.biases = []  # type: List[Node]
        for layer, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
            # He initialization, rectifier follows every hidden layer
            w = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_out, fan_in))
            self.weights.append(Node(w, name="{}.{}.weight".format(name, layer)))
            self.biases.append(Node(np.zeros(fan_out), name="{}.{}.bias".format(name, layer)))

    @property
    def depth(self) -> int:
        return len(self.weights)

    @property
    def input_width(self) -> int:
        return self.widths[0]

    @property
    def output_width(self) -> int:
        return self.widths[-1]

    def parameters(self) -> List[Node]:
        params = []
        for w, b in zip(self.weights, self.biases):
            params.extend([w, b])

        return params

    @property
    def parameter_count(self) -> int:
        return int(sum(p.value.size for p in self.parameters()))

    def forward(self, x: Node, raw_output: bool = False) -> Node:
        """
        :param x: input, shape (in,) or (B, in)
        :param raw_output: skip the output activation, sigmoid output then gives logits
        :return: output node
        """
        if x.shape[-1] != self.input_width:
            raise ShapeError(self.name, "input width {} but network expects {}".format(x.shape[-1], self.input_width))

        h = x
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = ops.add(ops.matvec(w, h), b)
            if layer < self.depth - 1:
                h = ops.rectifier(h)
        if self.output_activation == "sigmoid" and not raw_output:
            h = ops.sigmoid(h)

        return h

    def state(self) -> Dict[str, np.ndarray]:
        return {p.name: p.value.copy() for p in self.parameters()}

    def load_state(self, state: Dict[str, np.ndarray]) -> None:
        for p in self.parameters():
            if p.name not in state:
                raise InvalidArgumentError("Missing parameter '{}'!".format(p.name))
            value = np.asarray(state[p.name], dtype=np.float64)
            if value.shape != p.shape:
                raise ShapeError(p.name, "stored shape {} but layer has {}".format(value.shape, p.shape))
            p.value = value.copy()
            p.zero_grad()

    def __str__(self) -> str:
        return "{} {} ({}), {} parameters".format(self.name, "-".join(str(w) for w in self.widths),
                                                  self.output_activation, self.parameter_count)
