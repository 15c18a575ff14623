# -*- coding: utf-8 -*-
# vim: tabstop=8 expandtab shiftwidth=4 softtabstop=4

# This file is part of Pose Orbit library and tool.
# Pose Orbit is free software: you can
# redistribute it and/or modify it under the terms of the GNU General Public
# License as published by the Free Software Foundation, version 2.
#
# This program is distributed in the hope that it will be useful, but WITHOUT
# ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS
# FOR A PARTICULAR PURPOSE.  See the GNU General Public License for more
# details.
#
# You should have received a copy of the GNU General Public License along with
# this program; if not, write to the Free Software Foundation, Inc., 51
# Franklin Street, Fifth Floor, Boston, MA 02110-1301 USA.
#
# Copyright (c) Jari Turkia

from typing import Callable, List, Optional, Sequence, Tuple
import numpy as np
from ..errors import InvalidArgumentError


class Node:
    """
    Value in a computation graph. Holds its value, the gradient of the graph root
    with respect to it, the nodes it was computed from and a closure pushing its
    gradient back to them.
    """

    def __init__(self, value, parents: Sequence['Node'] = (), backward: Optional[Callable[[], None]] = None,
                 op: str = "leaf", name: Optional[str] = None):
        self.value = np.array(value, dtype=np.float64)
        self.grad = np.zeros_like(self.value)
        self.parents = tuple(parents)
        self._backward = backward
        self.op = op
        self.name = name

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape

    @property
    def is_leaf(self) -> bool:
        return not self.parents

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.value)

    def backward(self) -> None:
        backward(self)

    def __add__(self, other) -> 'Node':
        from .ops import add
        return add(self, as_node(other))

    def __radd__(self, other) -> 'Node':
        from .ops import add
        return add(as_node(other), self)

    def __sub__(self, other) -> 'Node':
        from .ops import sub
        return sub(self, as_node(other))

    def __rsub__(self, other) -> 'Node':
        from .ops import sub
        return sub(as_node(other), self)

    def __mul__(self, other) -> 'Node':
        from .ops import mul
        return mul(self, as_node(other))

    def __rmul__(self, other) -> 'Node':
        from .ops import mul
        return mul(as_node(other), self)

    def __neg__(self) -> 'Node':
        from .ops import scale
        return scale(self, -1.0)

    def __repr__(self) -> str:
        label = self.name if self.name else self.op
        return "Node({}, shape={})".format(label, self.shape)


def as_node(value) -> Node:
    if isinstance(value, Node):
        return value

    return Node(value, op="const")


def topological_order(root: Node) -> List[Node]:
    """
    Every node after all of its parents. Iterative, graphs can be deep.
    """
    order = []
    visited = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in reversed(node.parents):
            if id(parent) not in visited:
                stack.append((parent, False))

    return order


def backward(root: Node) -> None:
    """
    Reverse mode sweep from a scalar root. Gradients of every node in the graph
    are zeroed first, so leaves hold the gradient of this root only.
    :param root: scalar node
    """
    if root.value.size != 1:
        raise InvalidArgumentError("Backward needs a scalar root, got shape {}!".format(root.shape))

    order = topological_order(root)
    for node in order:
        node.zero_grad()
    root.grad = np.ones_like(root.value)
    for node in reversed(order):
        if node._backward is not None:
            node._backward()
