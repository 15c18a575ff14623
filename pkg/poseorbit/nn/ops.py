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

"""
Differentiable operations. Each builds a new Node and a closure adding the
node's gradient into its parents' gradients.
"""

from typing import Optional, Sequence
import numpy as np
from scipy.special import expit
from ..errors import ShapeError, NumericError
from .node import Node, as_node


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """
    Sum a broadcast gradient back down to the operand shape.
    """
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)

    return grad


def _broadcast_shape(op: str, a: Node, b: Node):
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(op, "shapes {} and {} don't broadcast".format(a.shape, b.shape))


def add(a: Node, b: Node) -> Node:
    _broadcast_shape("add", a, b)

    def _backward():
        a.grad += _unbroadcast(out.grad, a.shape)
        b.grad += _unbroadcast(out.grad, b.shape)

    out = Node(a.value + b.value, (a, b), _backward, "add")
    return out


def sub(a: Node, b: Node) -> Node:
    _broadcast_shape("sub", a, b)

    def _backward():
        a.grad += _unbroadcast(out.grad, a.shape)
        b.grad -= _unbroadcast(out.grad, b.shape)

    out = Node(a.value - b.value, (a, b), _backward, "sub")
    return out


def mul(a: Node, b: Node) -> Node:
    _broadcast_shape("mul", a, b)

    def _backward():
        a.grad += _unbroadcast(out.grad * b.value, a.shape)
        b.grad += _unbroadcast(out.grad * a.value, b.shape)

    out = Node(a.value * b.value, (a, b), _backward, "mul")
    return out


def scale(a: Node, factor: float) -> Node:
    def _backward():
        a.grad += factor * out.grad

    out = Node(factor * a.value, (a,), _backward, "scale")
    return out


def matvec(w: Node, x: Node) -> Node:
    """
    Affine map without bias: w (out, in) applied to x (in,) or to every row of x (B, in).
    """
    if w.value.ndim != 2 or x.value.ndim not in (1, 2) or w.shape[1] != x.shape[-1]:
        raise ShapeError("matvec", "matrix {} cannot be applied to {}".format(w.shape, x.shape))

    def _backward():
        if x.value.ndim == 1:
            w.grad += np.outer(out.grad, x.value)
        else:
            w.grad += out.grad.T @ x.value
        x.grad += out.grad @ w.value

    out = Node(x.value @ w.value.T, (w, x), _backward, "matvec")
    return out


def rectifier(a: Node) -> Node:
    def _backward():
        a.grad += out.grad * (a.value > 0.0)

    out = Node(np.maximum(a.value, 0.0), (a,), _backward, "rectifier")
    return out


def sigmoid(a: Node) -> Node:
    def _backward():
        a.grad += out.grad * out.value * (1.0 - out.value)

    out = Node(expit(a.value), (a,), _backward, "sigmoid")
    return out


def tanh(a: Node) -> Node:
    def _backward():
        a.grad += out.grad * (1.0 - out.value ** 2)

    out = Node(np.tanh(a.value), (a,), _backward, "tanh")
    return out


def exp(a: Node) -> Node:
    def _backward():
        a.grad += out.grad * out.value

    out = Node(np.exp(a.value), (a,), _backward, "exp")
    return out


def log(a: Node) -> Node:
    if np.any(a.value <= 0.0):
        raise NumericError("log of non-positive value")

    def _backward():
        a.grad += out.grad / a.value

    out = Node(np.log(a.value), (a,), _backward, "log")
    return out


def cos(a: Node) -> Node:
    def _backward():
        a.grad -= out.grad * np.sin(a.value)

    out = Node(np.cos(a.value), (a,), _backward, "cos")
    return out


def sin(a: Node) -> Node:
    def _backward():
        a.grad += out.grad * np.cos(a.value)

    out = Node(np.sin(a.value), (a,), _backward, "sin")
    return out


def atan2(y: Node, x: Node) -> Node:
    """
    Angle of the vector (x, y), in (-pi, pi].
    """
    if y.shape != x.shape:
        raise ShapeError("atan2", "shapes {} and {} differ".format(y.shape, x.shape))

    def _backward():
        norm2 = x.value ** 2 + y.value ** 2
        # Gradient is undefined at the origin, leave it at zero there
        safe = np.where(norm2 > 0.0, norm2, 1.0)
        y.grad += np.where(norm2 > 0.0, out.grad * x.value / safe, 0.0)
        x.grad -= np.where(norm2 > 0.0, out.grad * y.value / safe, 0.0)

    out = Node(np.arctan2(y.value, x.value), (y, x), _backward, "atan2")
    return out


def clip(a: Node, low: float, high: float) -> Node:
    """
    Clamp into [low, high]. Gradient passes only where the value was inside.
    """
    def _backward():
        inside = (a.value >= low) & (a.value <= high)
        a.grad += out.grad * inside

    out = Node(np.clip(a.value, low, high), (a,), _backward, "clip")
    return out


def concat(nodes: Sequence[Node], axis: int = -1) -> Node:
    if not nodes:
        raise ShapeError("concat", "nothing to concatenate")
    try:
        value = np.concatenate([n.value for n in nodes], axis=axis)
    except ValueError as exc:
        raise ShapeError("concat", str(exc))
    sizes = [n.shape[axis] for n in nodes]
    bounds = np.cumsum(sizes)[:-1]

    def _backward():
        for node, part in zip(nodes, np.split(out.grad, bounds, axis=axis)):
            node.grad += part

    out = Node(value, tuple(nodes), _backward, "concat")
    return out


def take(a: Node, indices, axis: int = -1) -> Node:
    """
    Select entries along the last axis. An integer index drops the axis.
    """
    if axis not in (-1, a.value.ndim - 1):
        raise ShapeError("take", "only the last axis is supported, got axis {}".format(axis))
    scalar = np.ndim(indices) == 0
    idx = np.atleast_1d(np.asarray(indices, dtype=int))
    if idx.size and (idx.max() >= a.shape[-1] or idx.min() < -a.shape[-1]):
        raise ShapeError("take", "index out of range for shape {}".format(a.shape))

    def _backward():
        grad = out.grad[..., np.newaxis] if scalar else out.grad
        full = np.zeros((a.shape[-1],) + a.shape[:-1])
        np.add.at(full, idx, np.moveaxis(grad, -1, 0))
        a.grad += np.moveaxis(full, 0, -1)

    value = a.value[..., idx]
    if scalar:
        value = value[..., 0]
    out = Node(value, (a,), _backward, "take")
    return out


def sum(a: Node, axis: Optional[int] = None) -> Node:
    def _backward():
        grad = out.grad if axis is None else np.expand_dims(out.grad, axis)
        a.grad += np.broadcast_to(grad, a.shape)

    out = Node(np.sum(a.value, axis=axis), (a,), _backward, "sum")
    return out


def mean(a: Node, axis: Optional[int] = None) -> Node:
    count = a.value.size if axis is None else a.shape[axis]

    return scale(sum(a, axis), 1.0 / count)


def binary_cross_entropy(logits: Node, target) -> Node:
    """
    Elementwise -t log(sigmoid(l)) - (1-t) log(1-sigmoid(l)), computed from the logits l.
    """
    t = np.asarray(target, dtype=np.float64)
    if t.shape != logits.shape:
        raise ShapeError("binary_cross_entropy", "logits {} and targets {} differ".format(logits.shape, t.shape))
    z = logits.value

    def _backward():
        logits.grad += out.grad * (expit(z) - t)

    out = Node(np.maximum(z, 0.0) - z * t + np.log1p(np.exp(-np.abs(z))), (logits,), _backward, "bce")
    return out


def constant(value) -> Node:
    return as_node(value)


def reshape(a: Node, shape) -> Node:
    try:
        value = a.value.reshape(shape)
    except ValueError as exc:
        raise ShapeError("reshape", str(exc))

    def _backward():
        a.grad += out.grad.reshape(a.shape)

    out = Node(value, (a,), _backward, "reshape")
    return out
