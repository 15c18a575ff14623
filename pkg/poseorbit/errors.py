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

from typing import Optional


class PoseOrbitError(Exception):
    """
    Marker base for every error raised by the library.
    """
    pass


class InvalidArgumentError(PoseOrbitError, ValueError):
    pass


class ShapeError(InvalidArgumentError):

    def __init__(self, op: str, message: str):
        super().__init__("{}: {}".format(op, message))
        self.op = op


class OutOfDomainError(InvalidArgumentError):
    pass


class UnsupportedDimensionError(InvalidArgumentError):

    def __init__(self, dim: int, supported: str = "d=2"):
        super().__init__("Dimension {} not supported! Only {} is.".format(dim, supported))
        self.dim = dim


class VolumeTooLargeError(InvalidArgumentError):
    pass


class InsufficientDataError(InvalidArgumentError):
    pass


class ParseError(PoseOrbitError, ValueError):

    def __init__(self, message: str, line: int, path: Optional[str] = None):
        if path:
            text = "{}, line {}: {}".format(path, line, message)
        else:
            text = "line {}: {}".format(line, message)
        super().__init__(text)
        self.line = line
        self.path = path


class IncompatibleVolumeError(PoseOrbitError, RuntimeError):
    pass


class ConstructionError(PoseOrbitError, RuntimeError):
    pass


class NumericError(PoseOrbitError, ArithmeticError):

    def __init__(self, message: str, index: Optional[int] = None):
        if index is not None:
            message = "{} (batch index {})".format(message, index)
        super().__init__(message)
        self.index = index


class TrainingDivergenceError(NumericError):

    def __init__(self, message: str, step: int):
        super().__init__("{} at step {}".format(message, step))
        self.step = step


class TrainingFailureError(PoseOrbitError, RuntimeError):
    pass
