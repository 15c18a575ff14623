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

import os
from typing import Dict, Tuple
import numpy as np
from lxml import etree
from ..errors import InvalidArgumentError, ParseError
import logging

log = logging.getLogger(__name__)


class Checkpoint:
    """
    Named parameter arrays plus string settings.
    """

    def __init__(self, settings: Dict[str, str] = None, tensors: Dict[str, np.ndarray] = None):
        self.settings = dict(settings) if settings else {}
        self.tensors = {name: np.array(value, dtype=np.float64) for name, value in (tensors or {}).items()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Checkpoint):
            return NotImplemented
        if self.settings != other.settings or sorted(self.tensors) != sorted(other.tensors):
            return False

        return all(np.array_equal(self.tensors[k], other.tensors[k]) for k in self.tensors)


class CheckpointReader:
    FORMAT_VERSION = 1
    SCHEMA_FILENAME = os.path.join(os.path.dirname(os.path.abspath(__file__)), os.pardir, "xml", "checkpoint.xsd")

    def __init__(self, checkpoint_filename: str):
        directory = os.path.dirname(os.path.abspath(checkpoint_filename))
        if not os.path.isdir(directory):
            raise InvalidArgumentError("Checkpoint directory '{}' doesn't exist!".format(directory))
        if os.path.isdir(checkpoint_filename):
            raise InvalidArgumentError("Checkpoint path '{}' is a directory, not file!".format(checkpoint_filename))

        self._path = checkpoint_filename

    @property
    def path(self) -> str:
        return self._path

    @classmethod
    def _schema(cls) -> etree.XMLSchema:
        schema_filename = os.path.normpath(cls.SCHEMA_FILENAME)
        schema_doc = etree.parse(schema_filename)

        return etree.XMLSchema(schema_doc)

    def read(self) -> Checkpoint:
        if not os.path.isfile(self._path):
            raise InvalidArgumentError("Cannot read checkpoint! File '{}' doesn't exist.".format(self._path))

        log.debug("Reading checkpoint: {}".format(self._path))
        try:
            root = etree.parse(self._path)
        except etree.XMLSyntaxError as exc:
            raise ParseError("Not well-formed XML: {}".format(exc.msg), exc.lineno or 0, self._path)
        schema = self._schema()
        if not schema.validate(root):
            error = schema.error_log.last_error
            raise ParseError("Checkpoint is not valid according to XSD file {}! Error: {}".format(
                os.path.normpath(self.SCHEMA_FILENAME), error.message), error.line, self._path)

        checkpoint_elem = root.getroot()
        if int(checkpoint_elem.attrib['format']) != self.FORMAT_VERSION:
            raise ParseError("Unsupported checkpoint format {}".format(checkpoint_elem.attrib['format']),
                             checkpoint_elem.sourceline, self._path)

        settings = {}
        for setting_elem in checkpoint_elem.iter(tag="setting"):
            settings[setting_elem.attrib['name']] = setting_elem.attrib['value']

        tensors = {}
        for tensor_elem in checkpoint_elem.iter(tag="tensor"):
            name, value = self._parse_tensor(tensor_elem)
            if name in tensors:
                raise ParseError("Duplicate tensor '{}'".format(name), tensor_elem.sourceline, self._path)
            tensors[name] = value

        return Checkpoint(settings, tensors)

    def _parse_tensor(self, tensor_elem) -> Tuple[str, np.ndarray]:
        name = tensor_elem.attrib['name']
        shape = tuple(int(s) for s in tensor_elem.attrib['shape'].split())
        values = np.array([float(v) for v in (tensor_elem.text or "").split()], dtype=np.float64)
        expected = int(np.prod(shape)) if shape else 1
        if values.size != expected:
            raise ParseError("Tensor '{}' of shape {} has {} values".format(name, shape, values.size),
                             tensor_elem.sourceline, self._path)

        return name, values.reshape(shape)
