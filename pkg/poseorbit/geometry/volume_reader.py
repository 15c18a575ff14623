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
import re
from typing import Iterable, Optional, Tuple
from .volume import PointVolume
from ..errors import ParseError, InvalidArgumentError
import logging

log = logging.getLogger(__name__)


class VolumeReader:
    """
    Point volume text format:
    dim=<d> radius=<r>
    x_1 ... x_d mass
    """
    HEADER_RE = re.compile(r"^dim=(\S+)\s+radius=(\S+)$")

    def __init__(self, volume_filename: str):
        directory = os.path.dirname(os.path.abspath(volume_filename))
        if not os.path.isdir(directory):
            raise InvalidArgumentError("Volume directory '{}' doesn't exist!".format(directory))
        if os.path.isdir(volume_filename):
            raise InvalidArgumentError("Volume path '{}' is a directory, not file!".format(volume_filename))

        self._path = volume_filename

    @property
    def path(self) -> str:
        return self._path

    def exists(self) -> bool:
        return os.path.isfile(self._path)

    def read(self) -> PointVolume:
        if not self.exists():
            raise InvalidArgumentError("Cannot read volume! File '{}' doesn't exist.".format(self._path))

        log.debug("Reading volume file: {}".format(self._path))
        with open(self._path, "r", encoding="utf-8") as volume_file:
            return self.parse_lines(volume_file, self._path)

    @staticmethod
    def parse_lines(lines: Iterable[str], path: Optional[str] = None, first_line: int = 1) -> PointVolume:
        """
        Parse a volume from text lines.
        :param lines: iterable of text lines, header first
        :param path: filename for error messages
        :param first_line: line number of the first line, when embedded into another file
        :return: parsed volume
        """
        dim = None
        radius = None
        points = []
        masses = []
        line_no = first_line - 1
        for line_no, raw_line in enumerate(lines, start=first_line):
            line = raw_line.strip()
            if not line:
                continue
            if dim is None:
                dim, radius = VolumeReader._parse_header(line, line_no, path)
                continue

            fields = line.split()
            if len(fields) != dim + 1:
                raise ParseError("Expected {} coordinates and a mass, got {} fields".format(dim, len(fields)),
                                 line_no, path)
            try:
                values = [float(field) for field in fields]
            except ValueError:
                raise ParseError("Non-numeric field in '{}'".format(line), line_no, path)
            points.append(values[:-1])
            masses.append(values[-1])

        if dim is None:
            raise ParseError("Missing header 'dim=<d> radius=<r>'", line_no + 1, path)
        if not points:
            raise ParseError("Volume has no points", line_no + 1, path)

        try:
            return PointVolume(points, masses, radius)
        except InvalidArgumentError as exc:
            raise ParseError(str(exc), line_no, path)

    @staticmethod
    def _parse_header(line: str, line_no: int, path: Optional[str]) -> Tuple[int, float]:
        match = VolumeReader.HEADER_RE.match(line)
        if not match:
            raise ParseError("Bad header '{}', expected 'dim=<d> radius=<r>'".format(line), line_no, path)
        try:
            dim = int(match.group(1))
            radius = float(match.group(2))
        except ValueError:
            raise ParseError("Bad header values in '{}'".format(line), line_no, path)
        if dim < 2:
            raise ParseError("Dimension must be >= 2, got {}".format(dim), line_no, path)

        return dim, radius
