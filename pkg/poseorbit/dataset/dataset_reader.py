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
import csv
from typing import Dict, Tuple, Union
import numpy as np
from ..geometry import PointVolume, RasterSettings, VolumeReader
from ..errors import ParseError, InvalidArgumentError
from .dataset import Dataset
import logging

log = logging.getLogger(__name__)


class DatasetReader:
    """
    A dataset lives in two files sharing a stem:
    <stem>.csv   header theta,x0,...,x{W-1} and one row per sample
    <stem>.meta  key=value lines, then the volume after a [volume] line
    """
    DATA_SUFFIX = ".csv"
    META_SUFFIX = ".meta"
    VOLUME_SECTION = "[volume]"
    META_KEYS = ["count", "seed", "width", "splat_sigma", "noise_sigma", "domain_radius", "val_fraction"]
    INTEGER_KEYS = ("count", "seed", "width")

    def __init__(self, stem: str):
        directory = os.path.dirname(os.path.abspath(stem))
        if not os.path.exists(directory):
            raise InvalidArgumentError("Dataset directory '{}' doesn't exist!".format(directory))
        if not os.path.isdir(directory):
            raise InvalidArgumentError("Dataset directory '{}' is a file, not directory!".format(directory))

        self._stem = stem

    @property
    def data_filename(self) -> str:
        return "{}{}".format(self._stem, self.DATA_SUFFIX)

    @property
    def meta_filename(self) -> str:
        return "{}{}".format(self._stem, self.META_SUFFIX)

    def exists(self) -> bool:
        return os.path.isfile(self.data_filename) and os.path.isfile(self.meta_filename)

    def read(self) -> Dataset:
        if not self.exists():
            raise InvalidArgumentError("Cannot read dataset '{}'! Need both {} and {}.".format(
                self._stem, self.data_filename, self.meta_filename))

        meta, volume = self._read_meta(self.meta_filename)
        thetas, pixels = self._read_data(self.data_filename, meta['count'], meta['width'])
        raster = RasterSettings(meta['width'], meta['splat_sigma'], meta['domain_radius'])
        try:
            return Dataset(volume, thetas, pixels, raster, meta['noise_sigma'], meta['seed'],
                           meta['val_fraction'])
        except InvalidArgumentError as exc:
            raise ParseError(str(exc), 1, self.data_filename)

    def _read_meta(self, filename: str) -> Tuple[Dict[str, Union[int, float]], PointVolume]:
        log.debug("Reading dataset metadata: {}".format(filename))
        with open(filename, "r", encoding="utf-8") as meta_file:
            lines = meta_file.read().splitlines()

        meta = {}
        volume_start = None
        for line_no, raw_line in enumerate(lines, start=1):
            line = raw_line.strip()
            if not line:
                continue
            if line == self.VOLUME_SECTION:
                volume_start = line_no
                break
            key, sep, value = line.partition("=")
            if not sep:
                raise ParseError("Expected key=value, got '{}'".format(line), line_no, filename)
            key = key.strip()
            if key not in self.META_KEYS:
                raise ParseError("Unknown key '{}'".format(key), line_no, filename)
            try:
                meta[key] = int(value) if key in self.INTEGER_KEYS else float(value)
            except ValueError:
                kind = "an integer" if key in self.INTEGER_KEYS else "a number"
                raise ParseError("Value of '{}' is not {}: '{}'".format(key, kind, value), line_no, filename)

        missing = [key for key in self.META_KEYS if key not in meta]
        if missing:
            raise ParseError("Missing keys: {}".format(", ".join(missing)), len(lines) + 1, filename)
        if volume_start is None:
            raise ParseError("Missing {} section".format(self.VOLUME_SECTION), len(lines) + 1, filename)

        volume = VolumeReader.parse_lines(lines[volume_start:], filename, volume_start + 1)

        return meta, volume

    @staticmethod
    def _read_data(filename: str, count: int, width: int) -> Tuple[np.ndarray, np.ndarray]:
        log.debug("Reading dataset images: {}".format(filename))
        expected_header = ["theta"] + ["x{}".format(j) for j in range(width)]
        thetas = np.empty(count)
        pixels = np.empty((count, width))
        row_count = 0
        with open(filename, "r", encoding="utf-8", newline="") as data_file:
            reader = csv.reader(data_file)
            header = next(reader, None)
            if header != expected_header:
                raise ParseError("Bad header, expected theta,x0,...,x{}".format(width - 1), 1, filename)
            for row in reader:
                line_no = reader.line_num
                if not row:
                    continue
                if len(row) != width + 1:
                    raise ParseError("Expected {} fields, got {}".format(width + 1, len(row)), line_no, filename)
                if row_count >= count:
                    raise ParseError("More rows than the {} announced in metadata".format(count), line_no, filename)
                try:
                    values = [float(field) for field in row]
                except ValueError:
                    raise ParseError("Non-numeric field", line_no, filename)
                thetas[row_count] = values[0]
                pixels[row_count] = values[1:]
                row_count += 1
            last_line = reader.line_num

        if row_count != count:
            raise ParseError("Got {} rows, metadata announced {}".format(row_count, count), last_line + 1, filename)

        return thetas, pixels
