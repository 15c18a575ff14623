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

import csv
from ..geometry import VolumeWriter
from .dataset import Dataset
from .dataset_reader import DatasetReader
import logging

log = logging.getLogger(__name__)


class DatasetWriter(DatasetReader):
    FLOAT_FORMAT = "{:.17g}"

    def write(self, dataset: Dataset) -> Dataset:
        """
        Write dataset images and metadata
        :param dataset: dataset to write
        :return: dataset as read back from the files
        """
        fmt = self.FLOAT_FORMAT.format
        with open(self.data_filename, "w", encoding="utf-8", newline="") as data_file:
            writer = csv.writer(data_file, lineterminator="\n")
            writer.writerow(["theta"] + ["x{}".format(j) for j in range(dataset.width)])
            for theta, row in zip(dataset.thetas, dataset.pixels):
                writer.writerow([fmt(float(theta))] + [fmt(float(p)) for p in row])

        meta = {
            'count': str(dataset.count),
            'seed': str(dataset.seed),
            'width': str(dataset.width),
            'splat_sigma': fmt(dataset.raster.splat_sigma),
            'noise_sigma': fmt(dataset.noise_sigma),
            'domain_radius': fmt(dataset.raster.domain_radius),
            'val_fraction': fmt(dataset.val_fraction),
        }
        with open(self.meta_filename, "w", encoding="utf-8") as meta_file:
            for key in self.META_KEYS:
                meta_file.write("{}={}\n".format(key, meta[key]))
            meta_file.write("{}\n".format(self.VOLUME_SECTION))
            for line in VolumeWriter.format_lines(dataset.volume):
                meta_file.write("{}\n".format(line))
        log.info("Wrote {} into {} and {}".format(dataset, self.data_filename, self.meta_filename))

        return self.read()


def save_dataset(d: Dataset, path: str) -> Dataset:
    return DatasetWriter(path).write(d)


def load_dataset(path: str) -> Dataset:
    return DatasetReader(path).read()
