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

from typing import List
from .volume import PointVolume
from .volume_reader import VolumeReader
import logging

log = logging.getLogger(__name__)


class VolumeWriter(VolumeReader):
    FLOAT_FORMAT = "{:.17g}"

    def write(self, volume: PointVolume) -> PointVolume:
        """
        Write a volume into text file
        :param volume: volume to write
        :return: volume as read back from the file
        """
        with open(self._path, "w", encoding="utf-8") as volume_file:
            volume_file.write("\n".join(self.format_lines(volume)))
            volume_file.write("\n")
        log.debug("Wrote {} into {}".format(volume, self._path))

        return self.read()

    @classmethod
    def format_lines(cls, volume: PointVolume) -> List[str]:
        lines = ["dim={} radius={}".format(volume.dim, cls.FLOAT_FORMAT.format(volume.domain_radius))]
        for point, mass in zip(volume.points, volume.masses):
            fields = [cls.FLOAT_FORMAT.format(float(x)) for x in point]
            fields.append(cls.FLOAT_FORMAT.format(float(mass)))
            lines.append(" ".join(fields))

        return lines
