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

from lxml import etree
from .checkpoint_reader import CheckpointReader, Checkpoint
import logging

log = logging.getLogger(__name__)


class CheckpointWriter(CheckpointReader):
    XML_NS = r"checkpoint.xsd"
    FLOAT_FORMAT = "{:.17g}"

    def write(self, checkpoint: Checkpoint) -> Checkpoint:
        """
        Write settings and tensors, both in sorted key order
        :param checkpoint: checkpoint to write
        :return: checkpoint as read back from the file
        """
        xml_schema_url = r"http://www.w3.org/2001/XMLSchema-instance"
        location_attribute = '{{{}}}noNamespaceSchemaLocation'.format(xml_schema_url)

        checkpoint_elem = etree.Element('checkpoint', attrib={location_attribute: self.XML_NS},
                                        nsmap={'xsi': xml_schema_url})
        checkpoint_elem.attrib['format'] = str(self.FORMAT_VERSION)
        for name in sorted(checkpoint.settings):
            setting_elem = etree.Element('setting', name=name, value=str(checkpoint.settings[name]))
            checkpoint_elem.append(setting_elem)

        for name in sorted(checkpoint.tensors):
            value = checkpoint.tensors[name]
            tensor_elem = etree.Element('tensor', name=name, shape=" ".join(str(s) for s in value.shape))
            tensor_elem.text = " ".join(self.FLOAT_FORMAT.format(float(v)) for v in value.reshape(-1))
            checkpoint_elem.append(tensor_elem)

        et = etree.ElementTree(checkpoint_elem)
        et.write(self._path, xml_declaration=True, encoding='UTF-8', pretty_print=True)
        log.debug("Wrote {} settings and {} tensors into {}".format(
            len(checkpoint.settings), len(checkpoint.tensors), self._path))

        return self.read()
