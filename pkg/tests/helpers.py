#!/usr/bin/env python
# -*- coding:utf-8 -*-
#
# ----------------------------------------------------------------------
# delayLyap - Stability tests for linear time-delay systems based on the
# delay Lyapunov matrix.
# Copyright (C) 2026 The delayLyap developers
#
# This file is part of delayLyap.
#
# delayLyap is free software: you can redistribute it and/or modify it
# under the terms of the GNU Lesser General Public License as published
# by the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# delayLyap is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Lesser General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public
# License along with delayLyap. If not, see <http://www.gnu.org/licenses/>.
# ----------------------------------------------------------------------
#

"""Example systems and the logging set-up shared by all test cases."""

import logging
import os
import unittest

import numpy as np

from delaylyap.system import TimeDelaySystem


SLOW = os.environ.get('DELAYLYAP_SLOW_TESTS') == '1'
slow = unittest.skipUnless(
    SLOW, "slow reproduction run; set DELAYLYAP_SLOW_TESTS=1")

# (a, h1) parameter rows of the two-state example with a triangular
# delayed matrix; the first two are stable, the last two unstable
STABLE_ROWS = [(-1.25, 0.5), (-1.25, 0.75)]
UNSTABLE_ROWS = [(1.25, 0.5), (1.25, 1.25)]


def triangular_example(a, h):
    """x'(t) = [[-1, 0.5], [0, a]] x(t - h)."""
    return TimeDelaySystem([(h, [[-1.0, 0.5], [0.0, a]])])


def triangular_example_dict(a, h):
    return {'n': 2, 'terms': [{'delay': h, 'A': [[-1.0, 0.5], [0.0, a]]}]}


def pd_controller_dict(kp, kd):
    """Fourth order plant under x'(t) = A0 x(t) + A1 x(t - 5)."""
    A0 = [[0, 1, 0, 0],
          [0, 0, 1, 0],
          [0, 0, 0, 1],
          [-3.0276 - 0.038 * kp, -1.1484, -9.3364, -0.1276]]
    A1 = np.zeros((4, 4))
    A1[3, 0] = -0.038 * kd
    return {'n': 4, 'terms': [{'delay': 0.0, 'A': A0},
                              {'delay': 5.0, 'A': A1.tolist()}]}


def scalar_system(*terms, **kwargs):
    """Scalar system from (delay, coefficient) pairs."""
    return TimeDelaySystem([(h, [[c]]) for h, c in terms], **kwargs)


class LoggingTestCase(unittest.TestCase):

    def setUp(self):
        self.logger = logging.getLogger('delaylyap')
        self.logger.setLevel(logging.DEBUG)
        # Create console handler for debugging:
        self.handler = logging.StreamHandler()
        self.handler.setLevel(logging.DEBUG)
        chformatter = logging.Formatter(
            '%(name)-13s %(levelname)-8s: %(message)s')
        self.handler.setFormatter(chformatter)
        self.logger.addHandler(logging.NullHandler())
        # (uncomment this to enable output for all tests):
        #self.logger.addHandler(self.handler)

    def tearDown(self):
        for h in self.logger.handlers[::-1]:
            h.close()
            self.logger.removeHandler(h)
