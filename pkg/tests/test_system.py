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

import io
import json
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from delaylyap import system
from delaylyap.system import TimeDelaySystem, SystemValidationError
from tests.helpers import (
    LoggingTestCase, scalar_system, triangular_example_dict)


class TestConstruction(LoggingTestCase):

    def test_sorts_delays_with_warning(self):
        with self.assertLogs('delaylyap.system', level='WARNING') as cm:
            tds = scalar_system((2.0, 0.3), (0.0, -2.0), (1.0, -0.5))
        self.assertIn('not sorted', cm.output[0])
        assert_array_equal(tds.delays, [0., 1., 2.])
        self.assertEqual(tds.matrices[0][0, 0], -2.0)
        self.assertEqual(tds.matrices[2][0, 0], 0.3)

    def test_merges_duplicates(self):
        with self.assertLogs('delaylyap.system', level='WARNING'):
            tds = scalar_system((0.0, -1.0), (1.0, 0.25), (1.0, 0.25))
        self.assertEqual(tds.m, 1)
        self.assertEqual(tds.matrices[1][0, 0], 0.5)

    def test_inserts_zero_undelayed_term(self):
        tds = scalar_system((1.0, -1.0))
        assert_array_equal(tds.delays, [0., 1.])
        assert_array_equal(tds.matrices[0], [[0.]])
        self.assertEqual(tds.H, 1.0)
        self.assertEqual(tds.m, 1)
        assert_array_equal(tds.W, np.eye(1))

    def test_arrays_are_read_only(self):
        tds = scalar_system((0.0, -1.0), (1.0, 0.5))
        with self.assertRaises(ValueError):
            tds.matrices[1][0, 0] = 5.0
        with self.assertRaises(ValueError):
            tds.W[0, 0] = 2.0


class TestValidation(LoggingTestCase):

    def assertCode(self, code, *args, **kwargs):
        with self.assertRaises(SystemValidationError) as cm:
            TimeDelaySystem(*args, **kwargs)
        self.assertEqual(cm.exception.code, code)
        self.assertTrue(str(cm.exception).startswith(code))

    def test_non_square(self):
        self.assertCode(system.NON_SQUARE, [(0, [[1., 2.]]), (1, [[1.]])])
        self.assertCode(system.NON_SQUARE, [(1, [[1.]])], W=np.eye(2))

    def test_duplicate_delay(self):
        self.assertCode(system.DUPLICATE_DELAY,
                        [(1.0, [[1.]]), (1.0, [[2.]])],
                        merge_duplicates=False)

    def test_invalid_delay(self):
        self.assertCode(system.INVALID_DELAY, [(-1.0, [[1.]])])

    def test_no_delayed_matrix(self):
        self.assertCode(system.NO_NONTRIVIAL_DELAYED_MATRIX, [(0, [[-1.]])])
        self.assertCode(system.NO_NONTRIVIAL_DELAYED_MATRIX,
                        [(0, [[-1.]]), (1, [[0.]])])
        self.assertCode(system.NO_NONTRIVIAL_DELAYED_MATRIX, [])

    def test_weight_matrix(self):
        self.assertCode(system.W_NOT_PD, [(1, [[-1.]])], W=[[-1.]])
        self.assertCode(system.W_NOT_PD, [(1, -np.eye(2))],
                        W=[[1., 1.], [0., 1.]])
        self.assertCode(system.W_NOT_PD, [(1, -np.eye(2))],
                        W=[[1., 0.], [0., 0.]])

    def test_non_finite(self):
        self.assertCode(system.NON_FINITE, [(1, [[np.inf]])])
        self.assertCode(system.NON_FINITE, [(1, [[1.]])], W=[[np.nan]])

    def test_skip_validation(self):
        tds = TimeDelaySystem([(0, [[-1.]])], validate=False)
        self.assertEqual(tds.m, 0)
        self.assertEqual(tds.H, 0.0)
        with self.assertRaises(SystemValidationError):
            system.validate(tds)

    def test_validation_error_is_value_error(self):
        self.assertTrue(issubclass(SystemValidationError, ValueError))


class TestCommensurate(LoggingTestCase):

    def test_integer_delays(self):
        tds = scalar_system((0.0, -2.0), (1.0, -0.5), (2.0, 0.3))
        comm = system.commensurate(tds)
        self.assertTrue(comm.exact)
        self.assertAlmostEqual(comm.basic_delay, 1.0)
        self.assertEqual(comm.multipliers, (0, 1, 2))
        self.assertEqual(comm.segments, 2)

    def test_fractional_delays(self):
        tds = scalar_system((0.5, -0.5), (0.75, 0.2))
        comm = system.commensurate(tds)
        self.assertTrue(comm.exact)
        self.assertAlmostEqual(comm.basic_delay, 0.25)
        self.assertEqual(comm.multipliers, (0, 2, 3))

    def test_single_delay(self):
        tds = scalar_system((0.7, -1.0))
        comm = system.commensurate(tds)
        self.assertTrue(comm.exact)
        self.assertAlmostEqual(comm.basic_delay, 0.7)
        self.assertEqual(comm.segments, 1)

    def test_incommensurate(self):
        tds = scalar_system((1.0, -0.5), (np.sqrt(2.0), 0.2))
        self.assertFalse(system.commensurate(tds).exact)

    def test_reconstructed_delays(self):
        for delays in ([0.5, 0.75], [0.3, 0.9, 1.2], [1.0, 1.25, 2.0]):
            tds = scalar_system(*[(h, -0.1) for h in delays])
            comm = system.commensurate(tds)
            rebuilt = scalar_system(
                *[(k * comm.basic_delay, -0.1) for k in comm.multipliers[1:]])
            again = system.commensurate(rebuilt)
            self.assertTrue(again.exact)
            self.assertEqual(again.multipliers, comm.multipliers)
            self.assertAlmostEqual(again.basic_delay, comm.basic_delay)

    def test_multiplier_cap(self):
        tds = scalar_system((1.0, -0.5), (1.25, 0.2))
        self.assertTrue(system.commensurate(tds).exact)
        self.assertFalse(system.commensurate(tds, max_multiplier=4).exact)


class TestSerialization(LoggingTestCase):

    def test_from_dict(self):
        tds = TimeDelaySystem.from_dict(triangular_example_dict(-1.25, 0.5))
        self.assertEqual(tds.n, 2)
        assert_array_equal(tds.delays, [0., 0.5])
        assert_array_equal(tds.matrices[1], [[-1., 0.5], [0., -1.25]])

    def test_roundtrip(self):
        tds = scalar_system((0.0, -2.0), (1.0, -0.5), W=[[3.0]])
        again = TimeDelaySystem.from_dict(tds.to_dict())
        assert_array_equal(again.delays, tds.delays)
        assert_array_equal(again.W, [[3.0]])

    def test_load_from_buffer(self):
        buf = io.StringIO(json.dumps(triangular_example_dict(1.25, 1.25)))
        tds = TimeDelaySystem.load(buf)
        self.assertEqual(tds.H, 1.25)

    def test_declared_size_mismatch(self):
        data = triangular_example_dict(-1.25, 0.5)
        data['n'] = 3
        with self.assertRaises(SystemValidationError):
            TimeDelaySystem.from_dict(data)

    def test_missing_terms(self):
        with self.assertRaises(ValueError):
            TimeDelaySystem.from_dict({'n': 1})
        with self.assertRaises(ValueError):
            TimeDelaySystem.from_dict({'terms': [{'A': [[1.]]}]})


class TestConstants(LoggingTestCase):

    def test_norm_constants(self):
        tds = scalar_system((0.0, -2.0), (1.0, -0.5), (2.0, 0.3))
        M, M1 = system.norm_constants(tds)
        self.assertAlmostEqual(M, 2.8)
        self.assertAlmostEqual(M1, 1.1)

    def test_norm_constants_ignore_order(self):
        rng = np.random.default_rng(2)
        terms = list(zip([0.0, 0.4, 1.0, 1.6], rng.standard_normal((4, 3, 3))))
        expected = system.norm_constants(TimeDelaySystem(terms))
        with self.assertLogs('delaylyap.system', level='WARNING'):
            shuffled = TimeDelaySystem([terms[i] for i in (2, 0, 3, 1)])
        assert_allclose(system.norm_constants(shuffled), expected,
                        rtol=1e-14)

    def test_characteristic_matrix(self):
        tds = scalar_system((1.0, -1.0))
        s = 0.3 + 1.2j
        assert_allclose(tds.characteristic_matrix(s), [[s + np.exp(-s)]])


if __name__ == '__main__':
    unittest.main()
