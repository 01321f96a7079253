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

import unittest

import numpy as np
from numpy.testing import assert_allclose

from delaylyap import (
    functional, fundamental, lyapmat, criteria, oracle, linalg, system)
from delaylyap.fundamental import InitialFunction
from tests.helpers import (
    LoggingTestCase, scalar_system, triangular_example, slow,
    STABLE_ROWS, UNSTABLE_ROWS)


def _exp_function(c, kappa, H):
    c = np.asarray(c, dtype=float)
    return InitialFunction(
        lambda th: np.exp(kappa * th)[:, None] * c[None, :], H, c.size,
        smooth=True)


class FunctionalTestCase(LoggingTestCase):

    def setUp(self):
        super(FunctionalTestCase, self).setUp()
        self.tds = triangular_example(-1.25, 0.5)
        self.U = lyapmat.build_lyapunov_matrix(self.tds)
        self.K = fundamental.build_fundamental(self.tds)


class TestSimpleFunctions(FunctionalTestCase):

    def test_zero(self):
        zero = InitialFunction.zero(2, self.tds.H)
        one = InitialFunction.constant([1.0, -1.0], self.tds.H)
        self.assertEqual(functional.eval_v1(self.U, zero), 0.0)
        self.assertEqual(functional.eval_z(self.U, one, zero), 0.0)

    def test_point_mass(self):
        mu = np.array([0.6, -0.8])
        phi = InitialFunction.point_mass(mu, self.tds.H)
        expected = mu @ self.U(0.0) @ mu
        self.assertAlmostEqual(functional.eval_v1(self.U, phi), expected,
                               places=12)
        self.assertAlmostEqual(functional.eval_v0(self.U, phi), expected,
                               places=12)

    def test_w_term(self):
        phi = InitialFunction.constant([1.0, 2.0], self.tds.H)
        diff = functional.eval_v1(self.U, phi) - functional.eval_v0(
            self.U, phi)
        self.assertAlmostEqual(diff, 5.0 * self.tds.H, places=10)

    def test_polarization_and_symmetry(self):
        H = self.tds.H
        phi = InitialFunction.constant([1.0, 2.0], H)
        psi = _exp_function([0.5, -1.0], 1.3, H)
        z = functional.eval_z(self.U, phi, psi)
        v_plus = functional.eval_v1(self.U, phi + psi)
        v_minus = functional.eval_v1(self.U, phi - psi)
        self.assertAlmostEqual(z, 0.25 * (v_plus - v_minus), places=9)
        self.assertAlmostEqual(z, functional.eval_z(self.U, psi, phi),
                               places=9)

    def test_norms(self):
        phi = _exp_function([3.0, 4.0], 2.0, 1.0)
        self.assertAlmostEqual(functional.sup_norm(phi), 5.0)
        # int_{-1}^0 25 exp(4 theta) = 25 (1 - exp(-4))/4
        self.assertAlmostEqual(functional.squared_norm_integral(phi),
                               6.25 * (1 - np.exp(-4.0)), places=10)


class TestFundamentalReduction(FunctionalTestCase):
    """z(K(tau1 + .) mu, K(tau2 + .) eta) = mu^T U(tau2 - tau1) eta."""

    def assertReduction(self, U, K, draws, seed):
        rng = np.random.default_rng(seed)
        n = U.sys.n
        H = U.sys.H
        scale = np.linalg.norm(U(0.0), 2)
        for _ in range(draws):
            tau1, tau2 = rng.uniform(0, H, 2)
            mu, eta = rng.standard_normal((2, n))
            phi = functional.build_psi(K, [tau1], [mu])
            psi = functional.build_psi(K, [tau2], [eta])
            z = functional.eval_z(U, phi, psi)
            expected = mu @ U(tau2 - tau1) @ eta
            self.assertLess(abs(z - expected),
                            1e-5 * scale * np.linalg.norm(mu)
                            * np.linalg.norm(eta),
                            (tau1, tau2))

    def test_single_delay(self):
        self.assertReduction(self.U, self.K, 20, seed=7)

    def test_three_delays(self):
        tds = scalar_system((0.0, -2.0), (1.0, -0.5), (2.0, 0.3))
        U = lyapmat.build_lyapunov_matrix(tds)
        K = fundamental.build_fundamental(tds)
        self.assertReduction(U, K, 5, seed=11)

    def test_quadratic_form(self):
        for r in (1, 2, 3, 5):
            taus = fundamental.equidistant_points(self.tds.H, r)
            gammas = np.random.default_rng(r).standard_normal((r, 2))
            psi = functional.build_psi(self.K, taus, gammas)
            Kr = criteria.assemble_kr(self.U, r)
            gamma = gammas.ravel()
            expected = gamma @ Kr @ gamma
            self.assertAlmostEqual(functional.eval_v1(self.U, psi) / expected,
                                   1.0, places=6)

    def test_psi_validation(self):
        with self.assertRaises(ValueError):
            functional.build_psi(self.K, [], np.zeros((0, 2)))
        with self.assertRaises(ValueError):
            functional.build_psi(self.K, [0.2, 0.1], np.ones((2, 2)))
        with self.assertRaises(ValueError):
            functional.build_psi(self.K, [0.0, 0.7], np.ones((2, 2)))

    def test_psi_values(self):
        psi = functional.build_psi(self.K, [0.0, 0.25], [[1., 0.], [0., 1.]])
        theta = np.array([-0.4, -0.1, 0.0])
        expected = self.K(theta)[:, :, 0] + self.K(theta + 0.25)[:, :, 1]
        assert_allclose(psi(theta), expected)
        assert_allclose(psi.left(0.0), self.K(0.25)[:, 1][None, :])


class TestTimeDomain(LoggingTestCase):

    def test_v1_along_solution(self):
        # v0(phi) = int_0^inf x(t)^T W x(t) dt for a stable system
        tds = scalar_system((0.0, -1.0), (1.0, -0.5))
        U = lyapmat.build_lyapunov_matrix(tds)
        phi = InitialFunction.constant([1.0], 1.0)
        x = fundamental.solve_ivp(tds, phi, 40.0)
        nodes, weights = fundamental.gauss_panels(
            0.0, 40.0, np.arange(1.0, 40.0), max_width=0.25)
        v0 = float(weights @ (x(nodes)[:, 0] ** 2))
        self.assertAlmostEqual(functional.eval_v0(U, phi), v0, places=8)
        self.assertAlmostEqual(functional.eval_v1(U, phi), v0 + 1.0, places=8)

    def test_eigen_solution(self):
        tds = triangular_example(1.25, 0.5)
        p = oracle.refine_root(tds, 0.83).real
        self.assertAlmostEqual(p, 0.8266, places=3)
        U = lyapmat.build_lyapunov_matrix(tds)
        phi = functional.eigen_initial_function(tds, p)
        self.assertAlmostEqual(np.linalg.norm(phi(0.0)), 1.0)
        expected = -np.exp(-2 * p * tds.H) / (2 * p)
        v1 = functional.eval_v1(U, phi)
        self.assertAlmostEqual(v1 / expected, 1.0, places=6)
        self.assertAlmostEqual(criteria.instability_level(tds, p) / expected,
                               1.0, places=10)

    def test_not_a_root(self):
        tds = triangular_example(1.25, 0.5)
        with self.assertLogs('delaylyap.functional', level='WARNING'):
            functional.eigen_initial_function(tds, 0.5)


class TestErrorBound(LoggingTestCase):

    def test_values(self):
        self.assertAlmostEqual(functional.approx_error_bound(1., 1., 1., 2),
                               np.e)
        bounds = [functional.approx_error_bound(2., 3., 0.5, r)
                  for r in (2, 5, 50, 500)]
        self.assertTrue(all(a > b for a, b in zip(bounds, bounds[1:])))

    def test_needs_two_points(self):
        with self.assertRaises(ValueError):
            functional.approx_error_bound(1., 1., 1., 1)


class TestUpperBound(LoggingTestCase):

    @staticmethod
    def random_function(rng, n, H):
        """A trigonometric polynomial with a jump at 0."""
        c = rng.standard_normal((3, n))
        omega = rng.uniform(0.0, 8.0, 3)
        shift = rng.uniform(0.0, 2 * np.pi, 3)
        smooth = InitialFunction(
            lambda th: np.cos(np.outer(th, omega) + shift) @ c, H, n,
            smooth=True)
        return smooth + InitialFunction.point_mass(rng.standard_normal(n), H)

    def test_quadratic_growth(self):
        # |v1(phi)| <= (nu (1 + M1)^2 + H ||W||) ||phi||_H^2, stable or not
        rng = np.random.default_rng(11)
        for a, h in STABLE_ROWS + UNSTABLE_ROWS:
            tds = triangular_example(a, h)
            U = lyapmat.build_lyapunov_matrix(tds)
            _, M1 = system.norm_constants(tds)
            nu = criteria.NU_SAFETY * U.sup_norm(criteria.NU_SAMPLES)
            rho = nu * (1 + M1) ** 2 + tds.H * linalg.spectral_norm(tds.W)
            for _ in range(6):
                phi = self.random_function(rng, tds.n, tds.H)
                v1 = functional.eval_v1(U, phi)
                self.assertLessEqual(
                    abs(v1), rho * functional.sup_norm(phi) ** 2, (a, h))


class TestLowerBounds(LoggingTestCase):

    def check_samples(self, tds, count, seed):
        U = lyapmat.build_lyapunov_matrix(tds)
        alpha0 = criteria.compute_alpha0_star(tds)
        alpha1 = criteria.compute_alpha1(tds)
        samples = functional.sample_unit_functions(tds, count, seed=seed)
        self.assertEqual(len(samples), count)
        for phi in samples:
            self.assertAlmostEqual(np.linalg.norm(phi(0.0)), 1.0)
            self.assertLessEqual(functional.sup_norm(phi), 1.0 + 1e-3)
            v1 = functional.eval_v1(U, phi)
            self.assertGreaterEqual(v1, alpha0 * (1 - 1e-6))
            self.assertGreaterEqual(
                v1, alpha1 * functional.squared_norm_integral(phi)
                * (1 - 1e-6))

    def test_few_samples(self):
        self.check_samples(triangular_example(-1.25, 0.5), 3, seed=1)

    def test_seeded_samples_repeat(self):
        tds = triangular_example(-1.25, 0.5)
        a = functional.sample_unit_functions(tds, 2, seed=5)
        b = functional.sample_unit_functions(tds, 2, seed=5)
        theta = np.linspace(-0.5, 0, 11)
        for f, g in zip(a, b):
            assert_allclose(f(theta), g(theta))

    @slow
    def test_many_samples(self):
        for a, h in [(-1.25, 0.5), (-1.25, 0.75)]:
            self.check_samples(triangular_example(a, h), 50, seed=2)
        self.check_samples(
            scalar_system((0.0, -2.0), (1.0, -0.5), (2.0, 0.3)), 20, seed=3)


if __name__ == '__main__':
    unittest.main()
