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

"""The functionals v0, v1 and z evaluated on initial functions.

All integrals use composite Gauss-Legendre rules whose panels end at
the points where the integrand may lose smoothness: the breakpoints of
the initial functions and the lattice of multiples of the basic delay
(shifted where an integrand argument is shifted). Inside a panel every
integrand is smooth, so the rules converge quickly in the panel count.

"""

import numpy as np

from . import system
from .fundamental import (
    InitialFunction, lattice_points, gauss_panels, solve_ivp)

import logging
log = logging.getLogger(__name__)


# panels per interval of length H
DEFAULT_QUAD_PANELS = 16


class PsiFunction(InitialFunction):
    """psi(theta) = sum_i K(theta + tau_i) gamma_i on [-H, 0].

    Values are read from the interpolant of the backing fundamental
    matrix *K*, which is never re-integrated.

    """
    def __init__(self, K, taus, gammas):
        sys = K.sys
        H = sys.H
        self.K = K
        self.taus = np.asarray(taus, dtype=float).ravel()
        self.gammas = np.asarray(gammas, dtype=float).reshape(
            self.taus.size, sys.n)
        h_basic = system.commensurate(sys).basic_delay
        breaks = [-self.taus]
        for tau in self.taus:
            breaks.append(lattice_points(-H, 0, -tau, h_basic))
        breaks = np.concatenate(breaks)
        super(PsiFunction, self).__init__(
            lambda th: self._evaluate(th, False), H, sys.n,
            breakpoints=breaks[(breaks >= -H) & (breaks <= 0)],
            left_func=lambda th: self._evaluate(th, True))

    def _evaluate(self, theta, left):
        out = np.zeros((theta.size, self.n))
        for tau, gamma in zip(self.taus, self.gammas):
            out += self.K(theta + tau, left=left) @ gamma
        return out


def build_psi(K, taus, gammas):
    """Build psi(theta) = sum_i K(theta + tau_i) gamma_i.

    :param K: FundamentalMatrix computed at least on [0, H]
    :param taus: strictly increasing points in [0, H]
    :param gammas: one n-vector per point, as a (r, n) array
    :returns: PsiFunction

    """
    taus = np.asarray(taus, dtype=float).ravel()
    H = K.sys.H
    if taus.size == 0:
        raise ValueError("at least one point is needed")
    if np.any(np.diff(taus) <= 0):
        raise ValueError(
            "points must be strictly increasing, got {}".format(taus.tolist()))
    if taus[0] < 0 or taus[-1] > H * (1 + 1e-12):
        raise ValueError(
            "points must lie in [0, H={}], got {}".format(H, taus.tolist()))
    return PsiFunction(K, taus, gammas)


def _rule(a, b, breaks, offsets, h_basic, max_width):
    pts = [np.asarray(breaks, dtype=float).ravel()]
    pts += [lattice_points(a, b, off, h_basic) for off in offsets]
    return gauss_panels(a, b, np.concatenate(pts), max_width=max_width)


def _bilinear(U, phi, psi, quad_panels, with_w):
    sys = U.sys
    H = sys.H
    h_basic = U.basic_delay
    width = H / quad_panels
    terms = [(h, a) for h, a in sys.terms[1:] if np.any(a)]
    phi0 = phi(0.0)[0]
    psi0 = psi(0.0)[0]

    total = float(phi0 @ U(0.0) @ psi0)

    for h, a in terms:
        # phi(0)^T int U(-theta - h) A psi(theta)
        nodes, w = _rule(-h, 0, psi.breakpoints, [0.0], h_basic, width)
        vals = U(-nodes - h) @ a
        total += float(phi0 @ np.einsum('q,qij,qj->i', w, vals, psi(nodes)))
        # int phi(theta)^T A^T U(theta + h) psi(0)
        nodes, w = _rule(-h, 0, phi.breakpoints, [0.0], h_basic, width)
        vals = a.T @ U(nodes + h)
        total += float(np.einsum('q,qi,qij->j', w, phi(nodes), vals) @ psi0)

    for hi, ai in terms:
        outer_breaks = [phi.breakpoints] + [
            lattice_points(-hi, 0, b, h_basic) for b in psi.breakpoints]
        nodes1, w1 = _rule(-hi, 0, np.concatenate(outer_breaks), [0.0],
                           h_basic, width)
        left = phi(nodes1) @ ai
        for hj, aj in terms:
            inner = np.zeros((nodes1.size, sys.n))
            for k, t1 in enumerate(nodes1):
                nodes2, w2 = _rule(-hj, 0, psi.breakpoints, [t1],
                                   h_basic, width)
                vals = U(t1 + hi - nodes2 - hj) @ aj
                inner[k] = np.einsum('q,qij,qj->i', w2, vals, psi(nodes2))
            total += float(np.einsum('q,qi,qi->', w1, left, inner))

    if with_w:
        nodes, w = _rule(-H, 0, np.concatenate(
            (phi.breakpoints, psi.breakpoints)), [], h_basic, width)
        total += float(np.einsum('q,qi,ij,qj->', w, phi(nodes), sys.W,
                                 psi(nodes)))
    return total


def eval_z(U, phi, psi, quad_panels=DEFAULT_QUAD_PANELS):
    """The bilinear functional z(phi, psi), whose diagonal is v1.

    :param U: LyapunovMatrix
    :param phi, psi: InitialFunction instances on [-H, 0]
    :param quad_panels: number of quadrature panels per length H
    :rtype: float

    """
    return _bilinear(U, phi, psi, quad_panels, True)


def eval_v1(U, phi, quad_panels=DEFAULT_QUAD_PANELS):
    """v1(phi) = v0(phi) + int_{-H}^0 phi^T W phi."""
    return _bilinear(U, phi, phi, quad_panels, True)


def eval_v0(U, phi, quad_panels=DEFAULT_QUAD_PANELS):
    """The functional v0(phi) whose derivative along solutions is
    -phi(0)^T W phi(0)."""
    return _bilinear(U, phi, phi, quad_panels, False)


def approx_error_bound(M, L, H, r):
    """Uniform distance between a unit initial function and its
    approximation by a psi function on r equidistant points:
    (M + L) exp(L H) / (1/delta + L), delta = H/(r-1).

    """
    if r < 2:
        raise ValueError("r must be at least 2, got {}".format(r))
    delta = H / (r - 1)
    with np.errstate(over='ignore'):
        return float((M + L) * np.exp(L * H) / (1.0 / delta + L))


def squared_norm_integral(phi, quad_panels=DEFAULT_QUAD_PANELS):
    """int_{-H}^0 ||phi(theta)||^2 dtheta."""
    nodes, w = gauss_panels(-phi.H, 0, phi.breakpoints,
                            max_width=phi.H / quad_panels)
    return float(np.einsum('q,qi,qi->', w, phi(nodes), phi(nodes)))


def sup_norm(phi, samples=2049):
    """max ||phi(theta)|| over a grid of [-H, 0] and the breakpoints."""
    theta = np.unique(np.concatenate(
        (np.linspace(-phi.H, 0, samples), phi.breakpoints)))
    return float(np.linalg.norm(phi(theta), axis=1).max())


def _exponential_function(c, kappa, H):
    return InitialFunction(
        lambda th: np.exp(kappa * th)[:, None] * c[None, :], H, c.size,
        smooth=True,
        derivative=lambda th: kappa * np.exp(kappa * th)[:, None] * c[None, :])


def sample_unit_functions(sys, count, seed=None, step=None, horizon=4.0,
                          max_tries=None):
    """Random initial functions phi with ||phi||_H = ||phi(0)|| = 1 and
    ||phi'|| <= M, taken as normalized segments of trajectories.

    Each candidate starts from phi0(theta) = c exp(kappa theta) with a
    random unit vector c and kappa in [0, M], is integrated up to
    *horizon* * H and cut at a random time tau where the state norm
    attains its maximum over [tau - H, tau] and the derivative obeys
    the bound. Candidates without such a time are discarded.

    :param step: integration step, default H/256
    :param max_tries: candidate limit, default 20 * count
    :returns: list of InitialFunction

    """
    rng = np.random.default_rng(seed)
    H = sys.H
    M, _ = system.norm_constants(sys)
    if step is None:
        step = H / 256
    if max_tries is None:
        max_tries = 20 * count
    T = horizon * H
    samples = []
    tries = 0
    while len(samples) < count and tries < max_tries:
        tries += 1
        c = rng.standard_normal(sys.n)
        c /= np.linalg.norm(c)
        kappa = rng.uniform(0.0, M)
        phi0 = _exponential_function(c, kappa, H)
        x = solve_ivp(sys, phi0, T, step)
        grid = x.times
        norms = np.linalg.norm(x(grid), axis=1)
        slopes = np.zeros((grid.size, sys.n))
        for h, a in sys.terms:
            slopes += x(grid - h) @ a.T
        deriv = np.linalg.norm(slopes, axis=1)
        per_delay = int(round(H / x.step))
        # window norms over [tau - H, tau]; phi0 part has norm exp(kappa s)
        pre = np.exp(kappa * (grid[:per_delay + 1] - H))
        pre_slope = kappa * pre
        all_norms = np.concatenate((pre[:-1], norms))
        all_slopes = np.concatenate((pre_slope[:-1], deriv))
        admissible = []
        for i in range(grid.size):
            window = slice(i, i + per_delay + 1)
            top = norms[i]
            if top <= 0:
                continue
            if (all_norms[window].max() <= top * (1 + 1e-9)
                    and all_slopes[window].max() <= M * top * (1 + 1e-9)):
                admissible.append(i)
        if not admissible:
            continue
        i = admissible[rng.integers(len(admissible))]
        samples.append(x.segment(grid[i], 1.0 / norms[i]))
    if len(samples) < count:
        log.warning("Only %i of %i unit initial functions found in %i "
                    "tries.", len(samples), count, tries)
    else:
        log.debug("sampled %i unit initial functions in %i tries",
                  count, tries)
    return samples


def eigen_initial_function(sys, root, vector=None):
    """phi(theta) = Re(exp(s theta) v) for a characteristic root s and
    a null vector v of the characteristic matrix at s.

    The solution with this initial function is Re(exp(s t) v).

    :param root: complex (or real) characteristic root
    :param vector: null vector; default: the right singular vector of
        the smallest singular value, scaled to unit norm.

    """
    s = complex(root)
    if vector is None:
        _, sv, vh = np.linalg.svd(sys.characteristic_matrix(s))
        vector = vh[-1].conj()
        if sv[-1] > 1e-8 * max(1.0, sv[0]):
            log.warning("s=%s is not a characteristic root (smallest "
                        "singular value %.3g)", s, sv[-1])
    v = np.asarray(vector, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    if abs(s.imag) == 0.0:
        # fix the phase so the real part carries the vector
        v = v * np.exp(-1j * np.angle(v[np.argmax(np.abs(v))]))

    def func(th):
        return np.real(np.exp(s * th)[:, None] * v[None, :])

    def derivative(th):
        return np.real(s * np.exp(s * th)[:, None] * v[None, :])
    return InitialFunction(func, sys.H, sys.n, smooth=True,
                           derivative=derivative)
