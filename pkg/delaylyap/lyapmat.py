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

"""Construction of the delay Lyapunov matrix U(tau).

For commensurate delays h_j = k_j h, the pieces Z_i(s) = U(i h + s) and
V_i(s) = U(-(i+1) h + s), s in [0, h], i = 0..k_max-1, obey a linear
ODE with constant coefficients. Its solution X(s) = exp(G s) X(0) is
fixed by continuity at the joints and the algebraic property, which
give a square linear system for X(0). The Lyapunov condition holds if
and only if that system is regular.

U is then evaluated from a table of X and its derivatives G^p X on a
fine grid of [0, h], with a Taylor expansion around the nearest grid
point; this is exact to rounding error.

"""

from typing import NamedTuple
import math

import numpy as np
import pandas as pd

from . import linalg, system, fundamental

import logging
log = logging.getLogger(__name__)


PROPERTY_TOL = 1e-8
CONDITION_RTOL = 1e-10
TAYLOR_ORDER = 16
MIN_TABLE_POINTS = 64
MAX_STACK_SIZE = 4096


class LyapunovConditionError(ArithmeticError):
    def __init__(self, status, message):
        super(LyapunovConditionError, self).__init__(message)
        self.status = status

class IncommensurateDelaysError(ValueError):
    pass


class LyapunovConditionStatus(NamedTuple(
        'LyapunovConditionStatus', [('holds', bool),
                                    ('diagnostic', float),
                                    ('scale', float)])):
    """*diagnostic* is the smallest singular value of the boundary
    system, *scale* its largest one."""
    __slots__ = ()


class PropertyResiduals(NamedTuple(
        'PropertyResiduals', [('continuity', float),
                              ('dynamic', float),
                              ('symmetry', float),
                              ('algebraic', float)])):
    __slots__ = ()

    def max(self):
        return max(self)

    def within(self, tol):
        return self.max() <= tol


class LyapunovMatrix(object):
    """Evaluator of U(tau) on [-H, H].

    :param sys: TimeDelaySystem
    :param basic_delay: h, with H = k_max * h
    :param generator: the matrix G of the stacked ODE
    :param initial_stack: X(0), the stacked vec(Z_i(0)), vec(V_i(0))
    :param condition: LyapunovConditionStatus of the construction

    """
    def __init__(self, sys, basic_delay, generator, initial_stack,
                 condition=None):
        self.sys = sys
        self.basic_delay = float(basic_delay)
        self.segments = int(round(sys.H / self.basic_delay))
        self.generator = generator
        self.initial_stack = np.asarray(initial_stack, dtype=float).ravel()
        self.condition = condition
        if self.initial_stack.size != 2 * self.segments * sys.n ** 2:
            raise ValueError("initial stack does not match the segments")
        self._build_table()

    def _build_table(self):
        h = self.basic_delay
        G = self.generator
        # upper bound of the spectral norm
        gnorm = math.sqrt(np.abs(G).sum(axis=0).max()
                          * np.abs(G).sum(axis=1).max())
        count = max(MIN_TABLE_POINTS, int(math.ceil(2 * gnorm * h)))
        self._delta = h / count
        self._count = count
        step = linalg.expm(G * self._delta)
        stack = np.empty((count + 1, self.initial_stack.size))
        stack[0] = self.initial_stack
        for k in range(count):
            stack[k + 1] = step @ stack[k]
        derivs = [stack]
        for p in range(TAYLOR_ORDER + 1):
            derivs.append(derivs[-1] @ G.T)
        self._derivs = np.stack(derivs)
        log.debug("U table: %i points per segment, stack size %i",
                  count, self.initial_stack.size)

    def _blocks(self, s, blocks, order=0):
        """Blocks *blocks* of G^order X(s), as rows of vec entries."""
        nn = self.sys.n ** 2
        k = np.clip(np.rint(s / self._delta).astype(int), 0, self._count)
        r = s - k * self._delta
        cols = blocks[:, None] * nn + np.arange(nn)[None, :]
        acc = np.zeros((s.size, nn))
        coef = np.ones(s.size)
        for p in range(TAYLOR_ORDER + 1):
            acc += coef[:, None] * self._derivs[p + order][k[:, None], cols]
            coef = coef * r / (p + 1)
        return linalg.unvec_stack(acc, self.sys.n)

    def segment_values(self, index, s, mirrored=False):
        """Z_index(s) = U(index*h + s), or V_index(s) = U(s - (index+1) h)
        if *mirrored*, for s in [0, h]."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        block = index + (self.segments if mirrored else 0)
        return self._blocks(s, np.full(s.size, block, dtype=int))

    def _locate(self, a):
        h = self.basic_delay
        if a.size and a.max() > self.sys.H * (1 + 1e-12):
            raise ValueError(
                "|tau|={:.6g} outside [0, H={:.6g}]".format(
                    a.max(), self.sys.H))
        seg = np.minimum(np.floor(a / h).astype(int), self.segments - 1)
        s = np.clip(a - seg * h, 0.0, h)
        return seg, s

    def __call__(self, tau):
        """U(tau) for tau in [-H, H]; U(-tau) is the transpose of U(tau)."""
        tau = np.asarray(tau, dtype=float)
        scalar = tau.ndim == 0
        tau = np.atleast_1d(tau).ravel()
        seg, s = self._locate(np.abs(tau))
        out = self._blocks(s, seg)
        neg = tau < 0
        out[neg] = out[neg].transpose(0, 2, 1)
        return out[0] if scalar else out

    def derivative(self, tau):
        """Right derivative U'(tau) for tau in [0, H]."""
        tau = np.asarray(tau, dtype=float)
        scalar = tau.ndim == 0
        tau = np.atleast_1d(tau).ravel()
        if tau.size and tau.min() < 0:
            raise ValueError("derivative is evaluated for tau >= 0 only")
        seg, s = self._locate(tau)
        out = self._blocks(s, seg, order=1)
        return out[0] if scalar else out

    def sup_norm(self, samples):
        """max ||U(tau)|| over *samples* equidistant tau in [0, H]."""
        taus = np.linspace(0.0, self.sys.H, samples)
        return float(np.linalg.norm(self(taus), ord=2, axis=(1, 2)).max())

    def to_data_frame(self, taus, residuals=True):
        """Return a pandas.DataFrame with columns 'tau', the entries
        of vec U(tau) and, if *residuals*, the pointwise dynamic and
        symmetry residuals.

        """
        taus = np.atleast_1d(np.asarray(taus, dtype=float))
        n = self.sys.n
        vals = self(taus)
        flat = vals.transpose(0, 2, 1).reshape(taus.size, n * n)
        columns = ['U[{},{}]'.format(i, j) for j in range(n) for i in range(n)]
        df = pd.DataFrame(flat, columns=columns)
        df.insert(0, 'tau', taus)
        if residuals:
            df['dynamic_residual'] = _dynamic_residuals(self, taus)
            df['symmetry_residual'] = _symmetry_residuals(self, taus)
        return df

    def export_to_csv(self, taus, path_or_buf=None, **kwargs):
        """Write U samples and residuals to a csv file. Global residuals
        go to a trailing '#' comment line.

        :param path_or_buf: File path (string) or file handle,
            default None; if None the result is returned as a string.

        """
        df = self.to_data_frame(taus)
        res = check_properties(self)
        footer = ('# continuity={:.3e} dynamic={:.3e} symmetry={:.3e} '
                  'algebraic={:.3e}\n'.format(*res))
        text = df.to_csv(None, index=False, float_format='%.12g', **kwargs)
        text += footer
        if path_or_buf is None:
            return text
        if hasattr(path_or_buf, 'write'):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, 'w') as f:
                f.write(text)
        log.info("Exported Lyapunov matrix samples to %s", str(path_or_buf))


def _stack_layout(n, segments):
    nn = n * n

    def z(i):
        return slice(i * nn, (i + 1) * nn)

    def v(i):
        return slice((segments + i) * nn, (segments + i + 1) * nn)
    return z, v


def _boundary_system(sys, comm):
    """Assemble the generator G and the boundary system B X(0) = c."""
    n = sys.n
    nn = n * n
    K = comm.segments
    size = 2 * K * nn
    if size > MAX_STACK_SIZE:
        raise IncommensurateDelaysError(
            "basic delay {:.4g} needs {} segments; the stacked system of "
            "size {} is too large".format(comm.basic_delay, K, size))
    eye_n = np.eye(n)
    eye_nn = np.eye(nn)
    z, v = _stack_layout(n, K)
    terms = [(k, a) for k, a in zip(comm.multipliers, sys.matrices)
             if np.any(a)]

    G = np.zeros((size, size))
    for i in range(K):
        for k, a in terms:
            right = linalg.kron(a.T, eye_n)
            left = linalg.kron(eye_n, a.T)
            if k <= i:
                G[z(i), z(i - k)] += right
                G[v(i), v(i - k)] -= left
            else:
                G[z(i), v(k - i - 1)] += right
                G[v(i), z(k - i - 1)] -= left

    B0 = np.zeros((size, size))
    Bh = np.zeros((size, size))
    rhs = np.zeros(size)

    def row(r):
        return slice(r * nn, (r + 1) * nn)
    r = 0
    for i in range(K - 1):
        B0[row(r), z(i + 1)] = eye_nn
        Bh[row(r), z(i)] = -eye_nn
        r += 1
    for i in range(K - 1):
        B0[row(r), v(i)] = eye_nn
        Bh[row(r), v(i + 1)] = -eye_nn
        r += 1
    B0[row(r), z(0)] = eye_nn
    Bh[row(r), v(0)] = -eye_nn
    r += 1
    alg = row(r)
    for k, a in terms:
        if k == 0:
            B0[alg, z(0)] += linalg.kron(a.T, eye_n) + linalg.kron(eye_n, a.T)
        else:
            B0[alg, v(k - 1)] += linalg.kron(a.T, eye_n)
            Bh[alg, z(k - 1)] += linalg.kron(eye_n, a.T)
    rhs[alg] = -linalg.vec(sys.W).ravel()

    B = B0 + Bh @ linalg.expm(G * comm.basic_delay)
    return G, B, rhs


def _solve_boundary(B, rhs):
    smin, smax = linalg.min_singular_ratio(B)
    status = LyapunovConditionStatus(
        bool(smin >= CONDITION_RTOL * smax), smin, smax)
    log.debug("boundary system: smallest singular value %.3e, largest %.3e",
              smin, smax)
    if not status.holds:
        raise LyapunovConditionError(
            status, "Lyapunov condition fails: boundary system is singular "
            "(smallest singular value {:.3e}, largest {:.3e})".format(
                smin, smax))
    try:
        return linalg.solve_linear(B, rhs), status
    except linalg.SingularMatrixError as e:
        raise LyapunovConditionError(
            status._replace(holds=False),
            "Lyapunov condition fails: {}".format(e))


def check_lyapunov_condition(sys, comm=None):
    """Test whether the delay Lyapunov matrix of *sys* exists and is
    unique, i.e. whether the boundary system is regular.

    :returns: LyapunovConditionStatus

    """
    if comm is None:
        comm = system.commensurate(sys)
    if not comm.exact:
        raise IncommensurateDelaysError(
            "delays {} are not commensurate".format(sys.delays.tolist()))
    _, B, _ = _boundary_system(sys, comm)
    smin, smax = linalg.min_singular_ratio(B)
    return LyapunovConditionStatus(
        bool(smin >= CONDITION_RTOL * smax), smin, smax)


def build_single_delay(sys):
    """U for a system with exactly one delay, from the closed formula

        U(tau) = unvec([I 0] exp(L tau) M^-1 (0, -vec W)),  tau in [0, H].

    :raises LyapunovConditionError: if M is numerically singular.

    """
    if sys.m != 1:
        raise ValueError(
            "single-delay formula needs exactly one delay, got {}".format(
                sys.m))
    n = sys.n
    nn = n * n
    eye_n = np.eye(n)
    eye_nn = np.eye(nn)
    zero = np.zeros((nn, nn))
    a0, a1 = sys.matrices
    H = sys.H
    L = np.block([
        [linalg.kron(a0.T, eye_n), linalg.kron(a1.T, eye_n)],
        [-linalg.kron(eye_n, a1.T), -linalg.kron(eye_n, a0.T)]])
    M = (np.block([
            [eye_nn, zero],
            [linalg.kron(a0.T, eye_n) + linalg.kron(eye_n, a0.T),
             linalg.kron(a1.T, eye_n)]])
         + np.block([
            [zero, -eye_nn],
            [linalg.kron(eye_n, a1.T), zero]]) @ linalg.expm(L * H))
    rhs = np.concatenate((np.zeros(nn), -linalg.vec(sys.W).ravel()))
    x0, status = _solve_boundary(M, rhs)
    log.info("Built delay Lyapunov matrix from the single-delay formula "
             "(n=%i, H=%g)", n, H)
    return LyapunovMatrix(sys, H, L, x0, status)


def build_commensurate(sys, comm=None):
    """U for commensurate delays by the boundary value construction.

    :raises IncommensurateDelaysError: if *comm* is not exact.
    :raises LyapunovConditionError: on a singular boundary system.

    """
    if comm is None:
        comm = system.commensurate(sys)
    if not comm.exact:
        raise IncommensurateDelaysError(
            "delays {} are not commensurate; approximating incommensurate "
            "delays is not supported".format(sys.delays.tolist()))
    G, B, rhs = _boundary_system(sys, comm)
    x0, status = _solve_boundary(B, rhs)
    log.info("Built delay Lyapunov matrix on %i segment(s) of length %g",
             comm.segments, comm.basic_delay)
    return LyapunovMatrix(sys, comm.basic_delay, G, x0, status)


def build_lyapunov_matrix(sys):
    """Use the single-delay formula when it applies, the boundary value
    construction otherwise."""
    if sys.m == 1:
        return build_single_delay(sys)
    return build_commensurate(sys)


def _dynamic_residuals(U, taus):
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    rhs = np.zeros((taus.size, U.sys.n, U.sys.n))
    for h, a in U.sys.terms:
        rhs += U(taus - h) @ a
    return np.linalg.norm(U.derivative(taus) - rhs, ord=2, axis=(1, 2))


def _symmetry_residuals(U, taus):
    """||V_i(s) - Z_i(h - s)^T|| for the pieces covering each tau."""
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    seg, s = U._locate(taus)
    h = U.basic_delay
    mirrored = U._blocks(h - s, seg + U.segments)
    direct = U._blocks(s, seg)
    return np.linalg.norm(mirrored - direct.transpose(0, 2, 1),
                          ord=2, axis=(1, 2))


def check_properties(U, grid_points=512):
    """Largest residuals of the continuity, dynamic, symmetry and
    algebraic properties on an equidistant grid of [0, H].

    :returns: PropertyResiduals

    """
    sys = U.sys
    h = U.basic_delay
    K = U.segments
    taus = np.linspace(0.0, sys.H, grid_points)

    joints = [np.linalg.norm(U.segment_values(0, 0.0)[0]
                             - U.segment_values(0, h, mirrored=True)[0], 2),
              np.linalg.norm(U(0.0) - U(0.0).T, 2)]
    for i in range(K - 1):
        joints.append(np.linalg.norm(
            U.segment_values(i, h)[0] - U.segment_values(i + 1, 0.0)[0], 2))
        joints.append(np.linalg.norm(
            U.segment_values(i, 0.0, mirrored=True)[0]
            - U.segment_values(i + 1, h, mirrored=True)[0], 2))

    algebraic = np.array(sys.W)
    for hj, a in sys.terms:
        algebraic = algebraic + U(-hj) @ a + a.T @ U(hj)

    res = PropertyResiduals(
        continuity=float(max(joints)),
        dynamic=float(_dynamic_residuals(U, taus).max()),
        symmetry=float(_symmetry_residuals(U, taus).max()),
        algebraic=float(np.linalg.norm(algebraic, 2)))
    log.debug("property residuals: %s", res)
    return res


def property_tolerance(sys):
    return PROPERTY_TOL * linalg.spectral_norm(sys.W)


def integral_lyapunov_matrix(sys, taus, T, step=None):
    """Truncated integral int_0^T K(t)^T W K(t + tau) dt for each tau in
    *taus* (all in [0, H]). Equals U(tau) in the limit T -> infinity
    when the system is exponentially stable.

    """
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    K = fundamental.FundamentalMatrix(sys, T + max(taus.max(), 0.0), step)
    h_basic = system.commensurate(sys).basic_delay
    out = np.empty((taus.size, sys.n, sys.n))
    for i, tau in enumerate(taus):
        breaks = np.concatenate((
            fundamental.lattice_points(0, T, 0, h_basic),
            fundamental.lattice_points(0, T, -tau, h_basic)))
        nodes, weights = fundamental.gauss_panels(
            0, T, breaks, max_width=h_basic / 4)
        vals = K(nodes).transpose(0, 2, 1) @ sys.W @ K(nodes + tau)
        out[i] = np.einsum('q,qij->ij', weights, vals)
    return out


def shift_residual(U, K, tau1, tau2):
    """Residual of U(tau1 + tau2) = U(tau2) K(tau1)
    + sum_j int_{-h_j}^0 U(tau2 - theta - h_j) A_j K(tau1 + theta) dtheta
    for tau1, tau2 >= 0, tau1 + tau2 <= H.

    """
    sys = U.sys
    h_basic = U.basic_delay
    total = U(tau2) @ K(tau1)
    for h, a in sys.terms[1:]:
        if not np.any(a):
            continue
        breaks = np.concatenate((
            fundamental.lattice_points(-h, 0, tau2 - h, h_basic),
            fundamental.lattice_points(-h, 0, -tau1, h_basic)))
        nodes, weights = fundamental.gauss_panels(
            -h, 0, breaks, max_width=sys.H / 16)
        vals = U(tau2 - nodes - h) @ a @ K(tau1 + nodes)
        total = total + np.einsum('q,qij->ij', weights, vals)
    return float(np.linalg.norm(U(tau1 + tau2) - total, 2))
