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

"""The fundamental matrix K(t) and solutions x(t, phi) of a
time-delay system, computed by the method of steps.

The step always divides every delay, so all breakpoints of K (sums of
delays) are grid points and the right-hand side is smooth inside each
step. Each step is a classical Runge-Kutta step; delayed values at half
steps come from the cubic Hermite interpolant of already computed
steps, which uses the one-sided derivatives stored at every grid point.

"""

from typing import NamedTuple
import math

import numpy as np
import pandas as pd

from . import system

import logging
log = logging.getLogger(__name__)


DEFAULT_STEP_DIVISIONS = 2048
# upper limit for the three sample arrays of one solution
MAX_SAMPLE_BYTES = 2 ** 29
GAUSS_ORDER = 8

RIGOROUS_GRONWALL = 'RIGOROUS_GRONWALL'
EMPIRICAL_GRID = 'EMPIRICAL_GRID'


class IncompatibleStepError(MemoryError):
    pass


class DerivativeBound(NamedTuple(
        'DerivativeBound', [('L', float), ('method', str)])):
    """Bound L on ||K'(t)|| for t in [0, H]."""
    __slots__ = ()

    @property
    def rigorous(self):
        return self.method == RIGOROUS_GRONWALL


def aligned_step(sys, step=None):
    """Return (dt, offsets): the largest step not above *step* that
    divides every delay, and the delays expressed in steps.

    :param step: requested step, default H/2048.
    :raises IncompatibleStepError: for incommensurate delays.

    """
    comm = system.commensurate(sys)
    if not comm.exact:
        raise IncompatibleStepError(
            "no step divides all delays {}".format(sys.delays.tolist()))
    if step is None:
        step = sys.H / DEFAULT_STEP_DIVISIONS
    if not step > 0:
        raise ValueError("step must be positive, got {}".format(step))
    per_basic = max(1, int(math.ceil(comm.basic_delay / step - 1e-9)))
    dt = comm.basic_delay / per_basic
    offsets = tuple(k * per_basic for k in comm.multipliers)
    if dt < step * (1 - 1e-9):
        log.debug("step %g refined to %g to divide all delays", step, dt)
    return dt, offsets


def lattice_points(a, b, offset, spacing):
    """Points offset + k*spacing strictly inside (a, b)."""
    kmin = int(math.ceil((a - offset) / spacing))
    kmax = int(math.floor((b - offset) / spacing))
    pts = offset + spacing * np.arange(kmin, kmax + 1)
    return pts[(pts > a) & (pts < b)]


def gauss_panels(a, b, breaks=(), max_width=None, order=GAUSS_ORDER):
    """Composite Gauss-Legendre rule on [a, b].

    Panels end at every point of *breaks* inside (a, b), and panels
    wider than *max_width* are split evenly.

    :returns: (nodes, weights) as 1D arrays
    :rtype: tuple

    """
    if not b > a:
        return np.empty(0), np.empty(0)
    inner = np.asarray(breaks, dtype=float).ravel()
    edges = np.unique(np.concatenate(([a, b], inner[(inner > a) & (inner < b)])))
    tiny = 1e-13 * max(1.0, abs(a), abs(b))
    keep = np.concatenate(([True], np.diff(edges) > tiny))
    edges = edges[keep]
    edges[-1] = b
    if max_width is not None:
        parts = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            k = max(1, int(math.ceil((hi - lo) / max_width)))
            parts.append(np.linspace(lo, hi, k + 1)[:-1])
        edges = np.concatenate(parts + [[b]])
    x, w = np.polynomial.legendre.leggauss(order)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _integrate(sys, dt, offsets, nsteps, y0, history):
    """Method of steps with classical RK4.

    :param history: function (s, left) -> state for s <= 0, where
        *left* asks for the left limit.
    :returns: (values, right derivatives, left derivatives) on the grid

    """
    shape = y0.shape
    a0 = sys.matrices[0]
    lagged_terms = [(k, a) for k, a in zip(offsets[1:], sys.matrices[1:])
                    if np.any(a)]
    values = np.empty((nsteps + 1,) + shape)
    dplus = np.empty_like(values)
    dminus = np.empty_like(values)
    values[0] = y0

    def lagged(p, left):
        if p > 0 or (p == 0 and not left):
            return values[p]
        return history(p * dt, left)

    def lagged_mid(p):
        if p >= 0:
            return (0.5 * (values[p] + values[p + 1])
                    + dt / 8 * (dplus[p] - dminus[p + 1]))
        return history((p + 0.5) * dt, False)

    def forcing(i, left):
        f = np.zeros(shape)
        for k, a in lagged_terms:
            f += a @ lagged(i - k, left)
        return f

    dplus[0] = a0 @ y0 + forcing(0, False)
    dminus[0] = a0 @ y0 + forcing(0, True)
    for i in range(nsteps):
        y = values[i]
        f_mid = np.zeros(shape)
        for k, a in lagged_terms:
            f_mid += a @ lagged_mid(i - k)
        f_end = forcing(i + 1, True)
        k1 = dplus[i]
        k2 = a0 @ (y + 0.5 * dt * k1) + f_mid
        k3 = a0 @ (y + 0.5 * dt * k2) + f_mid
        k4 = a0 @ (y + dt * k3) + f_end
        y1 = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        values[i + 1] = y1
        dminus[i + 1] = a0 @ y1 + f_end
        dplus[i + 1] = a0 @ y1 + forcing(i + 1, False)
    return values, dplus, dminus


class SampledSolution(object):
    """Grid samples of a method-of-steps solution on [0, t_end] and
    their cubic Hermite interpolant. Subclasses define the history on
    negative times.

    """
    def __init__(self, sys, T, y0, step=None):
        self.sys = sys
        self.step, self.offsets = aligned_step(sys, step)
        nsteps = max(1, int(math.ceil(T / self.step - 1e-9)))
        nbytes = 3 * (nsteps + 1) * y0.size * 8
        if nbytes > MAX_SAMPLE_BYTES:
            raise IncompatibleStepError(
                "{} steps of size {:.4g} up to t={:.4g} need {:.0f} MB, "
                "more than the allowed {:.0f} MB".format(
                    nsteps, self.step, T, nbytes / 2.**20,
                    MAX_SAMPLE_BYTES / 2.**20))
        self.nsteps = nsteps
        self.shape = y0.shape
        self.times = self.step * np.arange(nsteps + 1)
        self.t_end = float(self.times[-1])
        self.values, self.dplus, self.dminus = _integrate(
            sys, self.step, self.offsets, nsteps, y0,
            lambda s, left: self._history(np.array([s]), left)[0])
        for arr in (self.values, self.dplus, self.dminus):
            arr.setflags(write=False)

    def _history(self, s, left):
        raise NotImplementedError

    def _broadcast(self, c):
        return c.reshape((-1,) + (1,) * len(self.shape))

    def _interpolate(self, t):
        x = t / self.step
        idx = np.minimum(np.floor(x).astype(int), self.nsteps - 1)
        s = x - idx
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        b = self._broadcast
        return (b(h00) * self.values[idx]
                + b(h10 * self.step) * self.dplus[idx]
                + b(h01) * self.values[idx + 1]
                + b(h11 * self.step) * self.dminus[idx + 1])

    def __call__(self, t, left=False):
        """Evaluate at time(s) *t*; right-continuous unless *left*."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t).ravel()
        if t.size and t.max() > self.t_end * (1 + 1e-12):
            raise ValueError(
                "t={:.6g} beyond the computed range [0, {:.6g}]".format(
                    t.max(), self.t_end))
        out = np.empty((t.size,) + self.shape)
        pos = t > 0
        if np.any(pos):
            out[pos] = self._interpolate(t[pos])
        if not np.all(pos):
            out[~pos] = self._history(t[~pos], left)
        return out[0] if scalar else out


class FundamentalMatrix(SampledSolution):
    """The fundamental matrix K(t): K(0) = I, K(t) = 0 for t < 0 and
    K'(t) = sum_j A_j K(t - h_j).

    """
    def __init__(self, sys, T_eval=None, step=None):
        """
        :param sys: TimeDelaySystem
        :param T_eval: end of the computed range, default: H.
            Must be at least H.
        :param step: requested step, default H/2048; refined to divide
            every delay.

        """
        if T_eval is None:
            T_eval = sys.H
        if T_eval < sys.H:
            raise ValueError(
                "T_eval={} must not be below H={}".format(T_eval, sys.H))
        super(FundamentalMatrix, self).__init__(
            sys, T_eval, np.eye(sys.n), step)
        log.debug("fundamental matrix on [0, %g] with %i steps of %g",
                  self.t_end, self.nsteps, self.step)

    def _history(self, s, left):
        out = np.zeros((s.size, self.sys.n, self.sys.n))
        if not left:
            out[s == 0] = np.eye(self.sys.n)
        return out

    def rhs(self, t, left=False, side='left'):
        """sum_j A_j K(t - h_j) (side='left') or sum_j K(t - h_j) A_j
        (side='right') at time(s) t, vectorized.

        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros((t.size, self.sys.n, self.sys.n))
        for h, a in self.sys.terms:
            k = self(t - h, left)
            out += (a @ k) if side == 'left' else (k @ a)
        return out

    def integrated_residual(self, side='left'):
        """Largest ||K(t) - I - int_0^t rhs(s) ds|| over the grid, with
        the integral by Simpson's rule on every step.

        :param side: 'left' for sum A_j K(t-h_j), 'right' for
            sum K(t-h_j) A_j.

        """
        t0 = self.times[:-1]
        f0 = self.rhs(t0, False, side)
        fm = self.rhs(t0 + 0.5 * self.step, False, side)
        f1 = self.rhs(self.times[1:], True, side)
        increments = self.step / 6 * (f0 + 4 * fm + f1)
        integral = np.concatenate(
            (np.zeros((1,) + self.shape), np.cumsum(increments, axis=0)))
        res = self.values - np.eye(self.sys.n) - integral
        return float(np.linalg.norm(res, ord=2, axis=(1, 2)).max())

    def to_data_frame(self):
        """Return the grid samples as a pandas.DataFrame with a column
        't' followed by the entries of vec K(t).

        """
        n = self.sys.n
        flat = self.values.transpose(0, 2, 1).reshape(len(self.times), n * n)
        columns = ['K[{},{}]'.format(i, j) for j in range(n) for i in range(n)]
        df = pd.DataFrame(flat, columns=columns)
        df.insert(0, 't', self.times)
        return df

    def export_to_csv(self, path_or_buf=None, **kwargs):
        """Write (t, vec K(t)) rows to a csv file.

        :param path_or_buf: File path (string) or file handle,
            default None; if None the result is returned as a string.
        :param kwargs: Keyword arguments forwarded to
            pandas.DataFrame.to_csv.

        """
        kwargs.setdefault('float_format', '%.12g')
        result = self.to_data_frame().to_csv(path_or_buf, index=False, **kwargs)
        if path_or_buf is not None:
            log.info("Exported fundamental matrix samples to %s",
                     str(path_or_buf))
        return result


class InitialFunction(object):
    """An initial function phi on [-H, 0] with values in R^n.

    :param func: vectorized callable; takes a 1D array of theta values
        and returns an array of shape (len(theta), n).
    :param H: length of the interval
    :param n: dimension of the values
    :param breakpoints: points in [-H, 0] where phi may jump or lose
        smoothness; quadrature panels end there.
    :param smooth: True if phi is C1 on [-H, 0]
    :param derivative: optional vectorized derivative, only for C1
        functions.
    :param left_func: optional evaluator of left limits; by default
        *func* is evaluated just below the argument.

    """
    def __init__(self, func, H, n, breakpoints=(), smooth=False,
                 derivative=None, left_func=None):
        self._func = func
        self.H = float(H)
        self.n = int(n)
        self.breakpoints = np.unique(np.asarray(breakpoints, dtype=float))
        self.smooth = smooth
        self.derivative = derivative
        self._left_func = left_func

    def _check(self, theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if theta.size and (theta.min() < -self.H * (1 + 1e-12)
                           or theta.max() > 0):
            raise ValueError(
                "initial function evaluated outside [-{}, 0]".format(self.H))
        return theta

    def __call__(self, theta):
        theta = self._check(theta)
        return np.asarray(self._func(theta), dtype=float).reshape(
            theta.size, self.n)

    def left(self, theta):
        """Left limits phi(theta-)."""
        theta = self._check(theta)
        if self._left_func is not None:
            return np.asarray(self._left_func(theta), dtype=float).reshape(
                theta.size, self.n)
        below = np.maximum(np.nextafter(theta, -np.inf), -self.H)
        return self(below)

    def _combine(self, other, op):
        if self.n != other.n or abs(self.H - other.H) > 1e-12 * self.H:
            raise ValueError("initial functions live on different spaces")
        return InitialFunction(
            lambda th: op(self(th), other(th)), self.H, self.n,
            np.concatenate((self.breakpoints, other.breakpoints)),
            smooth=self.smooth and other.smooth,
            left_func=lambda th: op(self.left(th), other.left(th)))

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, c):
        c = float(c)
        return InitialFunction(
            lambda th: c * self(th), self.H, self.n, self.breakpoints,
            smooth=self.smooth,
            derivative=(None if self.derivative is None
                        else (lambda th: c * self.derivative(th))),
            left_func=lambda th: c * self.left(th))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    @classmethod
    def constant(cls, vector, H):
        vector = np.asarray(vector, dtype=float).ravel()
        return cls(lambda th: np.tile(vector, (th.size, 1)), H, vector.size,
                   smooth=True,
                   derivative=lambda th: np.zeros((th.size, vector.size)))

    @classmethod
    def zero(cls, n, H):
        return cls.constant(np.zeros(n), H)

    @classmethod
    def point_mass(cls, mu, H):
        """phi(0) = mu and phi(theta) = 0 for theta < 0."""
        mu = np.asarray(mu, dtype=float).ravel()

        def func(th):
            return np.where((th == 0)[:, None], mu[None, :], 0.0)
        return cls(func, H, mu.size, breakpoints=[0.0],
                   left_func=lambda th: np.zeros((th.size, mu.size)))


class Trajectory(SampledSolution):
    """Solution x(t, phi) of the system for t in [-H, T]."""
    def __init__(self, sys, phi, T, step=None):
        self.phi = phi
        super(Trajectory, self).__init__(
            sys, T, phi(np.array([0.0]))[0], step)

    def _history(self, s, left):
        s = np.maximum(s, -self.sys.H)
        out = np.empty((s.size, self.sys.n))
        zero = s == 0
        if np.any(zero):
            out[zero] = (self.phi.left(s[zero]) if left
                         else self.values[0][None, :])
        if not np.all(zero):
            out[~zero] = (self.phi.left(s[~zero]) if left
                          else self.phi(s[~zero]))
        return out

    def segment(self, tau, scale=1.0):
        """The state x_tau(theta) = scale * x(tau + theta) as an
        InitialFunction on [-H, 0].

        """
        H = self.sys.H
        h_basic = system.commensurate(self.sys).basic_delay
        breaks = np.concatenate(
            [lattice_points(-H, 0, -tau, h_basic), [-tau]]
            + [lattice_points(-H, 0, b - tau, h_basic)
               for b in self.phi.breakpoints])
        return InitialFunction(
            lambda th: scale * self(tau + th), H, self.sys.n,
            breakpoints=breaks[(breaks >= -H) & (breaks <= 0)],
            left_func=lambda th: scale * self(tau + th, left=True))


def build_fundamental(sys, T_eval=None, step=None):
    """Compute K(t) on [0, T_eval] (default [0, H])."""
    return FundamentalMatrix(sys, T_eval, step)


def derivative_bound(sys, K=None, method=RIGOROUS_GRONWALL):
    """Bound L for ||K'(t)|| on [0, H].

    :param method: RIGOROUS_GRONWALL gives L = M exp(M H);
        EMPIRICAL_GRID takes the largest ||sum_j A_j K(t - h_j)||
        over the grid and half steps of *K* (not a proven bound).
    :returns: DerivativeBound

    """
    if not sys.H > 0:
        raise ValueError("a positive delay is required, H={}".format(sys.H))
    M, _ = system.norm_constants(sys)
    if method == RIGOROUS_GRONWALL:
        with np.errstate(over='ignore'):
            L = float(M * np.exp(M * sys.H))
    elif method == EMPIRICAL_GRID:
        if K is None:
            K = build_fundamental(sys)
        log.warning("Using the empirical derivative bound, which is not "
                    "a proven bound; stability verdicts are not rigorous.")
        t = K.times[K.times <= sys.H * (1 + 1e-12)]
        samples = np.concatenate((
            K.rhs(t, left=False), K.rhs(t, left=True),
            K.rhs(t[:-1] + 0.5 * K.step)))
        L = float(np.linalg.norm(samples, ord=2, axis=(1, 2)).max())
    else:
        raise ValueError("unknown derivative bound method {}".format(method))
    log.debug("derivative bound L=%.6g (%s)", L, method)
    return DerivativeBound(L, method)


def equidistant_points(H, r):
    """tau_i = (i-1) H/(r-1), i = 1..r; [0] for r = 1."""
    if r < 1:
        raise ValueError("r must be at least 1, got {}".format(r))
    if r == 1:
        return np.zeros(1)
    return np.linspace(0.0, H, r)


def build_pr(K, r):
    """Block row (I, K(delta), ..., K((r-1) delta)), delta = H/(r-1),
    of shape (n, n*r).

    """
    if r < 2:
        raise ValueError("r must be at least 2, got {}".format(r))
    n = K.sys.n
    blocks = K(equidistant_points(K.sys.H, r))
    blocks[0] = np.eye(n)
    return blocks.transpose(1, 0, 2).reshape(n, r * n)


def solve_ivp(sys, phi, T, step=None):
    """Solution x(t, phi) on [0, T] by the method of steps.

    :param phi: InitialFunction on [-H, 0]
    :returns: Trajectory, evaluable on [-H, T]

    """
    return Trajectory(sys, phi, T, step)


def cauchy_residual(K, t, tau):
    """Residual of the identity

        K(t + tau) = K(t) K(tau) + sum_j int_{-h_j}^0 K(t - theta - h_j) A_j K(theta + tau) dtheta

    for t, tau >= 0 with t + tau inside the range of *K*.

    """
    sys = K.sys
    h_basic = system.commensurate(sys).basic_delay
    total = K(t) @ K(tau)
    for h, a in sys.terms[1:]:
        if not np.any(a):
            continue
        breaks = np.concatenate((
            lattice_points(-h, 0, t - h, h_basic),
            lattice_points(-h, 0, -tau, h_basic)))
        nodes, weights = gauss_panels(-h, 0, breaks,
                                      max_width=sys.H / 16)
        vals = K(t - nodes - h) @ a @ K(nodes + tau)
        total = total + np.einsum('q,qij->ij', weights, vals)
    return float(np.linalg.norm(K(t + tau) - total, 2))
