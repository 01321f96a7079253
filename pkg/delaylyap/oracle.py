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

"""Rightmost characteristic roots by spectral collocation.

The infinitesimal generator of the solution semigroup acts on functions
on [-H, 0] as differentiation, with the boundary condition
phi'(0) = sum_j A_j phi(-h_j). Collocating it on Chebyshev points gives
a matrix whose rightmost eigenvalues approximate the rightmost roots of
det(s I - sum_j A_j exp(-s h_j)); these are then refined by Newton's
method on the determinant.

"""

from typing import NamedTuple, Tuple
import math

import numpy as np
import scipy.linalg
import scipy.optimize

import logging
log = logging.getLogger(__name__)


DEFAULT_N = 64
MAX_N = 512
DEFAULT_COUNT = 6
CONVERGED_TOL = 1e-8
DIVERGED_TOL = 1e-6
UNDECIDED_BAND = 1e-8


class NoConvergenceError(ArithmeticError):
    pass

class UndecidedError(ArithmeticError):
    pass


class SpectrumEstimate(NamedTuple(
        'SpectrumEstimate', [('roots', Tuple[complex, ...]),
                             ('N', int),
                             ('converged', bool),
                             ('residual', float)])):
    """Approximate rightmost roots, sorted by real part (descending).
    *residual* is |det| of the characteristic matrix at the first root.
    """
    __slots__ = ()

    @property
    def rightmost(self):
        return self.roots[0]


def cheb(N):
    """Chebyshev points x_k = cos(k pi/N), k = 0..N, and the
    differentiation matrix on them."""
    if N == 0:
        return np.ones(1), np.zeros((1, 1))
    k = np.arange(N + 1)
    x = np.sin(math.pi * (N - 2 * k) / (2. * N))
    c = np.ones(N + 1)
    c[0] = c[-1] = 2.
    c = c * (-1.) ** k
    X = np.tile(x, (N + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1. / c) / (dX + np.eye(N + 1))
    D = D - np.diag(D.sum(axis=1))
    return x, D


def _interpolation_row(x, theta_x):
    """Barycentric interpolation weights at the point theta_x for
    Chebyshev points x."""
    N = len(x) - 1
    w = (-1.) ** np.arange(N + 1)
    w[0] *= 0.5
    w[-1] *= 0.5
    diff = theta_x - x
    hit = np.abs(diff) < 1e-14
    row = np.zeros(N + 1)
    if np.any(hit):
        row[np.argmax(hit)] = 1.0
        return row
    t = w / diff
    return t / t.sum()


def generator_matrix(sys, N):
    """Collocation matrix of the generator on N+1 points of [-H, 0];
    the state is stored node by node, theta_0 = 0."""
    n = sys.n
    H = sys.H
    x, D = cheb(N)
    # theta = H (x - 1)/2 maps [-1, 1] to [-H, 0]
    D = D * (2.0 / H)
    G = np.kron(D, np.eye(n))
    top = np.zeros((n, n * (N + 1)))
    for h, a in sys.terms:
        row = _interpolation_row(x, 1.0 - 2.0 * h / H)
        top += np.kron(row[None, :], a)
    G[:n, :] = top
    return G


def _characteristic_det(sys, s):
    return np.linalg.det(sys.characteristic_matrix(s))


def _characteristic_derivative(sys, s):
    out = np.eye(sys.n, dtype=complex)
    for h, a in sys.terms:
        out += h * a * np.exp(-s * h)
    return out


def refine_root(sys, guess, tol=1e-14, maxiter=50):
    """Newton's method on det(s I - sum_j A_j exp(-s h_j)).

    Returns the guess unchanged if Newton fails.

    """
    def func(s):
        return _characteristic_det(sys, s)

    def fprime(s):
        delta = sys.characteristic_matrix(s)
        d = np.linalg.det(delta)
        return d * np.trace(np.linalg.solve(
            delta, _characteristic_derivative(sys, s)))
    try:
        with np.errstate(all='ignore'):
            root = scipy.optimize.newton(func, complex(guess), fprime=fprime,
                                         tol=tol, maxiter=maxiter)
    except (RuntimeError, np.linalg.LinAlgError, ZeroDivisionError) as e:
        log.debug("Newton refinement from %s failed: %s", guess, e)
        return complex(guess)
    if not np.isfinite(root) or abs(root - guess) > 1e-2 * (1 + abs(guess)):
        return complex(guess)
    return complex(root)


def _dedupe(roots, tol=1e-9):
    out = []
    for s in roots:
        if all(abs(s - t) > tol * (1 + abs(s)) for t in out):
            out.append(s)
    return out


def _estimate(sys, N, count):
    if sys.m == 0 or sys.H == 0:
        eig = scipy.linalg.eigvals(sys.matrices[0])
        candidates = list(eig)
    else:
        eig = scipy.linalg.eigvals(generator_matrix(sys, N))
        eig = eig[np.isfinite(eig)]
        order = np.argsort(-eig.real)
        candidates = [refine_root(sys, s) for s in eig[order[:2 * count]]]
    roots = _dedupe(sorted(candidates, key=lambda s: (-s.real, -s.imag)))
    roots = [complex(s.real, 0.0) if abs(s.imag) < 1e-12 else complex(s)
             for s in roots]
    return roots[:count]


def _distance(s, t):
    return abs(s.real - t.real) + abs(abs(s.imag) - abs(t.imag))


def rightmost_roots(sys, N=DEFAULT_N, count=DEFAULT_COUNT, max_N=MAX_N):
    """Estimate the *count* rightmost characteristic roots.

    N is doubled until the rightmost root agrees for two successive
    sizes within 1e-8, or *max_N* is reached.

    :raises NoConvergenceError: if the last two sizes still disagree
        by more than 1e-6.
    :returns: SpectrumEstimate

    """
    previous = _estimate(sys, N, count)
    if sys.m == 0 or sys.H == 0:
        return SpectrumEstimate(tuple(previous), 0, True, float(abs(
            _characteristic_det(sys, previous[0]))))
    while True:
        nxt = 2 * N
        current = _estimate(sys, nxt, count)
        change = _distance(previous[0], current[0])
        log.debug("rightmost root %s at N=%i (change %.3g)",
                  current[0], nxt, change)
        if change <= CONVERGED_TOL or nxt >= max_N:
            break
        previous, N = current, nxt
    if change > DIVERGED_TOL:
        raise NoConvergenceError(
            "rightmost root moved by {:.3g} between N={} and N={}".format(
                change, N, nxt))
    residual = float(abs(_characteristic_det(sys, current[0])))
    return SpectrumEstimate(tuple(current), nxt, change <= CONVERGED_TOL,
                            residual)


def is_stable_oracle(sys, **kwargs):
    """True if the rightmost root has real part below -1e-8.

    :raises UndecidedError: if the real part is within 1e-8 of zero, or
        if the rightmost root had not settled when N reached its limit.
    """
    est = rightmost_roots(sys, **kwargs)
    if not est.converged:
        raise UndecidedError(
            "rightmost root {} not settled at N={}".format(
                est.rightmost, est.N))
    re = est.rightmost.real
    if abs(re) <= UNDECIDED_BAND:
        raise UndecidedError(
            "rightmost root {} is on the imaginary axis within {}".format(
                est.rightmost, UNDECIDED_BAND))
    return re < -UNDECIDED_BAND
