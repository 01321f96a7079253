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

"""Dense real matrix kernels shared by the rest of the package.

All functions take and return :class:`numpy.ndarray` objects and never
modify their arguments.

"""

from typing import NamedTuple
import warnings

import numpy as np
import scipy.linalg

import logging
log = logging.getLogger(__name__)


POSITIVE_DEFINITE = 'POSITIVE_DEFINITE'
POSITIVE_SEMIDEFINITE_SINGULAR = 'POSITIVE_SEMIDEFINITE_SINGULAR'
NOT_POSITIVE_SEMIDEFINITE = 'NOT_POSITIVE_SEMIDEFINITE'

# relative scale of the definiteness band
DEFINITENESS_RTOL = 1e-9
# relative pivot size below which solve_linear gives up
PIVOT_RTOL = 1e-14


class SingularMatrixError(ArithmeticError):
    pass

class MatrixRangeError(ArithmeticError):
    pass


class Definiteness(NamedTuple(
        'Definiteness', [('kind', str),
                         ('min_eigenvalue', float),
                         ('tolerance_used', float)])):
    """Result of a definiteness test of a symmetric matrix.

    *kind* is one of POSITIVE_DEFINITE, POSITIVE_SEMIDEFINITE_SINGULAR
    or NOT_POSITIVE_SEMIDEFINITE; it is decided by comparing
    *min_eigenvalue* against +/- *tolerance_used*.

    """
    __slots__ = ()

    @property
    def is_positive_definite(self):
        return self.kind == POSITIVE_DEFINITE

    @property
    def is_not_semidefinite(self):
        return self.kind == NOT_POSITIVE_SEMIDEFINITE


def _as_matrix(a, name='a'):
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    elif a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise ValueError(
            "{} must be a 2-dimensional matrix, got shape {}".format(
                name, a.shape))
    if not np.all(np.isfinite(a)):
        raise ValueError("{} contains non-finite entries".format(name))
    return a

def _check_square(a, name='a'):
    if a.shape[0] != a.shape[1]:
        raise ValueError(
            "{} must be square, got shape {}".format(name, a.shape))


def kron(a, b):
    """Kronecker product of two finite matrices."""
    return np.kron(_as_matrix(a, 'a'), _as_matrix(b, 'b'))


def vec(a):
    """Column-stacking vectorization; returns a single column."""
    a = _as_matrix(a)
    return a.reshape(-1, 1, order='F')


def unvec(v, rows, cols):
    """Inverse of :func:`vec`.

    :param v: array with exactly rows*cols entries, forming a single
        column (a flat 1D array is accepted as well).
    :param rows, cols: shape of the result.

    """
    v = np.asarray(v, dtype=float)
    if v.ndim == 2 and v.shape[1] != 1:
        raise ValueError(
            "unvec expects a single column, got shape {}".format(v.shape))
    if v.size != rows * cols:
        raise ValueError(
            "cannot unvec {} entries into a {}x{} matrix".format(
                v.size, rows, cols))
    return v.reshape(rows, cols, order='F')


def unvec_stack(v, n):
    """Batch version of :func:`unvec` for square blocks.

    :param v: array of shape (k, n*n), each row a column-stacked
        n x n matrix.
    :returns: array of shape (k, n, n)

    """
    v = np.asarray(v)
    return v.reshape(v.shape[0], n, n).transpose(0, 2, 1)


def expm(a):
    """Matrix exponential (scaling and squaring, Pade approximant).

    :raises MatrixRangeError: if the result overflows.

    """
    a = _as_matrix(a)
    _check_square(a)
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', RuntimeWarning)
        result = scipy.linalg.expm(a)
    if not np.all(np.isfinite(result)):
        raise MatrixRangeError(
            "matrix exponential overflows (norm of argument {:.4g})".format(
                np.linalg.norm(a, 1)))
    return result


def spectral_norm(a):
    """Largest singular value of *a*."""
    a = _as_matrix(a)
    if a.size == 0:
        return 0.0
    return float(scipy.linalg.svdvals(a)[0])


def _extreme_eigenvalues(sym):
    """(lambda_min, lambda_max) of a symmetric matrix from one
    eigenvalue-only solve."""
    w = scipy.linalg.eigvalsh(sym, check_finite=False)
    return float(w[0]), float(w[-1])


def default_tolerance(lmin, lmax):
    """1e-9 * max(1, ||a||) for a symmetric a with extreme eigenvalues
    *lmin* and *lmax*."""
    return DEFINITENESS_RTOL * max(1.0, abs(lmin), abs(lmax))


def classify_definiteness(a, tol=None):
    """Classify a symmetric matrix as positive definite, positive
    semidefinite but numerically singular, or not positive semidefinite.

    The matrix is symmetrized as (a + a^T)/2 before the eigensolve.

    :param a: square matrix
    :param tol: width of the singular band around zero; default
        1e-9 * max(1, ||a||).
    :returns: Definiteness

    """
    a = _as_matrix(a)
    _check_square(a)
    sym = 0.5 * (a + a.T)
    lmin, lmax = _extreme_eigenvalues(sym)
    if tol is None:
        tol = default_tolerance(lmin, lmax)
    if lmin > tol:
        kind = POSITIVE_DEFINITE
    elif lmin < -tol:
        kind = NOT_POSITIVE_SEMIDEFINITE
    else:
        kind = POSITIVE_SEMIDEFINITE_SINGULAR
    log.debug("definiteness of %ix%i matrix: %s (lambda_min=%.6g, tol=%.3g)",
              a.shape[0], a.shape[1], kind, lmin, tol)
    return Definiteness(kind, lmin, float(tol))


def min_singular_ratio(a):
    """Return (smallest singular value, largest singular value) of *a*."""
    s = scipy.linalg.svdvals(_as_matrix(a))
    return float(s[-1]), float(s[0])


def solve_linear(a, b, pivot_rtol=PIVOT_RTOL):
    """Solve a x = b by LU factorization with partial pivoting.

    :param a: square matrix
    :param b: right-hand side, vector or matrix with a.shape[0] rows
    :raises SingularMatrixError: if a pivot is below
        *pivot_rtol* times the largest pivot.

    """
    a = _as_matrix(a)
    _check_square(a)
    b = np.asarray(b, dtype=float)
    if b.shape[0] != a.shape[0]:
        raise ValueError(
            "right-hand side has {} rows, expected {}".format(
                b.shape[0], a.shape[0]))
    with warnings.catch_warnings():
        # singular pivots are reported below, not as LinAlgWarning
        warnings.simplefilter('ignore')
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    scale = pivots.max() if pivots.size else 0.0
    if scale == 0.0 or pivots.min() <= pivot_rtol * scale:
        raise SingularMatrixError(
            "matrix is numerically singular (smallest pivot {:.3g}, "
            "largest {:.3g})".format(pivots.min() if pivots.size else 0.,
                                     scale))
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
