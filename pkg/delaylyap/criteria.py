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

"""Stability tests built on the delay Lyapunov matrix.

The necessary tests check positivity of block matrices [U(tau_j - tau_i)].
The finite criteria choose the number r of equidistant points from the
system constants so that positivity of the r-point matrix (plain
criterion), or of that matrix minus alpha0 P_r^T P_r (corrected
criterion), is also sufficient for exponential stability.

"""

import math
import os
import sys as _sys
import time

import numpy as np
import scipy.linalg
import scipy.optimize

from . import linalg, system, fundamental, lyapmat
from .reports import CriterionConstants, StabilityReport

import logging
log = logging.getLogger(__name__)


FINITE = 'FINITE'
FINITE_CORRECTED = 'FINITE_CORRECTED'
NECESSARY = 'NECESSARY'

STABLE = 'STABLE'
UNSTABLE = 'UNSTABLE'
LYAPUNOV_CONDITION_FAILS = 'LYAPUNOV_CONDITION_FAILS'
UNDECIDED_NUMERIC = 'UNDECIDED_NUMERIC'
ERROR = 'ERROR'

NU_SAMPLES = 4096
NU_SAFETY = 1.01
DEFAULT_ALPHA0_FRAC = 0.5
DEFAULT_MEMORY_CAP = 20000
MEMORY_CAP_ENV = 'DELAYLYAP_MEM_CAP'
ROUGH_GRID = 512


class MemoryBudgetError(MemoryError):
    pass

class CriterionNumericError(ArithmeticError):
    pass


def memory_cap():
    """Largest allowed n*r, from $DELAYLYAP_MEM_CAP or the default."""
    value = os.environ.get(MEMORY_CAP_ENV)
    if value is None or value == '':
        return DEFAULT_MEMORY_CAP
    try:
        cap = int(value)
    except ValueError:
        raise ValueError(
            "{}={!r} is not an integer".format(MEMORY_CAP_ENV, value))
    if cap < 1:
        raise ValueError("{} must be positive, got {}".format(
            MEMORY_CAP_ENV, cap))
    return cap


def _check_memory(n, r):
    cap = memory_cap()
    if n * r > cap:
        raise MemoryBudgetError(
            "n*r = {}*{} = {} exceeds the cap of {} (set {} to "
            "raise it)".format(n, r, n * r, cap, MEMORY_CAP_ENV))


def _block_matrix(blocks, index, n):
    """Assemble a (r*n, r*n) matrix whose block (i, j) is
    blocks[index[i, j]], then symmetrize it."""
    r = index.shape[0]
    full = blocks[index].transpose(0, 2, 1, 3).reshape(r * n, r * n)
    return 0.5 * (full + full.T)


def assemble_kr(U, r):
    """Block Toeplitz matrix with block (i, j) = U((j - i) H/(r - 1)),
    i, j = 0..r-1; for r = 1 just U(0).

    """
    if r < 1:
        raise ValueError("r must be at least 1, got {}".format(r))
    n = U.sys.n
    if r == 1:
        u0 = U(0.0)
        return 0.5 * (u0 + u0.T)
    _check_memory(n, r)
    taus = fundamental.equidistant_points(U.sys.H, r)
    ahead = U(taus)
    # blocks for negative offsets k < 0 are U(|k| delta)^T
    blocks = np.concatenate(
        (ahead[:0:-1].transpose(0, 2, 1), ahead))
    i = np.arange(r)
    index = (r - 1) + i[None, :] - i[:, None]
    return _block_matrix(blocks, index, n)


def necessary_test(U, taus):
    """Definiteness of [U(tau_j - tau_i)] for strictly increasing
    points *taus* in [0, H].

    A stable system gives a positive definite matrix for every choice
    of points.

    :returns: linalg.Definiteness

    """
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if np.any(np.diff(taus) <= 0):
        raise ValueError("points must be strictly increasing")
    if taus[0] < 0 or taus[-1] > U.sys.H * (1 + 1e-12):
        raise ValueError("points must lie in [0, H]")
    r = taus.size
    n = U.sys.n
    _check_memory(n, r)
    diffs = taus[None, :] - taus[:, None]
    blocks = U(diffs.ravel())
    index = np.arange(r * r).reshape(r, r)
    return linalg.classify_definiteness(_block_matrix(blocks, index, n))


def rough_test(U, grid=ROUGH_GRID):
    """True if ||U(tau)|| < ||U(0)|| on a grid of (0, H]."""
    taus = np.linspace(0.0, U.sys.H, grid + 1)[1:]
    norms = np.linalg.norm(U(taus), ord=2, axis=(1, 2))
    return bool(norms.max() < np.linalg.norm(U(0.0), 2))


def three_point_scan(U, points=64):
    """Definiteness of the 3-point matrices on {0, tau, H} for tau on a
    grid of (0, H).

    :returns: (worst Definiteness, its tau)
    :rtype: tuple

    """
    H = U.sys.H
    worst = None
    worst_tau = None
    for tau in np.linspace(0.0, H, points + 2)[1:-1]:
        d = necessary_test(U, [0.0, tau, H])
        if worst is None or d.min_eigenvalue < worst.min_eigenvalue:
            worst, worst_tau = d, float(tau)
    return worst, worst_tau


def _weight_factor(sys):
    return scipy.linalg.cholesky(sys.W)


def compute_alpha0_star(sys):
    """Lower bound alpha0* of v1 on unit initial functions of a stable
    system: -1/((m+1) lambda_min(P)) with P = (I (x) W^-1) S, where S is
    the symmetric part of the block matrix whose first block row is
    (A_0, ..., A_m).

    :raises CriterionNumericError: if lambda_min(P) is not negative.

    """
    n = sys.n
    k = sys.m + 1
    first = np.hstack(sys.matrices)
    E = np.zeros((n * k, n * k))
    E[:n, :] = first
    S = E + E.T
    # P is similar to the symmetric (I (x) C^-T) S (I (x) C^-1), W = C^T C
    c_inv = scipy.linalg.solve_triangular(_weight_factor(sys), np.eye(n))
    T = np.kron(np.eye(k), c_inv)
    lmin = float(scipy.linalg.eigvalsh(T.T @ S @ T)[0])
    if lmin >= -1e-14:
        raise CriterionNumericError(
            "lambda_min(P)={:.3g} is not negative".format(lmin))
    return -1.0 / (k * lmin)


def compute_alpha1(sys):
    """lambda_min(W)/(m+1), the weight of the integral term in the
    quadratic lower bound of v1."""
    return float(scipy.linalg.eigvalsh(sys.W)[0]) / (sys.m + 1)


def solve_b(aH):
    """The root b in (0, pi/2) of ((aH)^2 + b^2) sin^4(b) = (aH)^2."""
    c2 = float(aH) ** 2
    if not c2 > 0:
        raise ValueError("a*H must be positive, got {}".format(aH))

    def g(b):
        return (c2 + b * b) * math.sin(b) ** 4 - c2
    return scipy.optimize.bisect(
        g, 0.0, 0.5 * math.pi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
        maxiter=200)


def compute_beta_star(sys, a):
    """Return (b, beta*) with beta* = lambda_min(W)/(4a) exp(-2aH) cos^2(b).

    :param a: upper bound of the real parts of the characteristic roots
    """
    if not a > 0:
        raise ValueError("a must be positive, got {}".format(a))
    H = sys.H
    b = solve_b(a * H)
    lmin = float(scipy.linalg.eigvalsh(sys.W)[0])
    beta = lmin / (4 * a) * math.exp(-2 * a * H) * math.cos(b) ** 2
    return b, beta


def oscillation_factor(p, q, H):
    """cos^2(qH) + (p cos(qH) - q sin(qH))^2/(p^2 + q^2); at least
    cos^2(b) whenever 0 < p <= a."""
    c = math.cos(q * H)
    s = math.sin(q * H)
    return c * c + (p * c - q * s) ** 2 / (p * p + q * q)


def instability_level(sys, root):
    """Upper bound of v1 on the eigen-solution initial function of the
    characteristic root *root* with positive real part p:
    -lambda_min(W) exp(-2pH) f(q)/(4p).

    """
    s = complex(root)
    p, q = s.real, abs(s.imag)
    if not p > 0:
        raise ValueError("root must have positive real part, got {}".format(s))
    lmin = float(scipy.linalg.eigvalsh(sys.W)[0])
    return -lmin * math.exp(-2 * p * sys.H) * oscillation_factor(
        p, q, sys.H) / (4 * p)


def finite_r(H, L, M, alpha):
    """r = max(2, 1 + ceil(H e^{LH} (M+L)(alpha + sqrt(alpha(alpha+1))) - HL)).

    Values beyond the machine integer range are clipped to sys.maxsize.

    """
    with np.errstate(over='ignore', invalid='ignore'):
        x = (H * np.exp(L * H) * (M + L)
             * (alpha + math.sqrt(alpha * (alpha + 1))) - H * L)
    if not np.isfinite(x) or x >= _sys.maxsize - 1:
        log.warning("r overflows (H=%g, L=%g, alpha=%g); clipped", H, L, alpha)
        return _sys.maxsize
    return max(2, 1 + int(math.ceil(x)))


def compute_r(sys, U, K=None, which=FINITE, a_override=None,
              alpha0_frac=DEFAULT_ALPHA0_FRAC,
              derivative_method=fundamental.RIGOROUS_GRONWALL):
    """All constants of the finite criteria and both resulting r.

    :param U: LyapunovMatrix of *sys*
    :param K: FundamentalMatrix, only needed for the empirical
        derivative bound
    :param which: FINITE or FINITE_CORRECTED; only selects what is
        logged, both r are computed
    :param a_override: growth bound a, default: M
    :param alpha0_frac: alpha0 = alpha0_frac * alpha0*, in (0, 1)
    :returns: CriterionConstants

    """
    if which not in (FINITE, FINITE_CORRECTED):
        raise ValueError("unknown finite criterion {}".format(which))
    if not 0 < alpha0_frac < 1:
        raise ValueError(
            "alpha0_frac must lie in (0, 1), got {}".format(alpha0_frac))
    H = sys.H
    M, M1 = system.norm_constants(sys)
    nu = NU_SAFETY * U.sup_norm(NU_SAMPLES)
    bound = fundamental.derivative_bound(sys, K, derivative_method)
    L = bound.L
    rho = nu * (1 + M1) ** 2 + H * linalg.spectral_norm(sys.W)
    a = M if a_override is None else float(a_override)
    b, beta = compute_beta_star(sys, a)
    alpha0_star = compute_alpha0_star(sys)
    alpha0 = alpha0_frac * alpha0_star
    consts = CriterionConstants(
        M=M, M1=M1, nu=nu, L=L, rho=rho, a=a, b=b, beta_star=beta,
        alpha0_star=alpha0_star, alpha0_used=alpha0,
        r_finite=finite_r(H, L, M, rho / beta if beta > 0 else math.inf),
        r_corrected=finite_r(H, L, M, rho / (beta + alpha0)),
        derivative_method=bound.method)
    log.info("r=%i for the %s criterion (M=%.4g, L=%.4g, rho=%.4g, "
             "beta*=%.4g, alpha0=%.4g)",
             consts.r_finite if which == FINITE else consts.r_corrected,
             which, M, L, rho, beta, alpha0)
    return consts


def verdict_from(definiteness):
    if definiteness.is_positive_definite:
        return STABLE
    if definiteness.is_not_semidefinite:
        return UNSTABLE
    return UNDECIDED_NUMERIC


def _condition_failure(criterion, error, start):
    log.info("Lyapunov condition fails: %s", error)
    return StabilityReport(
        verdict=LYAPUNOV_CONDITION_FAILS, criterion=criterion, r_used=None,
        min_eigenvalue=None, tolerance=None, constants=None, residuals=None,
        condition_diagnostic=error.status.diagnostic,
        wall_time=time.perf_counter() - start)


def finite_criterion(sys, which=FINITE, a_override=None,
                     alpha0_frac=DEFAULT_ALPHA0_FRAC, step=None,
                     derivative_method=fundamental.RIGOROUS_GRONWALL):
    """Decide exponential stability with a finite number of points.

    The Lyapunov condition is checked while building U; then r is
    computed and the r-point matrix (FINITE) or the r-point matrix
    minus alpha0 P_r^T P_r (FINITE_CORRECTED) is tested.

    :raises MemoryBudgetError: if n*r exceeds :func:`memory_cap`.
    :returns: StabilityReport

    """
    start = time.perf_counter()
    try:
        U = lyapmat.build_lyapunov_matrix(sys)
    except lyapmat.LyapunovConditionError as e:
        return _condition_failure(which, e, start)
    K = fundamental.build_fundamental(sys, step=step)
    consts = compute_r(sys, U, K, which, a_override, alpha0_frac,
                       derivative_method)
    r = consts.r_finite if which == FINITE else consts.r_corrected
    _check_memory(sys.n, r)
    tested = assemble_kr(U, r)
    if which == FINITE_CORRECTED:
        P = fundamental.build_pr(K, r)
        tested = tested - consts.alpha0_used * (P.T @ P)
    definiteness = linalg.classify_definiteness(tested)
    verdict = verdict_from(definiteness)
    report = StabilityReport(
        verdict=verdict, criterion=which, r_used=r,
        min_eigenvalue=definiteness.min_eigenvalue,
        tolerance=definiteness.tolerance_used, constants=consts,
        residuals=lyapmat.check_properties(U),
        condition_diagnostic=U.condition.diagnostic,
        wall_time=time.perf_counter() - start)
    log.info("%s criterion with r=%i: %s", which, r, verdict)
    return report


def necessary_criterion(sys, r):
    """The fixed-r test on r equidistant points. STABLE here only
    means that the necessary condition holds; UNSTABLE is conclusive.

    :returns: StabilityReport with constants None

    """
    start = time.perf_counter()
    try:
        U = lyapmat.build_lyapunov_matrix(sys)
    except lyapmat.LyapunovConditionError as e:
        return _condition_failure(NECESSARY, e, start)
    _check_memory(sys.n, r)
    definiteness = linalg.classify_definiteness(assemble_kr(U, r))
    verdict = verdict_from(definiteness)
    log.debug("necessary test with r=%i: %s", r, verdict)
    return StabilityReport(
        verdict=verdict, criterion=NECESSARY, r_used=r,
        min_eigenvalue=definiteness.min_eigenvalue,
        tolerance=definiteness.tolerance_used, constants=None,
        residuals=lyapmat.check_properties(U),
        condition_diagnostic=U.condition.diagnostic,
        wall_time=time.perf_counter() - start)
