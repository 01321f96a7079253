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

from fractions import Fraction
import math
from typing import NamedTuple, Tuple
import json

import numpy as np

from . import linalg

import logging
log = logging.getLogger(__name__)


DEFAULT_COMMENSURATE_TOL = 1e-9
# Delay ratios needing a larger multiplier are treated as incommensurate.
DEFAULT_MAX_MULTIPLIER = 256

# validation error codes
NON_SQUARE = 'NON_SQUARE'
DUPLICATE_DELAY = 'DUPLICATE_DELAY'
INVALID_DELAY = 'INVALID_DELAY'
NO_NONTRIVIAL_DELAYED_MATRIX = 'NO_NONTRIVIAL_DELAYED_MATRIX'
W_NOT_PD = 'W_NOT_PD'
NON_FINITE = 'NON_FINITE'


class SystemValidationError(ValueError):
    def __init__(self, code, message):
        super(SystemValidationError, self).__init__(
            '{}: {}'.format(code, message))
        self.code = code


class Commensuration(NamedTuple(
        'Commensuration', [('basic_delay', float),
                           ('multipliers', Tuple[int, ...]),
                           ('exact', bool)])):
    """Basic delay h with hj = kj*h for every delay of a system.

    *multipliers* has one entry per term of the system, including the
    leading 0 of the undelayed term. If *exact* is False, the delays
    could not be matched within tolerance and the other fields are
    only a best effort.

    """
    __slots__ = ()

    @property
    def segments(self):
        return max(self.multipliers)


class TimeDelaySystem(object):
    """The linear retarded system

        x'(t) = A_0 x(t) + A_1 x(t - h_1) + ... + A_m x(t - h_m)

    together with the symmetric positive definite weight matrix W
    that defines its delay Lyapunov matrix.

    Instances are immutable: the stored arrays are read-only.

    """
    def __init__(self, terms, W=None, validate=True, merge_duplicates=True):
        """Create a system from a list of (delay, matrix) terms.

        :param terms: iterable of (h_j, A_j) pairs. Delays may come in
            any order; they will be sorted (with a warning). A term
            with delay 0 is added with a zero matrix if missing.
        :param W: weight matrix, default: identity.
        :param validate: boolean, default True;
            Run :meth:`validate` after construction. Turn this off only
            to analyse degenerate systems (e.g. in the spectral oracle).
        :param merge_duplicates: boolean, default True;
            Sum the matrices of terms with equal delays. If False,
            duplicates are kept and reported by :meth:`validate`.

        """
        terms = [(float(h), np.array(a, dtype=float, ndmin=2))
                 for h, a in terms]
        if not terms:
            raise SystemValidationError(
                NO_NONTRIVIAL_DELAYED_MATRIX, "system has no terms")
        n = terms[0][1].shape[0]
        delays = [h for h, _ in terms]
        if delays != sorted(delays):
            log.warning("Delays %s are not sorted; sorting them.", delays)
            terms.sort(key=lambda t: t[0])
        if merge_duplicates:
            merged = []
            for h, a in terms:
                if merged and merged[-1][0] == h:
                    if merged[-1][1].shape != a.shape:
                        raise SystemValidationError(
                            NON_SQUARE,
                            "matrices for delay {} differ in shape".format(h))
                    log.warning(
                        "Merging duplicate terms with delay %g.", h)
                    merged[-1] = (h, merged[-1][1] + a)
                else:
                    merged.append((h, a))
            terms = merged
        if terms[0][0] > 0.0:
            terms.insert(0, (0.0, np.zeros((n, n))))

        self.n = n
        self.delays = np.array([h for h, _ in terms])
        self.matrices = tuple(a for _, a in terms)
        if W is None:
            W = np.eye(n)
        self.W = np.array(W, dtype=float, ndmin=2)
        for arr in (self.delays, self.W) + self.matrices:
            arr.setflags(write=False)
        if validate:
            self.validate()

    @property
    def m(self):
        """Number of delayed terms."""
        return len(self.delays) - 1

    @property
    def H(self):
        """Largest delay."""
        return float(self.delays[-1])

    @property
    def terms(self):
        return list(zip(self.delays.tolist(), self.matrices))

    def __repr__(self):
        return 'TimeDelaySystem(n={}, delays={})'.format(
            self.n, self.delays.tolist())

    def validate(self):
        """Check the standing assumptions on the system.

        :raises SystemValidationError: naming the violated assumption.

        """
        n = self.n
        for h, a in self.terms:
            if a.shape != (n, n):
                raise SystemValidationError(
                    NON_SQUARE,
                    "matrix for delay {} has shape {}, expected {}".format(
                        h, a.shape, (n, n)))
            if not np.all(np.isfinite(a)):
                raise SystemValidationError(
                    NON_FINITE, "matrix for delay {} is not finite".format(h))
        if self.W.shape != (n, n):
            raise SystemValidationError(
                NON_SQUARE,
                "W has shape {}, expected {}".format(self.W.shape, (n, n)))
        if not np.all(np.isfinite(self.W)):
            raise SystemValidationError(NON_FINITE, "W is not finite")
        if not np.all(np.isfinite(self.delays)) or np.any(self.delays < 0):
            raise SystemValidationError(
                INVALID_DELAY, "delays must be finite and non-negative, "
                "got {}".format(self.delays.tolist()))
        if np.any(np.diff(self.delays) <= 0):
            raise SystemValidationError(
                DUPLICATE_DELAY,
                "delays {} are not strictly increasing".format(
                    self.delays.tolist()))
        if self.m < 1 or not any(np.any(a != 0) for a in self.matrices[1:]):
            raise SystemValidationError(
                NO_NONTRIVIAL_DELAYED_MATRIX,
                "at least one delayed matrix must be nonzero")
        if not np.allclose(self.W, self.W.T, rtol=0,
                           atol=1e-12 * max(1., np.abs(self.W).max())):
            raise SystemValidationError(W_NOT_PD, "W is not symmetric")
        if not linalg.classify_definiteness(self.W).is_positive_definite:
            raise SystemValidationError(
                W_NOT_PD, "W is not positive definite")

    def characteristic_matrix(self, s):
        """Return s*I - sum_j A_j exp(-s h_j) for a complex scalar s."""
        out = s * np.eye(self.n, dtype=complex)
        for h, a in self.terms:
            out -= a * np.exp(-s * h)
        return out

    def to_dict(self):
        return {
            'n': self.n,
            'terms': [{'delay': h, 'A': a.tolist()} for h, a in self.terms],
            'W': self.W.tolist()}

    @classmethod
    def from_dict(cls, data, **kwargs):
        """Build a system from the JSON layout
        ``{"n": int, "terms": [{"delay": float, "A": [[...]]}], "W": [[...]]}``.

        Matrices are given row by row; "W" is optional.

        """
        try:
            terms = [(t['delay'], t['A']) for t in data['terms']]
        except (KeyError, TypeError) as e:
            raise ValueError(
                "system description needs a 'terms' list of "
                "{{'delay', 'A'}} objects ({})".format(e))
        sys = cls(terms, W=data.get('W'), **kwargs)
        if 'n' in data and int(data['n']) != sys.n:
            raise SystemValidationError(
                NON_SQUARE, "declared n={} but matrices are {}x{}".format(
                    data['n'], sys.n, sys.n))
        return sys

    @classmethod
    def load(cls, path_or_buf, **kwargs):
        """Load a system from a JSON file path or an open file."""
        if hasattr(path_or_buf, 'read'):
            data = json.load(path_or_buf)
        else:
            with open(path_or_buf, 'r') as f:
                data = json.load(f)
        return cls.from_dict(data, **kwargs)


def validate(sys):
    """Module level alias of :meth:`TimeDelaySystem.validate`."""
    sys.validate()


def commensurate(sys, rel_tol=DEFAULT_COMMENSURATE_TOL,
                 max_multiplier=DEFAULT_MAX_MULTIPLIER):
    """Find the largest basic delay h such that every delay of *sys*
    is an integer multiple of h.

    :param rel_tol: tolerance relative to H for |h_j - k_j h|.
    :param max_multiplier: ratios that need a multiplier above this
        are reported as incommensurate.
    :returns: Commensuration

    """
    H = sys.H
    positive = sys.delays[sys.delays > 0]
    if positive.size == 0:
        raise ValueError("system has no positive delay")
    hmin = positive[0]
    denominator = 1
    for h in positive[1:]:
        frac = Fraction(h / hmin).limit_denominator(max_multiplier)
        denominator = denominator * frac.denominator // math.gcd(
            denominator, frac.denominator)
    basic = hmin / denominator
    multipliers = tuple(int(k) for k in np.rint(sys.delays / basic))
    exact = (max(multipliers) <= max_multiplier and all(
        abs(h - k * basic) <= rel_tol * H
        for h, k in zip(sys.delays, multipliers)))
    if not exact:
        log.debug("delays %s are not commensurate within %g",
                  sys.delays.tolist(), rel_tol)
    return Commensuration(float(basic), multipliers, bool(exact))


def norm_constants(sys):
    """Return (M, M1) with M = sum ||A_j|| and M1 = sum h_j ||A_j||."""
    norms = [linalg.spectral_norm(a) for a in sys.matrices]
    M = float(sum(norms))
    M1 = float(sum(h * nrm for h, nrm in zip(sys.delays, norms)))
    return M, M1
