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

from collections import namedtuple
import json

import numpy as np
import pandas as pd

import logging
log = logging.getLogger(__name__)


CriterionConstants = namedtuple(
        'CriterionConstants',
        'M, M1, nu, L, rho, a, b, beta_star, alpha0_star, alpha0_used, '
        'r_finite, r_corrected, derivative_method')
try:
    CriterionConstants.__doc__ += (
        "\nAll constants entering the finite stability criteria: norm "
        "sums M and M1, the sampled bound nu of ||U||, the derivative "
        "bound L of the fundamental matrix, the functional bound rho, "
        "the growth bound a with the root b of the auxiliary equation, "
        "the instability level beta_star, the lower bound alpha0_star "
        "and its used fraction alpha0_used, and the resulting numbers "
        "of points for the plain and the corrected criterion.")
except AttributeError:
    # Older versions do not allow setting the docstring
    pass

StabilityReport = namedtuple(
        'StabilityReport',
        'verdict, criterion, r_used, min_eigenvalue, tolerance, '
        'constants, residuals, condition_diagnostic, wall_time, '
        'oracle_verdict, rightmost_root')
StabilityReport.__new__.__defaults__ = (None, None)
try:
    StabilityReport.__doc__ += (
        "\nOutcome of one stability test. *constants* is a "
        "CriterionConstants object (None for the fixed-r necessary "
        "test), *residuals* the property residuals of the Lyapunov "
        "matrix. The oracle fields are only filled on request.")
except AttributeError:
    pass

SweepPoint = namedtuple(
        'SweepPoint',
        'param1, param2, verdict, r_used, min_eigenvalue, oracle_verdict, '
        'wall_time')
try:
    SweepPoint.__doc__ += (
        "\nOne grid point of a parameter sweep.")
except AttributeError:
    pass


def _json_encode_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    elif isinstance(obj, np.floating):
        return float(obj)
    elif isinstance(obj, np.ndarray):
        return obj.tolist()
    elif isinstance(obj, (complex, np.complexfloating)):
        return {'real': float(obj.real), 'imag': float(obj.imag)}
    else:
        raise TypeError(repr(obj) + " is not JSON serializable")


def report_to_dict(report):
    """Nested dict of a StabilityReport, ready for :func:`json.dumps`."""
    out = report._asdict()
    for key in ('constants', 'residuals'):
        if out[key] is not None:
            out[key] = out[key]._asdict()
    return out


def report_to_json(report, **kwargs):
    """Convert a StabilityReport to a JSON formatted string.

    :param kwargs:
        Keyword arguments that will be forwarded to `json.dumps`.

    """
    return json.dumps(
        report_to_dict(report), default=_json_encode_default, **kwargs)


class SweepReport(object):
    """Collects the results of a two-parameter sweep and exports them
    as a stability map table.

    """
    def __init__(self, names=('param1', 'param2'), with_oracle=False,
                 data=[]):
        """
        :param names: column titles of the two parameters
        :param with_oracle: boolean, default False;
            Add the oracle verdict column to exports.
        :param data: list of SweepPoint objects or of tuples with
            entries corresponding to SweepPoint._fields.

        """
        self.names = tuple(names)
        self.with_oracle = with_oracle
        self.data = [SweepPoint._make(d) for d in data]

    def add_point(self, point):
        if not isinstance(point, SweepPoint):
            raise ValueError("Only SweepPoint objects may be added.")
        self.data.append(point)

    def to_json(self, **kwargs):
        return json.dumps(
            {'names': self.names, 'with_oracle': self.with_oracle,
             'data': [p._asdict() for p in self.data]},
            default=_json_encode_default, **kwargs)

    def to_data_frame(self):
        """Sweep rows as a pandas.DataFrame in insertion order. Timing
        is left out, so the table only depends on the inputs.

        """
        columns = list(self.names) + ['verdict', 'r_used', 'min_eig']
        if self.with_oracle:
            columns.append('oracle_verdict')
        rows = []
        for p in self.data:
            row = [p.param1, p.param2, p.verdict, p.r_used, p.min_eigenvalue]
            if self.with_oracle:
                row.append(p.oracle_verdict)
            rows.append(row)
        df = pd.DataFrame(rows, columns=columns)
        return df.astype({'r_used': 'Int64'})

    def timing_footer(self):
        times = [p.wall_time for p in self.data if p.wall_time is not None]
        if not times:
            return ''
        return '# points={} total_ms={:.1f} max_ms={:.1f}\n'.format(
            len(times), 1e3 * sum(times), 1e3 * max(times))

    def export_to_csv(self, path_or_buf=None, footer=True, **kwargs):
        """Write the sweep table to a csv file.

        :param path_or_buf: File path (string) or file handle,
            default None;
            If None is provided the result is returned as a string.
        :param footer: boolean, default True;
            Append a line starting with '#' holding the wall times.
        :param kwargs: Keyword arguments forwarded to
            pandas.DataFrame.to_csv.

        """
        if not self.data:
            log.warning("Sweep report could not be saved. There is no data.")
            return
        text = self.to_data_frame().to_csv(
            None, index=False, float_format='%.10g', **kwargs)
        if footer:
            text += self.timing_footer()
        if path_or_buf is None:
            return text
        if hasattr(path_or_buf, 'write'):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, 'w') as f:
                f.write(text)
        log.info("Exported sweep of %i points to %s",
                 len(self.data), str(path_or_buf))
