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

"""Command line front end.

    delaylyap check SYSTEM.json [--criterion ...] [--oracle]
    delaylyap sweep SWEEP.json [--workers N] [--out PATH]
    delaylyap lyapmat SYSTEM.json [--tau-samples K]

Exit codes: 0 stable, 10 unstable, 20 Lyapunov condition fails,
30 numerically undecided, 1 input error, 2 computation refused.

"""

from concurrent.futures import ProcessPoolExecutor
import argparse
import copy
import json
import os
import sys
import time
from typing import NamedTuple, Tuple

import numpy as np

from . import criteria, fundamental, lyapmat, oracle, reports
from .system import TimeDelaySystem

import logging
log = logging.getLogger(__name__)


EXIT_CODES = {
    criteria.STABLE: 0,
    criteria.UNSTABLE: 10,
    criteria.LYAPUNOV_CONDITION_FAILS: 20,
    criteria.UNDECIDED_NUMERIC: 30,
}
EXIT_INPUT_ERROR = 1
EXIT_REFUSED = 2

# errors that mean "valid input, but we will not compute this"
REFUSED_ERRORS = (
    criteria.MemoryBudgetError, fundamental.IncompatibleStepError,
    lyapmat.IncommensurateDelaysError, oracle.NoConvergenceError)
INPUT_ERRORS = (OSError, ValueError, KeyError, TypeError, IndexError)

LOG_FORMAT = '%(name)-13s %(levelname)-8s: %(message)s'

# short names used in the literature for the two finite criteria
CRITERION_ALIASES = {'thm7': 'finite', 'thm8': 'finite-corrected'}

DERIVATIVE_BOUNDS = {'rigorous': fundamental.RIGOROUS_GRONWALL,
                     'empirical': fundamental.EMPIRICAL_GRID}


class CriterionChoice(NamedTuple(
        'CriterionChoice', [('kind', str), ('r', int)])):
    __slots__ = ()


def parse_criterion(text, r=None):
    """'finite' (or 'thm7'), 'finite-corrected' (or 'thm8'),
    'necessary' or 'necessary:R'."""
    text = text.strip().lower()
    text = CRITERION_ALIASES.get(text, text)
    if text == 'finite':
        return CriterionChoice(criteria.FINITE, None)
    if text == 'finite-corrected':
        return CriterionChoice(criteria.FINITE_CORRECTED, None)
    if text.startswith('necessary'):
        _, _, value = text.partition(':')
        if value:
            r = int(value)
        if r is None:
            raise ValueError("the necessary test needs r, e.g. "
                             "--criterion necessary:6 or --r 6")
        if r < 1:
            raise ValueError("r must be at least 1, got {}".format(r))
        return CriterionChoice(criteria.NECESSARY, int(r))
    raise ValueError("unknown criterion {!r}".format(text))


class Parameter(NamedTuple(
        'Parameter', [('name', str),
                      ('targets', Tuple[Tuple[tuple, float, float], ...]),
                      ('values', Tuple[float, ...])])):
    """A sweep axis. Each target (path, scale, offset) receives
    offset + scale * value at *path* inside the system template."""
    __slots__ = ()


def _resolve(template, path):
    node = template
    for key in path[:-1]:
        node = node[key]
    node[path[-1]]  # must exist
    return node


class SweepSpec(object):
    """A system template with two parameter axes.

    JSON layout::

        {"system": {...system layout...},
         "parameters": [
            {"name": "a", "path": ["terms", 1, "A", 1, 1],
             "min": -2, "max": 2, "steps": 41},
            {"name": "h1", "path": ["terms", 1, "delay"],
             "min": 0.05, "max": 2, "steps": 40}],
         "criterion": "necessary:6"}

    Instead of "path", a parameter may list "targets", each with a
    "path" and optional "scale" (default 1) and "offset" (default 0).

    """
    def __init__(self, template, parameters, criterion=None):
        self.template = template
        self.parameters = tuple(parameters)
        self.criterion = criterion
        if len(self.parameters) != 2:
            raise ValueError("a sweep needs exactly two parameters, got "
                             "{}".format(len(self.parameters)))
        for p in self.parameters:
            if len(p.values) < 2:
                raise ValueError(
                    "parameter {} needs at least 2 steps".format(p.name))
            for path, _, _ in p.targets:
                try:
                    _resolve(template, path)
                except (KeyError, IndexError, TypeError):
                    raise ValueError(
                        "parameter {}: path {} does not resolve in the "
                        "system template".format(p.name, list(path)))

    @classmethod
    def from_dict(cls, data):
        params = []
        for i, p in enumerate(data['parameters']):
            if 'targets' in p:
                targets = tuple(
                    (tuple(t['path']), float(t.get('scale', 1.0)),
                     float(t.get('offset', 0.0))) for t in p['targets'])
            else:
                targets = ((tuple(p['path']), float(p.get('scale', 1.0)),
                            float(p.get('offset', 0.0))),)
            steps = int(p['steps'])
            if steps < 2:
                raise ValueError("parameter {} needs at least 2 steps".format(
                    p.get('name', i + 1)))
            values = tuple(np.linspace(float(p['min']), float(p['max']),
                                       steps).tolist())
            params.append(Parameter(
                str(p.get('name', 'param{}'.format(i + 1))), targets, values))
        return cls(data['system'], params, data.get('criterion'))

    @classmethod
    def load(cls, path_or_buf):
        if hasattr(path_or_buf, 'read'):
            return cls.from_dict(json.load(path_or_buf))
        with open(path_or_buf, 'r') as f:
            return cls.from_dict(json.load(f))

    def instantiate(self, v1, v2):
        """System layout with both parameters substituted."""
        data = copy.deepcopy(self.template)
        for p, v in zip(self.parameters, (v1, v2)):
            for path, scale, offset in p.targets:
                _resolve(data, path)[path[-1]] = offset + scale * v
        return data

    def grid(self):
        """(v1, v2) pairs, first parameter outer."""
        return [(v1, v2) for v1 in self.parameters[0].values
                for v2 in self.parameters[1].values]


def run_criterion(tds, choice, a_bound=None, alpha0_frac=None, step=None,
                  derivative_method=None):
    if alpha0_frac is None:
        alpha0_frac = criteria.DEFAULT_ALPHA0_FRAC
    if derivative_method is None:
        derivative_method = fundamental.RIGOROUS_GRONWALL
    if choice.kind == criteria.NECESSARY:
        return criteria.necessary_criterion(tds, choice.r)
    return criteria.finite_criterion(
        tds, choice.kind, a_override=a_bound, alpha0_frac=alpha0_frac,
        step=step, derivative_method=derivative_method)


def attach_oracle(report, tds):
    """Add the oracle verdict and rightmost root to *report*."""
    try:
        est = oracle.rightmost_roots(tds)
    except oracle.NoConvergenceError as e:
        log.warning("Oracle did not converge: %s", e)
        return report._replace(oracle_verdict='NO_CONVERGENCE')
    root = est.rightmost
    if not est.converged:
        log.warning("Oracle root %s not settled at N=%i", root, est.N)
        verdict = 'UNDECIDED'
    elif abs(root.real) <= oracle.UNDECIDED_BAND:
        verdict = 'UNDECIDED'
    else:
        verdict = criteria.STABLE if root.real < 0 else criteria.UNSTABLE
    return report._replace(oracle_verdict=verdict, rightmost_root=root)


def _sweep_point(job):
    spec, v1, v2, choice, options, with_oracle = job
    start = time.perf_counter()
    verdict = criteria.ERROR
    r_used = None
    min_eig = None
    oracle_verdict = None
    try:
        tds = TimeDelaySystem.from_dict(spec.instantiate(v1, v2))
        report = run_criterion(tds, choice, **options)
        if with_oracle:
            report = attach_oracle(report, tds)
            oracle_verdict = report.oracle_verdict
        verdict, r_used, min_eig = (
            report.verdict, report.r_used, report.min_eigenvalue)
    except Exception as e:
        log.warning("Sweep point (%g, %g) failed: %s", v1, v2, e)
    return reports.SweepPoint(v1, v2, verdict, r_used, min_eig,
                              oracle_verdict, time.perf_counter() - start)


def sweep(spec, choice, workers=1, with_oracle=False, **options):
    """Evaluate every grid point of *spec*; rows keep grid order.

    :returns: reports.SweepReport

    """
    jobs = [(spec, v1, v2, choice, options, with_oracle)
            for v1, v2 in spec.grid()]
    result = reports.SweepReport(
        names=[p.name for p in spec.parameters], with_oracle=with_oracle)
    if workers is None or workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_sweep_point, jobs))
    else:
        points = [_sweep_point(job) for job in jobs]
    for p in points:
        result.add_point(p)
    log.info("Swept %i points", len(points))
    return result


def _write(text, out):
    if out is None:
        sys.stdout.write(text)
        if not text.endswith('\n'):
            sys.stdout.write('\n')
    else:
        with open(out, 'w') as f:
            f.write(text)
        log.info("Wrote %s", out)


def cmd_check(args):
    tds = TimeDelaySystem.load(args.system)
    choice = parse_criterion(args.criterion, args.r)
    report = run_criterion(
        tds, choice, args.a_bound, args.alpha0_frac, args.step,
        DERIVATIVE_BOUNDS[args.derivative_bound])
    if args.oracle:
        report = attach_oracle(report, tds)
    _write(reports.report_to_json(report, indent=2, sort_keys=True),
           args.out)
    return EXIT_CODES[report.verdict]


def cmd_sweep(args):
    spec = SweepSpec.load(args.sweep)
    text = args.criterion or spec.criterion
    if text is None:
        raise ValueError("no criterion given on the command line or in the "
                         "sweep file")
    choice = parse_criterion(text, args.r)
    result = sweep(spec, choice, workers=args.workers,
                   with_oracle=args.oracle, a_bound=args.a_bound,
                   alpha0_frac=args.alpha0_frac, step=args.step,
                   derivative_method=DERIVATIVE_BOUNDS[args.derivative_bound])
    _write(result.export_to_csv(), args.out)
    return 0


def cmd_lyapmat(args):
    tds = TimeDelaySystem.load(args.system)
    if args.tau_samples < 1:
        raise ValueError("--tau-samples must be at least 1")
    try:
        U = lyapmat.build_lyapunov_matrix(tds)
    except lyapmat.LyapunovConditionError as e:
        log.error("%s", e)
        return EXIT_CODES[criteria.LYAPUNOV_CONDITION_FAILS]
    taus = (np.zeros(1) if args.tau_samples == 1
            else np.linspace(0.0, tds.H, args.tau_samples))
    _write(U.export_to_csv(taus), args.out)
    if args.dump_fundamental:
        fundamental.build_fundamental(tds, step=args.step).export_to_csv(
            args.dump_fundamental)
    return 0


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog='delaylyap',
        description="Stability tests for linear time-delay systems based "
                    "on the delay Lyapunov matrix.")
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help="-v for progress, -vv for diagnostics")
    sub = parser.add_subparsers(dest='command')
    sub.required = True

    def common(p):
        p.add_argument('--criterion', default=None,
                       help="finite (thm7), finite-corrected (thm8) "
                            "or necessary:R")
        p.add_argument('--r', type=_positive_int, default=None,
                       help="number of points for the necessary test")
        p.add_argument('--a-bound', type=float, default=None,
                       help="bound of the real parts of the roots "
                            "(default: sum of the matrix norms)")
        p.add_argument('--alpha0-frac', type=float, default=None,
                       help="fraction of alpha0* used by the corrected "
                            "criterion (default 0.5)")
        p.add_argument('--derivative-bound', choices=sorted(DERIVATIVE_BOUNDS),
                       default='rigorous',
                       help="bound L of the derivative of the fundamental "
                            "matrix; 'empirical' is not a proven bound")
        p.add_argument('--oracle', action='store_true',
                       help="attach the spectral oracle verdict")
        p.add_argument('--step', type=float, default=None,
                       help="integration step for the fundamental matrix")
        p.add_argument('--out', default=None, help="output file")

    p = sub.add_parser('check', help="test one system")
    p.add_argument('system', help="system JSON file")
    common(p)
    p.set_defaults(func=cmd_check, criterion='finite-corrected')

    p = sub.add_parser('sweep', help="stability map over two parameters")
    p.add_argument('sweep', help="sweep JSON file")
    common(p)
    p.add_argument('--workers', type=_positive_int, default=os.cpu_count(),
                   help="parallel worker processes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser('lyapmat', help="dump U(tau) samples as csv")
    p.add_argument('system', help="system JSON file")
    p.add_argument('--tau-samples', type=int, default=101)
    p.add_argument('--dump-fundamental', default=None, metavar='PATH',
                   help="also write K(t) samples to PATH")
    p.add_argument('--step', type=float, default=None)
    p.add_argument('--out', default=None, help="output file")
    p.set_defaults(func=cmd_lyapmat)
    return parser


def setup_logging(verbosity):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root = logging.getLogger('delaylyap')
    root.handlers = [h for h in root.handlers
                     if isinstance(h, logging.NullHandler)]
    root.addHandler(handler)
    root.setLevel(level)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT_ERROR if e.code else 0
    setup_logging(args.verbose)
    try:
        return args.func(args)
    except REFUSED_ERRORS as e:
        log.error("Computation refused: %s", e, exc_info=args.verbose > 1)
        return EXIT_REFUSED
    except json.JSONDecodeError as e:
        log.error("Malformed JSON: %s", e, exc_info=args.verbose > 1)
        return EXIT_INPUT_ERROR
    except INPUT_ERRORS as e:
        log.error("Invalid input: %s", e, exc_info=args.verbose > 1)
        return EXIT_INPUT_ERROR
