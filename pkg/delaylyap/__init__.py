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

import logging

logging.getLogger(__name__).addHandler(logging.NullHandler())

from .system import TimeDelaySystem, commensurate, norm_constants
from .fundamental import (
    FundamentalMatrix,
    InitialFunction,
    build_fundamental,
    solve_ivp,
)
from .lyapmat import (
    LyapunovMatrix,
    build_lyapunov_matrix,
    check_properties,
    check_lyapunov_condition,
)
from .functional import eval_v0, eval_v1, eval_z, build_psi
from .criteria import (
    assemble_kr,
    necessary_test,
    finite_criterion,
    necessary_criterion,
)
from .oracle import rightmost_roots, is_stable_oracle
from .reports import CriterionConstants, StabilityReport, SweepReport
