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

import sys

from .cli import main

sys.exit(main())
