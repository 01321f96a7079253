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

from setuptools import setup

setup(name='delayLyap',
      version='0.1',
      description='Stability tests for linear time-delay systems based on '
                  'the delay Lyapunov matrix',
      author='The delayLyap developers',
      license='LGPL-3.0-or-later',
      packages=['delaylyap'],
      python_requires='>=3.6',
      install_requires=[
          'numpy',
          'scipy',
          'pandas',
      ],
      entry_points={
          'console_scripts': ['delaylyap = delaylyap.cli:main'],
      },
      include_package_data=True,
      zip_safe=False)
