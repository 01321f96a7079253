# -*- coding: utf-8 -*-
#
# Sphinx configuration for the delayLyap documentation.

import os
import sys
sys.path.insert(0, os.path.abspath('../..'))

# autodoc only needs the docstrings; the numerical stack is mocked so
# the docs build without it.
import mock
MOCK_MODULES = ['numpy', 'numpy.linalg', 'scipy', 'scipy.linalg',
                'scipy.optimize', 'pandas']
for mod_name in MOCK_MODULES:
    sys.modules[mod_name] = mock.Mock()


project = u'delayLyap'
copyright = u'2026, The delayLyap developers'
author = u'The delayLyap developers'
version = u'0.1'
release = u'0.1.0'

autoclass_content = 'both'
extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.coverage',
    'sphinx.ext.mathjax',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'
exclude_patterns = []
pygments_style = 'sphinx'

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
htmlhelp_basename = 'delayLyapdoc'

latex_documents = [
    (master_doc, 'delayLyap.tex', 'delayLyap Documentation',
     author, 'manual'),
]
man_pages = [
    (master_doc, 'delaylyap', 'delayLyap Documentation', [author], 1)
]
