# -*- coding: utf-8 -*-
#
# FHMpy documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os

# Make the package importable for autodoc
sys.path.insert(0, os.path.abspath('..'))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
]

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = u'FHMpy'
copyright = u'2026, FHMpy developers'
author = u'FHMpy developers'

version = '0.1'
release = '0.1'

language = None

exclude_patterns = ['_build']

pygments_style = 'sphinx'

todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'

html_static_path = ['_static']

htmlhelp_basename = 'FHMpydoc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {
}

latex_documents = [
  (master_doc, 'FHMpy.tex', u'FHMpy Documentation',
   u'FHMpy developers', 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'fhmpy', u'FHMpy Documentation',
     [author], 1)
]

# -- Options for Texinfo output -------------------------------------------

texinfo_documents = [
  (master_doc, 'FHMpy', u'FHMpy Documentation',
   author, 'FHMpy', 'Exact core analysis of housing markets with fractional endowments.',
   'Miscellaneous'),
]
