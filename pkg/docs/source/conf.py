#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# robustmc documentation build configuration file.
import os
import sys
sys.path.insert(0, os.path.abspath(os.path.join('..', '..')))


# -- General configuration ------------------------------------------------

extensions = ['sphinx.ext.autodoc',
              'sphinx.ext.mathjax',
              'sphinx.ext.viewcode',
              'sphinx.ext.napoleon']

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'robustmc'
copyright = '2026, robustmc developers'
author = 'robustmc developers'

version = '0.1.0'
release = '0.1.0'

language = None
exclude_patterns = []
pygments_style = 'sphinx'
todo_include_todos = False

# numpydoc style docstrings
napoleon_google_docstring = False
napoleon_numpy_docstring = True


# -- Options for HTML output ----------------------------------------------
try:
    import sphinx_rtd_theme
except ImportError:
    print('No sphinx_rtd_theme found! Default theme is used!')
    html_theme = 'alabaster'
else:
    html_theme = 'sphinx_rtd_theme'
    html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]

html_static_path = []
htmlhelp_basename = 'robustmcdoc'


# -- Options for LaTeX output ---------------------------------------------

latex_documents = [
    (master_doc, 'robustmc.tex', 'robustmc Documentation',
     author, 'manual'),
]
