# Sphinx configuration of the sictomo documentation
import os
import sys
sys.path.insert(0, os.path.abspath('../src'))

project = u'sictomo'
copyright = u'2026, sictomo developers'
author = u'sictomo developers'
version = u''
release = u'0.1.0'

extensions = [
    'nbsphinx',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
    'autoapi.extension',
    'recommonmark'
]

add_module_names = False
nbsphinx_execute = 'never'

autoapi_dirs = ['../src/sictomo']
autoapi_add_toctree_entry = False
autoapi_generate_api_docs = True
autoapi_root = '_api/autoapi'
autoapi_options = ['members', 'show-module-summary']
autoapi_keep_files = True
autoapi_ignore = ['*/_utils/*', '*/__pycache__/*']

source_suffix = '.rst'
master_doc = 'index'
language = 'en'
exclude_patterns = ['build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'

html_theme = 'sphinx_rtd_theme'
html_theme_options = {
    'collapse_navigation': True,
    'navigation_depth': 3,
}
htmlhelp_basename = 'sictomodoc'
