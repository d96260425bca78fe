"""Sphinx configuration of the Kedro Self-Notes docs."""
import os
import sys

sys.path.insert(0, os.path.abspath(".."))

from kedro_selfnotes import __version__  # noqa: E402

extensions = [
    "sphinx.ext.autodoc",
    "autoapi.extension",
    "sphinx.ext.doctest",
    "sphinx.ext.intersphinx",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
    "sphinx_autodoc_typehints",
    "sphinx_copybutton",
    "myst_parser",
]

project = "Kedro Self-Notes"
release = __version__
language = "en"

source_suffix = [".md"]
templates_path = ["_templates"]
exclude_patterns: list = []
autoapi_dirs = ["../kedro_selfnotes"]
autodoc_mock_imports = ["torch", "chess"]

html_theme = "furo"
