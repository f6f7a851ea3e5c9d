"""Triangular finite elements with transformation-corrected bases."""

from ._piolafe import *  # noqa: F401,F403
from ._piolafe import Family, Pattern, PiolafeError  # noqa: F401

__version__ = "0.1.0"
