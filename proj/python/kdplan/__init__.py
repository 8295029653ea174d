"""Kinodynamic local replanning toolkit (C++ core)."""

from ._kdplan import *  # noqa: F401,F403
from ._kdplan import __doc__  # noqa: F401

__version__ = "0.1.0"
