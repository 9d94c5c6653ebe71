"""Screened droplet energies on the flat torus."""

from ._okdrop import *  # noqa: F401,F403
from ._okdrop import OkdropError, ParameterError  # noqa: F401

__version__ = "0.1.0"
