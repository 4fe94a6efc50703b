"""Dispersive-target SAR simulation, Kirchhoff migration imaging and RCS recovery."""

from ._core import *  # noqa: F401,F403
from ._core import (  # noqa: F401
    ConfigError,
    DomainError,
    NumericalError,
    Geometry,
    GeometryParams,
    GridSpec,
    SphereSpec,
)

__version__ = "0.1.0"
