"""Magnetic capsule actuation: dipole models, actuator planning,
twist-risk analysis, array localization and closed-loop propulsion."""

from .backend import BACKEND
from .errors import (ConfigError, DegenerateFieldError,
                     DegenerateGeometryError, DegenerateOrientationError,
                     DipoleSingularityError, MagcapError, StaleHeadingError)

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__", "MagcapError", "ConfigError",
           "DipoleSingularityError", "DegenerateOrientationError",
           "DegenerateGeometryError", "DegenerateFieldError",
           "StaleHeadingError"]
