"""Exception types shared across the package."""


class MagcapError(ValueError):
    """Base class for all domain errors raised by magcap."""


class DipoleSingularityError(MagcapError):
    """Field/force requested too close to a dipole source."""


class DegenerateOrientationError(MagcapError):
    """Axis-angle parametrization undefined (vector at or near a pole)."""


class DegenerateGeometryError(MagcapError):
    """Actuation geometry degenerate (zero rotation axis, collapsed plane U)."""


class DegenerateFieldError(MagcapError):
    """Field parallel to the capsule rotation axis; moment direction undefined."""


class StaleHeadingError(MagcapError):
    """Position history has not moved enough to estimate a heading."""


class ConfigError(MagcapError):
    """Invalid run configuration or environment file."""
