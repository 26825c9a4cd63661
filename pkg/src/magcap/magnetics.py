"""Closed-form magnetic dipole field, gradient, force and torque.

Conventions: SI units throughout; ``r`` is always the position of the field
point (the capsule) relative to the source (the actuator).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import DipoleSingularityError

MU0 = 4.0 * math.pi * 1e-7  # T*m/A

# below this separation the magnets would physically collide; reject rather
# than clamp so planner bugs surface
MIN_SEPARATION_M = 1e-3


def as_vector(v):
    """Coerce to a finite float (3,) array."""
    a = np.asarray(v, dtype=float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"non-finite vector components: {a}")
    return a


def as_unit(v, tol=1e-12):
    """Coerce to a (3,) array and check unit norm."""
    a = as_vector(v)
    n = np.linalg.norm(a)
    if abs(n - 1.0) > tol:
        raise ValueError(f"vector norm {n} is not 1 within {tol}")
    return a


def unit(v):
    """Normalize, raising on (near-)zero input."""
    a = as_vector(v)
    n = np.linalg.norm(a)
    if n == 0.0:
        raise ValueError("cannot normalize zero vector")
    return a / n


@dataclass(frozen=True)
class MagnetSpec:
    """Geometry and remanence of a permanent magnet.

    shape: "sphere" (uses diameter_m) or "ring" (outer/inner diameter and
    length).  Remanence in tesla.
    """

    shape: str
    remanence_t: float
    diameter_m: float = 0.0
    outer_diameter_m: float = 0.0
    inner_diameter_m: float = 0.0
    length_m: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.remanence_t < 2.0:
            raise ValueError(f"remanence {self.remanence_t} T outside (0, 2)")
        if self.shape == "sphere":
            if self.diameter_m <= 0.0:
                raise ValueError("sphere diameter must be > 0")
        elif self.shape == "ring":
            if not 0.0 < self.inner_diameter_m < self.outer_diameter_m:
                raise ValueError("ring requires 0 < inner_d < outer_d")
            if self.length_m <= 0.0:
                raise ValueError("ring length must be > 0")
        else:
            raise ValueError(f"unknown magnet shape {self.shape!r}")

    def volume_m3(self):
        if self.shape == "sphere":
            return math.pi * self.diameter_m**3 / 6.0
        ro = self.outer_diameter_m / 2.0
        ri = self.inner_diameter_m / 2.0
        return math.pi * (ro**2 - ri**2) * self.length_m


@dataclass(frozen=True)
class DipoleSource:
    """A point dipole: position plus moment magnitude and direction."""

    position: np.ndarray
    moment_magnitude: float
    moment_direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", as_vector(self.position))
        object.__setattr__(self, "moment_direction", as_unit(self.moment_direction))
        if self.moment_magnitude <= 0.0:
            raise ValueError("moment magnitude must be > 0")

    @property
    def moment(self):
        return self.moment_magnitude * self.moment_direction


def moment_magnitude_from_spec(spec):
    """|m| = Br * V / mu0 for a uniformly magnetized magnet."""
    return spec.remanence_t * spec.volume_m3() / MU0


def _check_r(r):
    r = as_vector(r)
    if np.linalg.norm(r) < MIN_SEPARATION_M:
        raise DipoleSingularityError(
            f"field point within {MIN_SEPARATION_M} m of the dipole: {r}")
    return r


def dipole_field(r, m_mag, m_hat):
    """Field (T) at ``r`` from a dipole of moment m_mag * m_hat at the origin."""
    r = _check_r(r)
    return backend.field_batch(r[None, :], float(m_mag), as_unit(m_hat))[0]


def dipole_field_jacobian(r, m_mag, m_hat):
    """dB/dr (T/m), a symmetric traceless 3x3 matrix."""
    r = _check_r(r)
    return backend.field_jacobian_batch(r[None, :], float(m_mag), as_unit(m_hat))[0]


def dipole_force(r, ma_mag, ma_hat, mc_mag, mc_hat):
    """Force (N) on a capsule dipole at ``r`` relative to the actuator dipole.

    Equals the gradient of m_c . b(r) with respect to the capsule position.
    """
    r = _check_r(r)
    if ma_mag <= 0.0 or mc_mag <= 0.0:
        raise ValueError("moment magnitudes must be > 0")
    return backend.force_on_dipole(r, float(ma_mag), as_unit(ma_hat),
                                   float(mc_mag), as_unit(mc_hat))


def dipole_torque(r, ma_mag, ma_hat, mc_mag, mc_hat):
    """Torque (N*m) on the capsule dipole: m_c x b_c."""
    b = dipole_field(r, ma_mag, ma_hat)
    return np.cross(mc_mag * as_unit(mc_hat), b)
