"""Actuator pose planning and reciprocating-waveform generation.

Plans where to put the rotating actuator magnet relative to the capsule,
which axis to spin it about, and how its moment direction evolves over one
cycle under the three actuation modes (DMA / CRMA / RRMA), and decomposes
the resulting magnetic force on the capsule into propulsive, lateral and
remainder components.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateFieldError, DegenerateGeometryError,
                     DegenerateOrientationError)
from .magnetics import as_unit, as_vector, dipole_field, dipole_force, unit
from .rotations import rot_x, rot_y, rot_z

_EX = np.array([1.0, 0.0, 0.0])
_EZ = np.array([0.0, 0.0, 1.0])

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class AxisAngles:
    """Yaw/elevation parametrization of a unit vector (radians)."""

    theta_z: float
    theta_y: float

    def __post_init__(self):
        if not 0.0 <= self.theta_z < TWO_PI:
            raise ValueError(f"theta_z {self.theta_z} outside [0, 2*pi)")
        if not -math.pi / 2 < self.theta_y < math.pi / 2:
            raise ValueError(f"theta_y {self.theta_y} outside (-pi/2, pi/2)")


@dataclass(frozen=True)
class ActuationGeometry:
    """Relative actuator placement (d, alpha, beta) plus desired capsule axis."""

    d: float
    alpha: float
    beta: float
    omega_dc: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "omega_dc", as_unit(self.omega_dc))
        if self.d <= 0.0:
            raise ValueError("actuator-capsule distance d must be > 0")
        if abs(self.alpha) >= math.pi / 2:
            raise ValueError("|alpha| must be < pi/2")


@dataclass(frozen=True)
class ActuationMode:
    """One of DMA (static), CRMA (continuous spin), RRMA (reciprocating)."""

    kind: str
    theta_ar: float = 0.0

    def __post_init__(self):
        if self.kind not in ("DMA", "CRMA", "RRMA"):
            raise ValueError(f"unknown actuation mode {self.kind!r}")
        if self.kind == "RRMA" and not 0.0 < self.theta_ar <= math.pi / 2:
            raise ValueError("RRMA reciprocation angle must be in (0, pi/2]")

    @classmethod
    def dma(cls):
        return cls("DMA")

    @classmethod
    def crma(cls):
        return cls("CRMA")

    @classmethod
    def rrma(cls, theta_ar):
        return cls("RRMA", theta_ar)


@dataclass(frozen=True)
class ActuatorCommand:
    """Actuator pose and spin state at one instant."""

    position: np.ndarray
    rotation_axis: np.ndarray
    theta_ax: float
    spin_rate: float  # signed rad/s; 0 for DMA

    def __post_init__(self):
        object.__setattr__(self, "position", as_vector(self.position))
        object.__setattr__(self, "rotation_axis", as_unit(self.rotation_axis))


@dataclass(frozen=True)
class ForceDecomposition:
    """Force split into propulsive / lateral / remainder vectors plus the
    signed scalar components used by the friction model."""

    propulsive: np.ndarray
    lateral: np.ndarray
    remainder: np.ndarray
    f_p_signed: float
    f_l_signed: float

    @property
    def total(self):
        return self.propulsive + self.lateral + self.remainder


def unit_vector_from_axis_angles(angles):
    """Rot_z(theta_z) Rot_y(-theta_y) applied to +x."""
    return rot_z(angles.theta_z) @ rot_y(-angles.theta_y) @ _EX


def axis_angles_from_unit_vector(w):
    """Inverse of unit_vector_from_axis_angles; quadrant-aware in theta_z."""
    w = as_unit(w)
    if abs(w[2]) >= 1.0 - 1e-9:
        raise DegenerateOrientationError(
            "vector at a pole: theta_z is undefined")
    theta_z = math.atan2(w[1], w[0]) % TWO_PI
    theta_y = math.asin(w[2])
    return AxisAngles(theta_z, theta_y)


def actuator_rotation_axis(r_hat, omega_dc):
    """Spin axis generating a rotating field about omega_dc at the capsule:
    unit((3 r r^T - I) omega_dc)."""
    r_hat = as_unit(r_hat)
    omega_dc = as_unit(omega_dc)
    v = 3.0 * r_hat * (r_hat @ omega_dc) - omega_dc
    n = np.linalg.norm(v)
    if n < 1e-9:
        raise DegenerateGeometryError(
            "(3 r r^T - I) annihilates omega_dc; rotation axis undefined")
    return v / n


def relative_capsule_position(geometry):
    """r = p_c - p_a for the given placement (Rot chain applied to -z)."""
    ang = axis_angles_from_unit_vector(geometry.omega_dc)
    chain = (rot_z(ang.theta_z) @ rot_y(-ang.theta_y)
             @ rot_x(geometry.beta) @ rot_y(geometry.alpha))
    return geometry.d * (chain @ (-_EZ))


def actuator_position(p_c, geometry):
    """Actuator placement p_a = p_c - r."""
    return as_vector(p_c) - relative_capsule_position(geometry)


def actuator_moment_direction(axis_angles, theta_ax):
    """Actuator moment after spinning theta_ax about its rotation axis."""
    return (rot_z(axis_angles.theta_z) @ rot_y(-axis_angles.theta_y)
            @ rot_x(theta_ax) @ _EZ)


def capsule_moment_direction(b_c, omega_c, previous=None):
    """Capsule moment: the field projected onto the plane normal to the
    capsule spin axis.  When the field is (near-)parallel to the axis the
    direction is undefined; ``previous`` is returned if supplied."""
    b_c = as_vector(b_c)
    omega_c = as_unit(omega_c)
    perp = b_c - (b_c @ omega_c) * omega_c
    n = np.linalg.norm(perp)
    if n <= 1e-9 * np.linalg.norm(b_c):
        if previous is not None:
            return previous
        raise DegenerateFieldError(
            "field parallel to capsule axis; moment direction undefined")
    return perp / n


def plane_u_normal(omega_dc, r):
    """Unit normal of plane U (actuator, capsule, and the actuator's
    projection H onto the capsule-axis line), right-handed:
    n = unit(omega_dc x (p_a - H)) with r = p_c - p_a."""
    omega_dc = as_unit(omega_dc)
    r = as_vector(r)
    pa_minus_h = -(r - (r @ omega_dc) * omega_dc)
    n = np.linalg.norm(pa_minus_h)
    if n < 1e-12 * max(np.linalg.norm(r), 1.0):
        raise DegenerateGeometryError(
            "actuator on the capsule-axis line; plane U undefined")
    return unit(np.cross(omega_dc, pa_minus_h / n))


def decompose_force_at(f, omega_dc, r):
    """Decompose a force against a heading and an actual relative position."""
    f = as_vector(f)
    omega_dc = as_unit(omega_dc)
    n_u = plane_u_normal(omega_dc, r)
    fp = float(f @ omega_dc)
    fl = float(f @ n_u)
    propulsive = fp * omega_dc
    lateral = fl * n_u
    return ForceDecomposition(propulsive, lateral, f - propulsive - lateral,
                              fp, fl)


def decompose_force(f, geometry):
    """Decompose against the nominal placement of ``geometry``."""
    return decompose_force_at(f, geometry.omega_dc,
                              relative_capsule_position(geometry))


def spin_phase(mode, t, rate):
    """Actuator spin phase theta_ax and sweep sign at time t.

    CRMA: continuous rotation.  RRMA: constant-speed triangle wave centered
    at pi with half-amplitude theta_ar, starting at the center sweeping
    positive.  DMA: held at pi, sign 0.
    """
    if mode.kind == "DMA":
        return math.pi, 0
    if rate <= 0.0:
        raise ValueError("spin rate must be > 0")
    if mode.kind == "CRMA":
        return (rate * t) % TWO_PI, 1
    # RRMA
    a = mode.theta_ar
    c = (rate * t) % (4.0 * a)
    if c < a:
        return math.pi + c, 1
    if c < 3.0 * a:
        return math.pi + (2.0 * a - c), -1
    return math.pi - (4.0 * a - c), 1


def force_at_phase(geometry, ma_mag, mc_mag, theta_ax, omega_c=None,
                   prev_mc_hat=None, mc_hat=None):
    """Force on the capsule at one actuator spin phase, for the nominal
    placement.  Returns (force, decomposition, capsule moment direction).

    By default the capsule moment re-tracks the projected field at each
    phase; pass ``mc_hat`` to pin it (wall-contact friction regime).
    """
    omega_c = geometry.omega_dc if omega_c is None else as_unit(omega_c)
    r = relative_capsule_position(geometry)
    axis = actuator_rotation_axis(r / geometry.d, geometry.omega_dc)
    ma_hat = actuator_moment_direction(axis_angles_from_unit_vector(axis),
                                       theta_ax)
    if mc_hat is None:
        b_c = dipole_field(r, ma_mag, ma_hat)
        mc_hat = capsule_moment_direction(b_c, omega_c, previous=prev_mc_hat)
    f = dipole_force(r, ma_mag, ma_hat, mc_mag, mc_hat)
    return f, decompose_force_at(f, geometry.omega_dc, r), mc_hat


def pinned_capsule_moment(geometry, ma_mag, omega_c=None):
    """Capsule moment direction settled at the reciprocation center
    (theta_ax = pi).  Wall friction keeps a contacting capsule from
    re-aligning with the field within a sweep, so the contact analysis
    holds this direction over the whole cycle."""
    omega_c = geometry.omega_dc if omega_c is None else as_unit(omega_c)
    r = relative_capsule_position(geometry)
    axis = actuator_rotation_axis(r / geometry.d, geometry.omega_dc)
    ma_hat = actuator_moment_direction(axis_angles_from_unit_vector(axis),
                                       math.pi)
    return capsule_moment_direction(dipole_field(r, ma_mag, ma_hat), omega_c)


def force_profile(geometry, ma_mag, mc_mag, omega_c=None, n_samples=360):
    """Sweep theta_ax over one revolution; list of (theta_ax, decomposition)."""
    if n_samples < 8:
        raise ValueError("need at least 8 samples per revolution")
    out = []
    for theta_ax in np.linspace(0.0, TWO_PI, n_samples, endpoint=False):
        _, dec, _ = force_at_phase(geometry, ma_mag, mc_mag, float(theta_ax),
                                   omega_c=omega_c)
        out.append((float(theta_ax), dec))
    return out


def approximation_error(geometry, mode, ma_mag=1.0, mc_mag=1.0,
                        n_samples=2001):
    """Worst relative deviation of the force over the reciprocation range
    from its value at the range center (theta_ax = pi)."""
    if mode.kind != "RRMA":
        raise ValueError("approximation error is defined for RRMA only")
    f_center, _, _ = force_at_phase(geometry, ma_mag, mc_mag, math.pi)
    norm_center = np.linalg.norm(f_center)
    if norm_center == 0.0:
        raise DegenerateGeometryError("zero force at the reciprocation center")
    worst = 0.0
    for theta_ax in np.linspace(math.pi - mode.theta_ar,
                                math.pi + mode.theta_ar, n_samples):
        f, _, _ = force_at_phase(geometry, ma_mag, mc_mag, float(theta_ax))
        worst = max(worst, np.linalg.norm(f - f_center) / norm_center)
    return worst
