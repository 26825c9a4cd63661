"""Quasi-static closed-loop propulsion simulation in a tubular environment.

The capsule advances along a piecewise-linear centerline when the
propulsive magnetic force beats Coulomb friction plus a constant hoop
resistance at the advancing front.  Spinning contact twists the wall;
accumulated twist beyond a threshold is flagged as a volvulus event.
Friction and viscous constants are calibrated surrogates (see README);
the reproducible object is the DMA / CRMA / RRMA trend, not the newtons.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .actuation import (ActuationGeometry, ActuatorCommand,
                        actuator_moment_direction, actuator_position,
                        actuator_rotation_axis, axis_angles_from_unit_vector,
                        capsule_moment_direction, decompose_force_at,
                        relative_capsule_position, spin_phase)
from .errors import ConfigError, DegenerateOrientationError, StaleHeadingError
from .magnetics import DipoleSource, as_unit, dipole_field, dipole_force, unit
from .sensing import (DEFAULT_NOISE_SIGMA_T, PoseEstimate, SensorArray,
                      estimate_heading, localize_capsule, simulate_reading,
                      subtract_actuator)

CAPSULE_RADIUS_M = 0.008  # 16 mm diameter capsule
DEFAULT_TUBE_LENGTH_M = 0.155

# calibrated defaults: DMA stalls, RRMA advances at a few mm/s, CRMA
# accumulates twist near the volvulus threshold over one tube traversal
DEFAULT_MU_STATIC = 0.8
DEFAULT_MU_KINETIC = 0.35
DEFAULT_ROTATION_FRICTION_FACTOR = 0.025
DEFAULT_HOOP_RESISTANCE_N = 0.002
DEFAULT_GRAVITY_LOAD_N = 0.005
DEFAULT_VISCOUS_COEFFICIENT = 2.0  # N*s/m
DEFAULT_TWIST_COMPLIANCE = 162.0  # rad/(N*s)
DEFAULT_VOLVULUS_THRESHOLD_RAD = 2.0 * math.pi


@dataclass(frozen=True)
class TubeEnvironment:
    """Tube geometry plus friction/twist parameters."""

    centerline: np.ndarray  # (M, 3) waypoints, piecewise linear
    inner_radius: float
    mu_static: float = DEFAULT_MU_STATIC
    mu_kinetic: float = DEFAULT_MU_KINETIC
    rotation_friction_factor: float = DEFAULT_ROTATION_FRICTION_FACTOR
    hoop_resistance: float = DEFAULT_HOOP_RESISTANCE_N
    twist_compliance: float = DEFAULT_TWIST_COMPLIANCE
    volvulus_threshold: float = DEFAULT_VOLVULUS_THRESHOLD_RAD
    gravity_load: float = DEFAULT_GRAVITY_LOAD_N
    viscous_coefficient: float = DEFAULT_VISCOUS_COEFFICIENT

    def __post_init__(self):
        pts = np.asarray(self.centerline, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 3:
            raise ConfigError("centerline needs at least 2 xyz waypoints")
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        if np.any(seg <= 0.0):
            raise ConfigError("centerline waypoints must be distinct")
        if self.inner_radius <= CAPSULE_RADIUS_M:
            raise ConfigError("inner radius must exceed the capsule radius")
        if not 0.0 < self.mu_kinetic <= self.mu_static:
            raise ConfigError("need 0 < mu_kinetic <= mu_static")
        if not 0.0 < self.rotation_friction_factor <= 1.0:
            raise ConfigError("rotation friction factor must be in (0, 1]")
        if self.volvulus_threshold <= 0.0:
            raise ConfigError("volvulus threshold must be > 0")
        if self.viscous_coefficient <= 0.0:
            raise ConfigError("viscous coefficient must be > 0")
        object.__setattr__(self, "centerline", pts)
        object.__setattr__(self, "_cumlen",
                           np.concatenate([[0.0], np.cumsum(seg)]))

    @property
    def length(self):
        return float(self._cumlen[-1])

    def _segment(self, s):
        s = min(max(s, 0.0), self.length)
        i = int(np.searchsorted(self._cumlen, s, side="right")) - 1
        i = min(max(i, 0), len(self.centerline) - 2)
        return i, s - self._cumlen[i]

    def point_at(self, s):
        i, ds = self._segment(s)
        t = self.tangent_at(s)
        return self.centerline[i] + ds * t

    def tangent_at(self, s):
        i, _ = self._segment(s)
        return unit(self.centerline[i + 1] - self.centerline[i])


def default_environment():
    """Straight 155 mm tube above the sensor-array center."""
    start = np.array([0.13, 0.27, 0.12])
    end = start + np.array([DEFAULT_TUBE_LENGTH_M, 0.0, 0.0])
    return TubeEnvironment(np.array([start, end]), inner_radius=0.009)


_ENV_KEYS = {
    "centerline": "centerline",
    "inner_radius_m": "inner_radius",
    "mu_static": "mu_static",
    "mu_kinetic": "mu_kinetic",
    "rotation_friction_factor": "rotation_friction_factor",
    "hoop_resistance_n": "hoop_resistance",
    "twist_compliance": "twist_compliance",
    "volvulus_threshold_rad": "volvulus_threshold",
    "gravity_load_n": "gravity_load",
    "viscous_coefficient": "viscous_coefficient",
}


def load_environment(path):
    """Read a tube environment from a JSON file (keys per _ENV_KEYS)."""
    with open(path) as fh:
        raw = json.load(fh)
    unknown = set(raw) - set(_ENV_KEYS)
    if unknown:
        raise ConfigError(f"unknown environment keys: {sorted(unknown)}")
    kwargs = {_ENV_KEYS[k]: v for k, v in raw.items()}
    if "centerline" not in kwargs or "inner_radius" not in kwargs:
        raise ConfigError("environment file needs centerline and "
                          "inner_radius_m")
    kwargs["centerline"] = np.asarray(kwargs["centerline"], dtype=float)
    return TubeEnvironment(**kwargs)


def save_environment(path, env):
    raw = {k: getattr(env, v) for k, v in _ENV_KEYS.items()}
    raw["centerline"] = env.centerline.tolist()
    with open(path, "w") as fh:
        json.dump(raw, fh, indent=2)


@dataclass(frozen=True)
class SimState:
    """Capsule state along the tube."""

    arc_length: float
    heading: np.ndarray
    twist: float = 0.0
    time: float = 0.0
    stalled_steps: int = 0
    volvulus: bool = False
    moving: bool = False

    def __post_init__(self):
        object.__setattr__(self, "heading", as_unit(self.heading))


@dataclass(frozen=True)
class StepDiagnostics:
    theta_ax: float
    f_p: float
    f_l_signed: float
    f_r: float
    speed: float
    mc_hat: np.ndarray


@dataclass(frozen=True)
class SimResult:
    success: bool
    avg_speed: float
    time_elapsed: float
    failure_reason: str  # none | stall | volvulus | timeout
    twist_trace: np.ndarray  # (K,) rad
    trajectory: np.ndarray  # (K, 8): t, arc, twist, theta_ax, f_p, f_l, f_r, speed
    final_state: SimState


def step(state, env, command, ma_mag, mc_mag, dt, prev_mc_hat=None):
    """Advance one quasi-static step under an actuator command."""
    new_state, _ = step_with_diagnostics(state, env, command, ma_mag, mc_mag,
                                         dt, prev_mc_hat)
    return new_state


def step_with_diagnostics(state, env, command, ma_mag, mc_mag, dt,
                          prev_mc_hat=None):
    if not 1e-4 < dt <= 0.1:
        raise ConfigError(f"dt {dt} outside (1e-4, 0.1] s")
    p_c = env.point_at(state.arc_length)
    tangent = env.tangent_at(state.arc_length)
    r = p_c - command.position

    ma_hat = actuator_moment_direction(
        axis_angles_from_unit_vector(command.rotation_axis), command.theta_ax)
    b_c = dipole_field(r, ma_mag, ma_hat)
    mc_hat = capsule_moment_direction(b_c, state.heading,
                                      previous=prev_mc_hat)
    f = dipole_force(r, ma_mag, ma_hat, mc_mag, mc_hat)
    dec = decompose_force_at(f, tangent, r)

    spinning = command.spin_rate != 0.0
    spin_sign = 0 if not spinning else (1 if command.spin_rate > 0 else -1)
    # everything not pushing along the tube presses the capsule into the
    # wall: lateral force plus the attraction toward the actuator
    f_perp = float(np.linalg.norm(f - dec.f_p_signed * tangent))
    normal_load = f_perp + env.gravity_load
    if spinning:
        # rotating contact is already sliding: kinetic friction, further
        # reduced because the spin stretches the lumen open
        mu = env.mu_kinetic * env.rotation_friction_factor
    elif state.moving:
        mu = env.mu_kinetic
    else:
        mu = env.mu_static
    resistance = mu * normal_load + env.hoop_resistance

    f_p = dec.f_p_signed
    if f_p > resistance:
        speed = (f_p - resistance) / env.viscous_coefficient
        arc = min(state.arc_length + speed * dt, env.length)
        stalled = 0
        moving = True
    else:
        speed = 0.0
        arc = state.arc_length
        stalled = state.stalled_steps + 1
        moving = False

    wall_friction = spin_sign * mu * normal_load
    twist = state.twist + env.twist_compliance * wall_friction * dt
    volvulus = state.volvulus or abs(twist) >= env.volvulus_threshold

    new_state = SimState(arc, env.tangent_at(arc), twist, state.time + dt,
                         stalled, volvulus, moving)
    diag = StepDiagnostics(command.theta_ax, f_p, dec.f_l_signed,
                           float(np.linalg.norm(dec.remainder)), speed,
                           mc_hat)
    return new_state, diag


def closed_loop_update(estimate, geometry, mode, t, rate=2.0 * math.pi):
    """Actuator command for the current pose estimate: heading becomes the
    desired capsule axis, the relative placement (d, alpha, beta) is kept."""
    geom = ActuationGeometry(geometry.d, geometry.alpha, geometry.beta,
                             estimate.heading)
    p_a = actuator_position(estimate.position, geom)
    r = relative_capsule_position(geom)
    axis = actuator_rotation_axis(r / geom.d, geom.omega_dc)
    theta_ax, sign = spin_phase(mode, t, rate)
    return ActuatorCommand(p_a, axis, theta_ax, sign * rate)


@dataclass(frozen=True)
class PropulsionConfig:
    """Closed-loop run settings."""

    dt: float = 0.02
    time_budget_s: float = 240.0
    stall_limit: int = 500
    spin_rate: float = 2.0 * math.pi  # 360 deg/s
    d: float = 0.15
    alpha: float = math.radians(10.0)
    beta: float = 0.0
    ma_mag: float = 68.75  # 50 mm N42 sphere
    mc_mag: float = 0.97855  # 12.8/9/15 mm N38SH ring
    use_localizer: bool = True
    noise_sigma: float = DEFAULT_NOISE_SIGMA_T
    heading_window: int = 200
    heading_smoothing: float = 0.05  # EMA factor for the heading history
    heading_gain: float = 0.2  # blend factor for fresh tangent fits

    def __post_init__(self):
        if not 1e-4 < self.dt <= 0.1:
            raise ConfigError(f"dt {self.dt} outside (1e-4, 0.1] s")
        if self.time_budget_s <= 0 or self.stall_limit < 1:
            raise ConfigError("invalid time budget or stall limit")
        if self.spin_rate <= 0 or self.d <= 0:
            raise ConfigError("spin rate and d must be > 0")
        if self.noise_sigma < 0:
            raise ConfigError("noise sigma must be >= 0")


def run_propulsion(env, mode, config=None, rng_seed=0):
    """Closed-loop automatic propulsion through the tube.

    Iterates sense -> localize -> estimate heading -> update actuator ->
    quasi-static step until the tube end, a volvulus event, a stall streak,
    or the time budget.  Deterministic for a given seed.
    """
    config = config or PropulsionConfig()
    geometry = ActuationGeometry(config.d, config.alpha, config.beta,
                                 env.tangent_at(0.0))
    rng = np.random.default_rng(rng_seed)
    array = SensorArray.default(noise_sigma=config.noise_sigma)

    state = SimState(0.0, env.tangent_at(0.0))
    p0 = env.point_at(0.0)
    estimate = PoseEstimate(p0, _perpendicular_to(state.heading),
                            state.heading)
    command = closed_loop_update(estimate, geometry, mode, 0.0,
                                 config.spin_rate)
    # the capsule moment starts settled on the initial command's field
    mc_hat = capsule_moment_direction(
        dipole_field(p0 - command.position, config.ma_mag,
                     actuator_moment_direction(
                         axis_angles_from_unit_vector(command.rotation_axis),
                         command.theta_ax)),
        state.heading)
    estimate = PoseEstimate(p0, mc_hat, state.heading)
    # heading history uses EMA-smoothed positions: raw estimates are too
    # noisy for tangent fitting at mm-scale per-step travel
    smoothed = estimate.position.copy()
    history = [(0.0, smoothed)]

    rows = []
    failure = "timeout"
    while state.time < config.time_budget_s:
        p_true = env.point_at(state.arc_length)
        if config.use_localizer:
            capsule = DipoleSource(p_true, config.mc_mag, mc_hat)
            ma_hat = actuator_moment_direction(
                axis_angles_from_unit_vector(command.rotation_axis),
                command.theta_ax)
            actuator = DipoleSource(command.position, config.ma_mag, ma_hat)
            reading = simulate_reading(array, capsule, actuator,
                                       rng_seed=rng, timestamp=state.time)
            reading = subtract_actuator(reading, array, actuator)
            fitted = localize_capsule(reading, array, config.mc_mag,
                                      estimate)
            # per-step travel is sub-mm, so a large jump means the fit
            # left the tracking regime: hold the previous estimate
            jump = float(np.linalg.norm(fitted.position - estimate.position))
            if fitted.converged and jump < 0.05:
                estimate = fitted
            smoothed = smoothed + config.heading_smoothing \
                * (estimate.position - smoothed)
            history.append((state.time, smoothed))
            if len(history) > 4 * config.heading_window:
                del history[:len(history) - 2 * config.heading_window]
            try:
                fit = estimate_heading(history, config.heading_window)
                # the end tangent is noisy; fall back to the window's net
                # displacement direction when the fit strays from it
                pts = [p for _, p in history[-config.heading_window:]]
                chord = unit(pts[-1] - pts[0])
                if fit @ chord < math.cos(math.radians(20.0)):
                    fit = chord
                # low-pass: one bad tangent fit must not yank the actuator
                heading = unit(estimate.heading
                               + config.heading_gain
                               * (fit - estimate.heading))
            except StaleHeadingError:
                heading = estimate.heading
            estimate = PoseEstimate(estimate.position,
                                    estimate.moment_direction, heading,
                                    estimate.residual_rms, estimate.converged)
        else:
            estimate = PoseEstimate(p_true, mc_hat, state.heading)

        try:
            command = closed_loop_update(estimate, geometry, mode,
                                         state.time, config.spin_rate)
        except DegenerateOrientationError:
            pass  # hold the previous command for this step

        state, diag = step_with_diagnostics(state, env, command,
                                            config.ma_mag, config.mc_mag,
                                            config.dt, prev_mc_hat=mc_hat)
        mc_hat = diag.mc_hat
        rows.append([state.time, state.arc_length, state.twist,
                     diag.theta_ax, diag.f_p, diag.f_l_signed, diag.f_r,
                     diag.speed])

        if state.volvulus:
            failure = "volvulus"
            break
        if state.arc_length >= env.length:
            failure = "none"
            break
        if state.stalled_steps >= config.stall_limit:
            failure = "stall"
            break

    trajectory = np.array(rows) if rows else np.zeros((0, 8))
    success = failure == "none"
    avg_speed = state.arc_length / state.time if state.time > 0 else 0.0
    return SimResult(success, avg_speed, state.time, failure,
                     trajectory[:, 2] if rows else np.zeros(0),
                     trajectory, state)


def _perpendicular_to(heading):
    """The capsule moment's rest direction: vertical projected off axis."""
    for ref in (np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0])):
        perp = ref - (ref @ heading) * heading
        if np.linalg.norm(perp) > 1e-6:
            return unit(perp)
    raise ValueError("unreachable: heading cannot shadow two axes")
