"""Simulated magnetometer array and capsule localization.

An 8x10 grid of three-axis sensors on the z = 0 plane measures the
superposed actuator and capsule dipole fields.  The capsule pose (position
plus moment direction, 5 parameters; the axial roll is unobservable) is
recovered by damped least squares with analytic Jacobians, and the heading
is estimated from the recent position history with a cubic Bezier fit.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import DipoleSingularityError, StaleHeadingError
from .magnetics import as_unit, as_vector, unit

GRID_SHAPE = (8, 10)
GRID_SPACING_M = 0.06
DEFAULT_SAMPLE_RATE_HZ = 100.0

# per-axis sensor noise calibrated so the simulated localization accuracy
# lands at a few millimeters RMS over the workspace (see README)
DEFAULT_NOISE_SIGMA_T = 2e-6

MIN_SOURCE_CLEARANCE_M = 0.01


@dataclass(frozen=True)
class SensorArray:
    """Planar grid of three-axis magnetometers."""

    positions: np.ndarray  # (N, 3)
    noise_sigma: float = DEFAULT_NOISE_SIGMA_T
    sample_rate: float = DEFAULT_SAMPLE_RATE_HZ

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValueError("positions must be (N, 3)")
        if self.noise_sigma < 0.0:
            raise ValueError("noise sigma must be >= 0")
        object.__setattr__(self, "positions", pos)

    @classmethod
    def default(cls, noise_sigma=DEFAULT_NOISE_SIGMA_T):
        nx, ny = GRID_SHAPE
        xs, ys = np.meshgrid(np.arange(nx) * GRID_SPACING_M,
                             np.arange(ny) * GRID_SPACING_M, indexing="ij")
        pos = np.column_stack([xs.ravel(), ys.ravel(), np.zeros(nx * ny)])
        return cls(pos, noise_sigma)


@dataclass(frozen=True)
class FieldReading:
    """Per-sensor field vectors (T) at one instant."""

    fields: np.ndarray  # (N, 3)
    timestamp: float = 0.0

    def __post_init__(self):
        f = np.asarray(self.fields, dtype=float)
        if f.ndim != 2 or f.shape[1] != 3 or not np.all(np.isfinite(f)):
            raise ValueError("fields must be a finite (N, 3) array")
        object.__setattr__(self, "fields", f)


@dataclass(frozen=True)
class PoseEstimate:
    """Capsule pose estimate: position, moment direction, heading."""

    position: np.ndarray
    moment_direction: np.ndarray
    heading: np.ndarray
    residual_rms: float = 0.0
    converged: bool = False

    def __post_init__(self):
        object.__setattr__(self, "position", as_vector(self.position))
        object.__setattr__(self, "moment_direction",
                           as_unit(self.moment_direction))
        object.__setattr__(self, "heading", as_unit(self.heading))
        if self.residual_rms < 0.0:
            raise ValueError("residual rms must be >= 0")


def _source_fields(array, source):
    rs = array.positions - source.position
    d = np.linalg.norm(rs, axis=1)
    if np.any(d < MIN_SOURCE_CLEARANCE_M):
        raise DipoleSingularityError(
            f"dipole source within {MIN_SOURCE_CLEARANCE_M} m of a sensor")
    return backend.field_batch(rs, source.moment_magnitude,
                               source.moment_direction)


def simulate_reading(array, capsule, actuator=None, background=None,
                     rng_seed=0, timestamp=0.0):
    """Forward model: capsule + actuator dipole fields + background +
    per-axis Gaussian noise.  Deterministic for a given seed."""
    fields = _source_fields(array, capsule)
    if actuator is not None:
        fields = fields + _source_fields(array, actuator)
    if background is not None:
        fields = fields + as_vector(background)
    if array.noise_sigma > 0.0:
        rng = np.random.default_rng(rng_seed)
        fields = fields + rng.normal(0.0, array.noise_sigma, fields.shape)
    return FieldReading(fields, timestamp)


def subtract_actuator(reading, array, actuator=None, background=None):
    """Remove the modeled actuator field and constant background."""
    fields = reading.fields
    if actuator is not None:
        fields = fields - _source_fields(array, actuator)
    if background is not None:
        fields = fields - as_vector(background)
    return FieldReading(fields, reading.timestamp)


def _tangent_basis(m_hat):
    """Two unit vectors spanning the plane normal to m_hat."""
    ref = np.array([0.0, 0.0, 1.0])
    if abs(m_hat[2]) > 0.9:
        ref = np.array([1.0, 0.0, 0.0])
    e1 = unit(np.cross(m_hat, ref))
    e2 = np.cross(m_hat, e1)
    return e1, e2


def localize_capsule(reading, array, moment_magnitude, initial_guess,
                     max_iterations=100, gradient_tol=1e-12, step_tol=1e-10):
    """Fit capsule position and moment direction to a reading.

    Damped (Levenberg-style) least squares over 5 parameters: 3 position
    components plus 2 tangent-plane coordinates of the moment direction,
    with analytic field Jacobians.  The heading is carried through from
    the initial guess; it is not observable from a single reading.
    """
    p = initial_guess.position.copy()
    m_hat = initial_guess.moment_direction.copy()
    n = array.positions.shape[0]

    def residuals(p, m_hat):
        rs = array.positions - p
        pred = backend.field_batch(rs, moment_magnitude, m_hat)
        return (pred - reading.fields).ravel()

    res = residuals(p, m_hat)
    cost = float(res @ res)
    lam = 1e-3
    converged = False
    for _ in range(max_iterations):
        rs = array.positions - p
        # d(pred)/d(capsule position) = -dB/dr at each sensor
        jac_r = -backend.field_jacobian_batch(rs, moment_magnitude, m_hat)
        e1, e2 = _tangent_basis(m_hat)
        jac_m1 = backend.field_batch(rs, moment_magnitude, e1)
        jac_m2 = backend.field_batch(rs, moment_magnitude, e2)
        jac = np.empty((3 * n, 5))
        jac[:, :3] = jac_r.reshape(3 * n, 3)
        jac[:, 3] = jac_m1.ravel()
        jac[:, 4] = jac_m2.ravel()

        grad = jac.T @ res
        if np.linalg.norm(grad) < gradient_tol:
            converged = True
            break
        jtj = jac.T @ jac
        step_taken = False
        for _ in range(25):
            try:
                step = np.linalg.solve(jtj + lam * np.diag(np.diag(jtj)),
                                       -grad)
            except np.linalg.LinAlgError as exc:
                raise np.linalg.LinAlgError(
                    "degenerate Jacobian in capsule fit") from exc
            p_new = p + step[:3]
            m_new = unit(m_hat + step[3] * e1 + step[4] * e2)
            res_new = residuals(p_new, m_new)
            cost_new = float(res_new @ res_new)
            if cost_new < cost:
                p, m_hat, res, cost = p_new, m_new, res_new, cost_new
                lam = max(lam / 3.0, 1e-12)
                step_taken = True
                break
            lam *= 10.0
        if not step_taken:
            break
        if np.linalg.norm(step[:3]) < step_tol:
            converged = True
            break

    rms = math.sqrt(cost / res.size)
    return PoseEstimate(p, m_hat, initial_guess.heading, rms, converged)


def estimate_heading(history, window=8):
    """Heading from recent positions: normalized end tangent of a
    least-squares cubic Bezier with chord-length parametrization.

    ``history`` is an ordered list of (t, position).  Raises
    StaleHeadingError when fewer than 4 points are available or the net
    displacement across the points is under 2 mm.
    """
    pts = np.array([as_vector(p) for _, p in history[-window:]])
    if len(pts) < 4:
        raise StaleHeadingError("need at least 4 history points")
    chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    # gate on net displacement: a stationary capsule's noise wander racks
    # up chord length without going anywhere
    span = float(np.linalg.norm(pts[-1] - pts[0]))
    if span < 2e-3:
        raise StaleHeadingError(f"history spans only {span:.2e} m")
    u = np.concatenate([[0.0], np.cumsum(chords)]) / float(chords.sum())
    basis = np.column_stack([(1 - u) ** 3, 3 * u * (1 - u) ** 2,
                             3 * u**2 * (1 - u), u**3])
    ctrl, *_ = np.linalg.lstsq(basis, pts, rcond=None)
    tangent = ctrl[3] - ctrl[2]
    norm = np.linalg.norm(tangent)
    if norm < 1e-12:
        raise StaleHeadingError("degenerate end tangent")
    return tangent / norm


def write_reading_csv(path, reading):
    """Dump a reading as ``t, sensor_index, bx, by, bz`` rows (tesla)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "sensor_index", "bx", "by", "bz"])
        for i, b in enumerate(reading.fields):
            writer.writerow([f"{reading.timestamp:.9g}", i,
                             f"{b[0]:.12e}", f"{b[1]:.12e}", f"{b[2]:.12e}"])


def read_reading_csv(path):
    """Load a reading written by write_reading_csv."""
    rows = []
    t = 0.0
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            t = float(row["t"])
            rows.append((int(row["sensor_index"]),
                         [float(row["bx"]), float(row["by"]),
                          float(row["bz"])]))
    rows.sort(key=lambda r: r[0])
    return FieldReading(np.array([b for _, b in rows]), t)
