import math

import numpy as np
import pytest

from magcap.errors import DipoleSingularityError, StaleHeadingError
from magcap.magnetics import DipoleSource, unit
from magcap.sensing import (GRID_SHAPE, FieldReading, PoseEstimate,
                            SensorArray, estimate_heading, localize_capsule,
                            read_reading_csv, simulate_reading,
                            subtract_actuator, write_reading_csv)

EX = np.array([1.0, 0.0, 0.0])
EZ = np.array([0.0, 0.0, 1.0])


@pytest.fixture(scope="module")
def array():
    return SensorArray.default()


@pytest.fixture(scope="module")
def quiet_array():
    return SensorArray.default(noise_sigma=0.0)


def capsule_at(p, m_hat=EZ):
    return DipoleSource(p, 0.97855, m_hat)


def test_default_array_layout(array):
    assert array.positions.shape == (GRID_SHAPE[0] * GRID_SHAPE[1], 3)
    assert np.all(array.positions[:, 2] == 0.0)


def test_reading_deterministic_per_seed(array):
    cap = capsule_at([0.2, 0.25, 0.12])
    a = simulate_reading(array, cap, rng_seed=4)
    b = simulate_reading(array, cap, rng_seed=4)
    c = simulate_reading(array, cap, rng_seed=5)
    np.testing.assert_array_equal(a.fields, b.fields)
    assert not np.array_equal(a.fields, c.fields)


def test_actuator_subtraction_exact_without_noise(quiet_array):
    cap = capsule_at([0.2, 0.25, 0.12])
    act = DipoleSource([0.22, 0.25, 0.28], 68.75, unit([0.1, 0.0, -1.0]))
    bg = np.array([2e-5, -1e-5, 4e-5])
    both = simulate_reading(quiet_array, cap, act, background=bg)
    only = simulate_reading(quiet_array, cap)
    recovered = subtract_actuator(both, quiet_array, act, background=bg)
    np.testing.assert_allclose(recovered.fields, only.fields, atol=1e-18)


def test_source_clearance_guard(quiet_array):
    with pytest.raises(DipoleSingularityError):
        simulate_reading(quiet_array, capsule_at([0.0, 0.0, 0.005]))


def test_localize_noiseless_is_exact(quiet_array):
    rng = np.random.default_rng(21)
    for _ in range(10):
        p = np.array([0.15, 0.2, 0.1]) + rng.normal(0.0, 0.02, 3)
        m = unit(rng.normal(size=3))
        reading = simulate_reading(quiet_array, capsule_at(p, m))
        guess = PoseEstimate(p + rng.normal(0.0, 3e-3, 3),
                             unit(m + rng.normal(0.0, 0.1, 3)), EX)
        est = localize_capsule(reading, quiet_array, 0.97855, guess)
        assert est.converged
        assert np.linalg.norm(est.position - p) < 1e-4
        assert est.moment_direction @ m > math.cos(math.radians(0.1))
        assert est.residual_rms < 1e-9


def test_localize_noisy_stays_in_tracking_regime(array):
    rng = np.random.default_rng(22)
    errs = []
    for _ in range(25):
        p = np.array([0.2, 0.25, 0.12]) + rng.normal(0.0, 0.02, 3)
        m = unit(rng.normal(size=3))
        reading = simulate_reading(array, capsule_at(p, m), rng_seed=rng)
        guess = PoseEstimate(p + rng.normal(0.0, 2e-3, 3),
                             unit(m + rng.normal(0.0, 0.05, 3)), EX)
        est = localize_capsule(reading, array, 0.97855, guess)
        assert est.converged
        errs.append(np.linalg.norm(est.position - p))
    rms = math.sqrt(float(np.mean(np.square(errs))))
    assert 5e-4 < rms < 0.012


def test_localize_error_grows_with_noise():
    rng = np.random.default_rng(23)
    p = np.array([0.2, 0.25, 0.12])
    m = unit([0.3, -0.2, 0.9])
    rms = []
    for sigma in (5e-7, 2e-6, 8e-6):
        arr = SensorArray.default(noise_sigma=sigma)
        errs = []
        for k in range(20):
            reading = simulate_reading(arr, capsule_at(p, m), rng_seed=rng)
            guess = PoseEstimate(p + rng.normal(0.0, 2e-3, 3), m, EX)
            est = localize_capsule(reading, arr, 0.97855, guess)
            errs.append(np.linalg.norm(est.position - p))
        rms.append(math.sqrt(float(np.mean(np.square(errs)))))
    assert rms[0] < rms[1] < rms[2]


def test_heading_on_straight_track():
    direction = unit([2.0, 1.0, 0.0])
    history = [(0.1 * k, 0.002 * k * direction) for k in range(10)]
    h = estimate_heading(history)
    np.testing.assert_allclose(h, direction, atol=1e-9)


def test_heading_follows_curve_end_tangent():
    # quarter-circle arc in the xy plane, radius 0.05
    ts = np.linspace(0.0, math.pi / 2, 12)
    history = [(float(t), np.array([0.05 * math.sin(t),
                                    0.05 * (1 - math.cos(t)), 0.0]))
               for t in ts]
    h = estimate_heading(history, window=12)
    end_tangent = np.array([math.cos(ts[-1]), math.sin(ts[-1]), 0.0])
    assert h @ end_tangent > math.cos(math.radians(8.0))


def test_heading_requires_enough_points_and_travel():
    with pytest.raises(StaleHeadingError):
        estimate_heading([(0.0, np.zeros(3)), (0.1, np.zeros(3)),
                          (0.2, np.zeros(3))])
    # plenty of points, no net displacement
    wander = [(0.1 * k, np.array([1e-3 * math.sin(2.0 * k),
                                  1e-3 * math.cos(2.0 * k), 0.0]))
              for k in range(16)]
    wander.append((1.7, wander[0][1]))
    with pytest.raises(StaleHeadingError):
        estimate_heading(wander, window=17)


def test_reading_csv_round_trip(tmp_path, quiet_array):
    reading = simulate_reading(quiet_array, capsule_at([0.2, 0.25, 0.12]),
                               timestamp=1.5)
    path = tmp_path / "reading.csv"
    write_reading_csv(path, reading)
    back = read_reading_csv(path)
    assert back.timestamp == reading.timestamp
    np.testing.assert_allclose(back.fields, reading.fields, rtol=1e-11)


def test_field_reading_validation():
    with pytest.raises(ValueError):
        FieldReading(np.full((4, 3), np.nan))
    with pytest.raises(ValueError):
        FieldReading(np.zeros((4, 2)))
