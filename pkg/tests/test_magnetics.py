import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magcap.errors import DipoleSingularityError
from magcap.magnetics import (MU0, MagnetSpec, DipoleSource, dipole_field,
                              dipole_field_jacobian, dipole_force,
                              dipole_torque, moment_magnitude_from_spec,
                              unit)

EZ = np.array([0.0, 0.0, 1.0])
EX = np.array([1.0, 0.0, 0.0])

# frozen reference point used across the module tests
R_REF = np.array([0.026, 0.0, -0.147])


def random_unit(rng):
    return unit(rng.normal(size=3))


def test_field_frozen_value():
    b = dipole_field(R_REF, 145.0, EZ)
    np.testing.assert_allclose(
        b, [-0.002242582060085, 0.0, 0.008320593581036], atol=1e-15)


def test_field_matches_textbook_formula():
    rng = np.random.default_rng(3)
    for _ in range(50):
        r = rng.normal(size=3) * 0.2
        if np.linalg.norm(r) < 0.02:
            continue
        m_hat = random_unit(rng)
        m = 37.5 * m_hat
        rn = np.linalg.norm(r)
        expected = MU0 / (4 * math.pi) * (3 * r * (m @ r) / rn**5 - m / rn**3)
        np.testing.assert_allclose(dipole_field(r, 37.5, m_hat), expected,
                                   rtol=1e-12)


@given(scale=st.floats(1.5, 8.0), mag=st.floats(0.1, 200.0))
@settings(max_examples=50, deadline=None)
def test_field_scaling_laws(scale, mag):
    b1 = dipole_field(R_REF, mag, EZ)
    # linear in moment magnitude
    np.testing.assert_allclose(dipole_field(R_REF, 2.0 * mag, EZ), 2.0 * b1,
                               rtol=1e-12)
    # inverse cube in distance
    np.testing.assert_allclose(dipole_field(scale * R_REF, mag, EZ),
                               b1 / scale**3, rtol=1e-11)


def test_jacobian_frozen_value():
    j = dipole_field_jacobian(R_REF, 145.0, EZ)
    np.testing.assert_allclose(
        j, [[-0.073171008173687, 0.0, -0.058708791787567],
            [0.0, -0.086253156157134, 0.0],
            [-0.058708791787567, 0.0, 0.159424164330821]], atol=1e-14)


def test_jacobian_symmetric_traceless_and_matches_differences():
    rng = np.random.default_rng(7)
    h = 1e-6
    for _ in range(25):
        r = rng.normal(size=3) * 0.3
        if np.linalg.norm(r) < 0.05:
            continue
        m_hat = random_unit(rng)
        j = dipole_field_jacobian(r, 12.0, m_hat)
        np.testing.assert_allclose(j, j.T, atol=1e-12 * np.abs(j).max())
        assert abs(np.trace(j)) < 1e-12 * np.abs(j).max()
        fd = np.empty((3, 3))
        for k in range(3):
            e = np.zeros(3)
            e[k] = h
            fd[:, k] = (dipole_field(r + e, 12.0, m_hat)
                        - dipole_field(r - e, 12.0, m_hat)) / (2 * h)
        np.testing.assert_allclose(j, fd, rtol=2e-7, atol=1e-12)


def test_force_frozen_value():
    f = dipole_force(R_REF, 145.0, EZ, 0.97855, EX)
    np.testing.assert_allclose(
        f, [-0.071601490048361, 0.0, -0.057449488203723], atol=1e-14)


def test_force_is_gradient_of_alignment_energy():
    rng = np.random.default_rng(11)
    h = 1e-6
    for _ in range(25):
        r = rng.normal(size=3) * 0.3
        if np.linalg.norm(r) < 0.05:
            continue
        ma_hat, mc_hat = random_unit(rng), random_unit(rng)
        f = dipole_force(r, 50.0, ma_hat, 0.9, mc_hat)
        mc = 0.9 * mc_hat
        fd = np.empty(3)
        for k in range(3):
            e = np.zeros(3)
            e[k] = h
            fd[k] = (mc @ dipole_field(r + e, 50.0, ma_hat)
                     - mc @ dipole_field(r - e, 50.0, ma_hat)) / (2 * h)
        np.testing.assert_allclose(f, fd, rtol=2e-6)


def test_force_obeys_reciprocity():
    rng = np.random.default_rng(13)
    for _ in range(20):
        r = rng.normal(size=3) * 0.25
        if np.linalg.norm(r) < 0.05:
            continue
        ma_hat, mc_hat = random_unit(rng), random_unit(rng)
        f_on_c = dipole_force(r, 40.0, ma_hat, 1.5, mc_hat)
        f_on_a = dipole_force(-r, 1.5, mc_hat, 40.0, ma_hat)
        np.testing.assert_allclose(f_on_c, -f_on_a, rtol=1e-12)


def test_torque_is_moment_cross_field():
    t = dipole_torque(R_REF, 145.0, EZ, 0.97855, EX)
    b = dipole_field(R_REF, 145.0, EZ)
    np.testing.assert_allclose(t, np.cross(0.97855 * EX, b), rtol=1e-12)
    np.testing.assert_allclose(t, [0.0, -0.008142116848723, 0.0], atol=1e-14)


def test_rejects_near_singular_separation():
    with pytest.raises(DipoleSingularityError):
        dipole_field([5e-4, 0.0, 0.0], 1.0, EZ)
    with pytest.raises(DipoleSingularityError):
        dipole_force([0.0, 0.0, 9e-4], 1.0, EZ, 1.0, EX)


def test_magnet_moments_from_specs():
    sphere = MagnetSpec("sphere", remanence_t=1.32, diameter_m=0.05)
    assert moment_magnitude_from_spec(sphere) == pytest.approx(68.75)
    ring = MagnetSpec("ring", remanence_t=1.26, outer_diameter_m=0.0128,
                      inner_diameter_m=0.009, length_m=0.015)
    assert moment_magnitude_from_spec(ring) == pytest.approx(0.9785475)


def test_magnet_spec_validation():
    with pytest.raises(ValueError):
        MagnetSpec("sphere", remanence_t=2.5, diameter_m=0.05)
    with pytest.raises(ValueError):
        MagnetSpec("sphere", remanence_t=1.3, diameter_m=0.0)
    with pytest.raises(ValueError):
        MagnetSpec("ring", remanence_t=1.3, outer_diameter_m=0.009,
                   inner_diameter_m=0.0128, length_m=0.015)
    with pytest.raises(ValueError):
        MagnetSpec("cube", remanence_t=1.3)


def test_dipole_source_validation():
    with pytest.raises(ValueError):
        DipoleSource(np.zeros(3), -1.0, EZ)
    with pytest.raises(ValueError):
        DipoleSource(np.zeros(3), 1.0, [1.0, 1.0, 0.0])
