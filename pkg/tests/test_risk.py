import math

import numpy as np
import pytest

from magcap.actuation import ActuationGeometry, ActuationMode
from magcap.risk import (abs_friction_impulse, contact_profile,
                         mean_normal_force, net_twist_per_cycle,
                         recommend_reciprocation_angle)

EX = np.array([1.0, 0.0, 0.0])
THETA_AR_GRID = [math.radians(a) for a in (10, 30, 50, 70, 90)]


@pytest.fixture(scope="module")
def geometry():
    return ActuationGeometry(0.15, math.radians(10.0), 0.0, EX)


def test_rrma_twist_cancels_each_cycle(geometry):
    for theta_ar in THETA_AR_GRID:
        prof = contact_profile(geometry, 68.75, 0.97855,
                               ActuationMode.rrma(theta_ar))
        net = net_twist_per_cycle(prof)
        mass = abs_friction_impulse(prof)
        assert mass > 0.0
        assert abs(net) < 1e-10 * mass, theta_ar


def test_crma_twist_accumulates_one_direction(geometry):
    prof = contact_profile(geometry, 68.75, 0.97855, ActuationMode.crma())
    net = net_twist_per_cycle(prof)
    mass = abs_friction_impulse(prof)
    assert net > 0.05 * mass
    # every sample pushes the same way
    assert all(s.spin_sign == 1 for s in prof.samples)


def test_rrma_cancellation_sample_count_independent(geometry):
    mode = ActuationMode.rrma(math.radians(70.0))
    for n in (64, 250, 1024):
        prof = contact_profile(geometry, 68.75, 0.97855, mode, n_samples=n)
        assert abs(net_twist_per_cycle(prof)) \
            < 1e-10 * abs_friction_impulse(prof)


def test_contact_profile_validation(geometry):
    with pytest.raises(ValueError):
        contact_profile(geometry, 68.75, 0.97855, ActuationMode.dma())
    with pytest.raises(ValueError):
        contact_profile(geometry, 68.75, 0.97855, ActuationMode.crma(),
                        n_samples=32)
    with pytest.raises(ValueError):
        contact_profile(geometry, 68.75, 0.97855, ActuationMode.crma(),
                        mu_wall=0.0)


def test_mean_normal_force_frozen_values(geometry):
    means = [mean_normal_force(geometry, 68.75, 0.97855, a)
             for a in THETA_AR_GRID]
    np.testing.assert_allclose(
        means,
        [0.003417496244391798, 0.01004586264249368, 0.016070986778024963,
         0.021144654440019173, 0.02499444652509637], rtol=1e-10)


def test_mean_normal_force_strictly_increasing(geometry):
    means = [mean_normal_force(geometry, 68.75, 0.97855, a)
             for a in THETA_AR_GRID]
    assert all(a < b for a, b in zip(means, means[1:]))


def test_mean_normal_force_vanishes_with_sweep(geometry):
    tiny = mean_normal_force(geometry, 68.75, 0.97855, math.radians(0.01))
    assert tiny < 1e-5


def test_mean_normal_force_quadrature_stable(geometry):
    a = math.radians(70.0)
    coarse = mean_normal_force(geometry, 68.75, 0.97855, a, n_quad=96)
    fine = mean_normal_force(geometry, 68.75, 0.97855, a, n_quad=192)
    assert abs(coarse - fine) < 1e-6 * abs(fine)


def test_mean_normal_force_validation(geometry):
    with pytest.raises(ValueError):
        mean_normal_force(geometry, 68.75, 0.97855, 0.0)
    with pytest.raises(ValueError):
        mean_normal_force(geometry, 68.75, 0.97855, 2.0)


def test_recommendation_is_90_degrees(geometry):
    best = recommend_reciprocation_angle(geometry, 68.75, 0.97855,
                                         THETA_AR_GRID)
    assert best == pytest.approx(math.pi / 2)
    with pytest.raises(ValueError):
        recommend_reciprocation_angle(geometry, 68.75, 0.97855, [])
