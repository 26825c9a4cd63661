"""Volvulus-risk analysis: wall contact forces under CRMA vs RRMA.

The capsule pressed sideways against the tube wall loads it with a normal
force equal to the lateral magnetic force, and drags it with Coulomb
friction in the capsule's spin direction.  CRMA twists the wall one way
only; RRMA alternates and the per-cycle net twist cancels.
"""

import math
from dataclasses import dataclass

import numpy as np

from .actuation import force_at_phase, pinned_capsule_moment, spin_phase

DEFAULT_MU_WALL = 0.3


@dataclass(frozen=True)
class ContactSample:
    """Wall contact state at one spin phase."""

    theta_ax: float
    normal_force: float
    signed_friction: float  # positive = counterclockwise (plane-U convention)
    spin_sign: int


@dataclass(frozen=True)
class RiskProfile:
    """Contact samples over exactly one actuation cycle, in time order."""

    samples: list
    mode: object
    period_s: float


def contact_profile(geometry, ma_mag, mc_mag, mode, mu_wall=DEFAULT_MU_WALL,
                    n_samples=256, rate=2.0 * math.pi):
    """Wall-contact profile over one full cycle of the given mode.

    Samples are taken at uniform times t_k = k * T / n over one period T
    (one revolution for CRMA, one full reciprocation for RRMA).
    """
    if not 0.0 < mu_wall <= 2.0:
        raise ValueError("mu_wall must be in (0, 2]")
    if mode.kind == "DMA":
        raise ValueError("contact profile requires a rotating mode")
    if n_samples < 64:
        raise ValueError("need at least 64 samples per cycle")
    if mode.kind == "CRMA":
        period = 2.0 * math.pi / rate
    else:
        period = 4.0 * mode.theta_ar / rate
    # contacting capsule: wall friction pins the moment at its settled
    # (sweep-center) orientation for the whole cycle
    mc_hat = pinned_capsule_moment(geometry, ma_mag)
    samples = []
    for k in range(n_samples):
        theta_ax, sign = spin_phase(mode, k * period / n_samples, rate)
        _, dec, _ = force_at_phase(geometry, ma_mag, mc_mag, theta_ax,
                                   mc_hat=mc_hat)
        normal = abs(dec.f_l_signed)
        samples.append(ContactSample(theta_ax, normal,
                                     sign * mu_wall * normal, sign))
    return RiskProfile(samples, mode, period)


def net_twist_per_cycle(profile):
    """Time-averaged signed friction over the cycle (trapezoid, periodic)."""
    fr = np.array([s.signed_friction for s in profile.samples])
    # uniform periodic samples: trapezoid == mean of the left endpoints
    return float(fr.mean())


def abs_friction_impulse(profile):
    """Cycle average of |signed friction|; the L1 mass the net is compared to."""
    return float(np.mean([abs(s.signed_friction) for s in profile.samples]))


def mean_normal_force(geometry, ma_mag, mc_mag, theta_ar,
                      mu_wall=DEFAULT_MU_WALL, n_quad=96):
    """Average lateral-force magnitude over one half reciprocation sweep,
    theta_ax in [pi - theta_ar, pi + theta_ar] (Gauss-Legendre quadrature)."""
    if not 0.0 < theta_ar <= math.pi / 2:
        raise ValueError("theta_ar must be in (0, pi/2]")
    mc_hat = pinned_capsule_moment(geometry, ma_mag)
    # |f_l| has a kink at the sweep center; integrate each smooth half
    nodes, weights = np.polynomial.legendre.leggauss((n_quad + 1) // 2)
    total = 0.0
    for side in (-1.0, 1.0):
        for x, w in zip(nodes, weights):
            theta_ax = math.pi + side * theta_ar * (float(x) + 1.0) / 2.0
            _, dec, _ = force_at_phase(geometry, ma_mag, mc_mag, theta_ax,
                                       mc_hat=mc_hat)
            total += float(w) * abs(dec.f_l_signed)
    return total / 4.0  # each half contributes weight-sum 2 over half-range


def recommend_reciprocation_angle(geometry, ma_mag, mc_mag, candidates,
                                  mu_wall=DEFAULT_MU_WALL):
    """Candidate reciprocation angle maximizing the mean normal force.

    Net twist is zero for every RRMA candidate, so the wall-stretching
    force is the sole selection criterion.
    """
    candidates = list(candidates)
    if not candidates:
        raise ValueError("no candidate angles supplied")
    return max(candidates,
               key=lambda a: mean_normal_force(geometry, ma_mag, mc_mag, a,
                                               mu_wall))
