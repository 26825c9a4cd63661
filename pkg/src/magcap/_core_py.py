"""Pure-numpy implementations of the hot dipole kernels.

Drop-in equivalents of the compiled extension ``magcap._core``; the active
backend is chosen in :mod:`magcap.backend`.  All positions are relative to
the source dipole, in meters; fields in tesla, forces in newtons.
"""

import numpy as np

MU0_OVER_4PI = 1e-7  # T*m/A


def field_batch(rs, m_mag, m_hat):
    """Dipole field at each row of ``rs`` (N,3) for a moment m_mag*m_hat."""
    rs = np.asarray(rs, dtype=float)
    m_hat = np.asarray(m_hat, dtype=float)
    r2 = np.einsum("ij,ij->i", rs, rs)
    r = np.sqrt(r2)
    mdotr = rs @ m_hat
    coef = MU0_OVER_4PI * m_mag / (r2 * r2 * r)
    return coef[:, None] * (3.0 * mdotr[:, None] * rs - r2[:, None] * m_hat)


def field_jacobian_batch(rs, m_mag, m_hat):
    """Spatial gradient dB/dr of the dipole field, one 3x3 block per row.

    Symmetric and traceless away from the source.
    """
    rs = np.asarray(rs, dtype=float)
    m_hat = np.asarray(m_hat, dtype=float)
    r = np.linalg.norm(rs, axis=1)
    rhat = rs / r[:, None]
    mdotr = rhat @ m_hat
    coef = 3.0 * MU0_OVER_4PI * m_mag / r**4
    outer_mr = m_hat[None, :, None] * rhat[:, None, :]
    outer_rm = rhat[:, :, None] * m_hat[None, None, :]
    outer_rr = rhat[:, :, None] * rhat[:, None, :]
    eye = np.eye(3)[None, :, :]
    blocks = outer_mr + outer_rm + mdotr[:, None, None] * (eye - 5.0 * outer_rr)
    return coef[:, None, None] * blocks


def force_on_dipole(r, ma_mag, ma_hat, mc_mag, mc_hat):
    """Magnetic force on a capsule dipole at ``r`` relative to the actuator."""
    r = np.asarray(r, dtype=float)
    ma_hat = np.asarray(ma_hat, dtype=float)
    mc_hat = np.asarray(mc_hat, dtype=float)
    r2 = float(r @ r)
    rn = np.sqrt(r2)
    ma_r = float(ma_hat @ r)
    mc_r = float(mc_hat @ r)
    mm = float(ma_hat @ mc_hat)
    coef = 3.0 * MU0_OVER_4PI * ma_mag * mc_mag / rn**7
    return coef * (ma_r * r2 * mc_hat + mc_r * r2 * ma_hat
                   + (mm * r2 - 5.0 * mc_r * ma_r) * r)
