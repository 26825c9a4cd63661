# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled dipole kernels; mirrors magcap._core_py exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

DEF MU0_OVER_4PI = 1e-7


def field_batch(rs, double m_mag, m_hat):
    """Dipole field at each row of ``rs`` (N,3) for a moment m_mag*m_hat."""
    cdef double[:, ::1] r_v = np.ascontiguousarray(rs, dtype=np.float64)
    cdef double[::1] m_v = np.ascontiguousarray(m_hat, dtype=np.float64)
    cdef Py_ssize_t n = r_v.shape[0], i
    out = np.empty((n, 3), dtype=np.float64)
    cdef double[:, ::1] o_v = out
    cdef double x, y, z, r2, r, mdotr, coef
    cdef double mx = m_v[0], my = m_v[1], mz = m_v[2]
    for i in range(n):
        x = r_v[i, 0]; y = r_v[i, 1]; z = r_v[i, 2]
        r2 = x * x + y * y + z * z
        r = sqrt(r2)
        mdotr = mx * x + my * y + mz * z
        coef = MU0_OVER_4PI * m_mag / (r2 * r2 * r)
        o_v[i, 0] = coef * (3.0 * mdotr * x - r2 * mx)
        o_v[i, 1] = coef * (3.0 * mdotr * y - r2 * my)
        o_v[i, 2] = coef * (3.0 * mdotr * z - r2 * mz)
    return out


def field_jacobian_batch(rs, double m_mag, m_hat):
    """Spatial gradient dB/dr of the dipole field, one 3x3 block per row.

    Symmetric and traceless away from the source.
    """
    cdef double[:, ::1] r_v = np.ascontiguousarray(rs, dtype=np.float64)
    cdef double[::1] m_v = np.ascontiguousarray(m_hat, dtype=np.float64)
    cdef Py_ssize_t n = r_v.shape[0], i, a, b
    out = np.empty((n, 3, 3), dtype=np.float64)
    cdef double[:, :, ::1] o_v = out
    cdef double r, coef, mdotr, val
    cdef double rh[3]
    cdef double mh[3]
    mh[0] = m_v[0]; mh[1] = m_v[1]; mh[2] = m_v[2]
    for i in range(n):
        rh[0] = r_v[i, 0]; rh[1] = r_v[i, 1]; rh[2] = r_v[i, 2]
        r = sqrt(rh[0] * rh[0] + rh[1] * rh[1] + rh[2] * rh[2])
        rh[0] /= r; rh[1] /= r; rh[2] /= r
        mdotr = mh[0] * rh[0] + mh[1] * rh[1] + mh[2] * rh[2]
        coef = 3.0 * MU0_OVER_4PI * m_mag / (r * r * r * r)
        for a in range(3):
            for b in range(3):
                val = mh[a] * rh[b] + rh[a] * mh[b] - 5.0 * mdotr * rh[a] * rh[b]
                if a == b:
                    val += mdotr
                o_v[i, a, b] = coef * val
    return out


def force_on_dipole(r, double ma_mag, ma_hat, double mc_mag, mc_hat):
    """Magnetic force on a capsule dipole at ``r`` relative to the actuator."""
    cdef double[::1] r_v = np.ascontiguousarray(r, dtype=np.float64)
    cdef double[::1] a_v = np.ascontiguousarray(ma_hat, dtype=np.float64)
    cdef double[::1] c_v = np.ascontiguousarray(mc_hat, dtype=np.float64)
    cdef double x = r_v[0], y = r_v[1], z = r_v[2]
    cdef double r2 = x * x + y * y + z * z
    cdef double rn = sqrt(r2)
    cdef double ma_r = a_v[0] * x + a_v[1] * y + a_v[2] * z
    cdef double mc_r = c_v[0] * x + c_v[1] * y + c_v[2] * z
    cdef double mm = a_v[0] * c_v[0] + a_v[1] * c_v[1] + a_v[2] * c_v[2]
    cdef double coef = 3.0 * MU0_OVER_4PI * ma_mag * mc_mag / (rn**7)
    cdef double radial = mm * r2 - 5.0 * mc_r * ma_r
    out = np.empty(3, dtype=np.float64)
    cdef double[::1] o_v = out
    o_v[0] = coef * (ma_r * r2 * c_v[0] + mc_r * r2 * a_v[0] + radial * x)
    o_v[1] = coef * (ma_r * r2 * c_v[1] + mc_r * r2 * a_v[1] + radial * y)
    o_v[2] = coef * (ma_r * r2 * c_v[2] + mc_r * r2 * a_v[2] + radial * z)
    return out
