# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 loops for the disentangling and direct propagators.

Coefficient arrays are sampled on the half-step grid ``k * dt / 2`` for
``k = 0 .. 2 * nsteps``; see :mod:`rabivac._kernels._rk4_py` for the
reference implementation these loops must match.
"""
import numpy as np

from libc.math cimport cos, exp, isfinite, sin

ctypedef double complex cplx


cdef inline cplx _cexp(cplx z) nogil:
    cdef double r = exp(z.real)
    return r * cos(z.imag) + 1j * (r * sin(z.imag))


cdef inline double _abs2(cplx z) nogil:
    return z.real * z.real + z.imag * z.imag


def riccati_rk4(const cplx[::1] mu0, const cplx[::1] mu_plus, const cplx[::1] mu_minus,
                double dt, double guard):
    cdef Py_ssize_t nsteps = (mu0.shape[0] - 1) // 2
    out = np.zeros((nsteps + 1, 3), dtype=np.complex128)
    cdef cplx[:, ::1] o = out
    cdef Py_ssize_t i, a, b, c
    cdef cplx p = 0, z = 0, m = 0
    cdef cplx k1p, k1z, k1m, k2p, k2z, k2m, k3p, k3z, k3m, k4p, k4z, k4m
    cdef cplx tp, tz
    cdef double h = 0.5 * dt, guard2 = guard * guard
    cdef Py_ssize_t failed = -1

    with nogil:
        for i in range(nsteps):
            a = 2 * i
            b = a + 1
            c = a + 2

            k1p = mu_plus[a] - mu_minus[a] * p * p + mu0[a] * p
            k1z = mu0[a] - 2.0 * mu_minus[a] * p
            k1m = mu_minus[a] * _cexp(z)

            tp = p + h * k1p
            tz = z + h * k1z
            k2p = mu_plus[b] - mu_minus[b] * tp * tp + mu0[b] * tp
            k2z = mu0[b] - 2.0 * mu_minus[b] * tp
            k2m = mu_minus[b] * _cexp(tz)

            tp = p + h * k2p
            tz = z + h * k2z
            k3p = mu_plus[b] - mu_minus[b] * tp * tp + mu0[b] * tp
            k3z = mu0[b] - 2.0 * mu_minus[b] * tp
            k3m = mu_minus[b] * _cexp(tz)

            tp = p + dt * k3p
            tz = z + dt * k3z
            k4p = mu_plus[c] - mu_minus[c] * tp * tp + mu0[c] * tp
            k4z = mu0[c] - 2.0 * mu_minus[c] * tp
            k4m = mu_minus[c] * _cexp(tz)

            p = p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
            z = z + dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
            m = m + dt / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)

            o[i + 1, 0] = p
            o[i + 1, 1] = z
            o[i + 1, 2] = m
            if not (_abs2(p) <= guard2 and isfinite(z.real) and isfinite(z.imag)
                    and isfinite(m.real) and isfinite(m.imag)):
                failed = i + 1
                break
    return out, failed


def direct_rk4(const cplx[::1] eps0, const cplx[::1] eps_plus, const cplx[::1] eps_minus,
               const double[::1] nu0, const double[::1] nu_plus, const double[::1] nu_minus,
               const double[::1] gamma_dot, const cplx[::1] rho0, double dt):
    cdef Py_ssize_t nsteps = (eps0.shape[0] - 1) // 2
    out = np.zeros((nsteps + 1, 4), dtype=np.complex128)
    cdef cplx[:, ::1] o = out
    cdef Py_ssize_t i, j, s
    cdef cplx y[4]
    cdef cplx tmp[4]
    cdef cplx k[4][4]
    cdef cplx e0h, ep, em
    cdef double n0h, npl, nmi, gd
    cdef double h = 0.5 * dt
    cdef double w[4]
    w[0] = 1.0
    w[1] = 2.0
    w[2] = 2.0
    w[3] = 1.0

    for j in range(4):
        y[j] = rho0[j]
        o[0, j] = rho0[j]

    with nogil:
        for i in range(nsteps):
            for s in range(4):
                if s == 0:
                    j = 2 * i
                    tmp[0] = y[0]; tmp[1] = y[1]; tmp[2] = y[2]; tmp[3] = y[3]
                elif s == 1 or s == 2:
                    j = 2 * i + 1
                    tmp[0] = y[0] + h * k[s - 1][0]
                    tmp[1] = y[1] + h * k[s - 1][1]
                    tmp[2] = y[2] + h * k[s - 1][2]
                    tmp[3] = y[3] + h * k[s - 1][3]
                else:
                    j = 2 * i + 2
                    tmp[0] = y[0] + dt * k[2][0]
                    tmp[1] = y[1] + dt * k[2][1]
                    tmp[2] = y[2] + dt * k[2][2]
                    tmp[3] = y[3] + dt * k[2][3]
                e0h = 0.5 * eps0[j]
                ep = eps_plus[j]
                em = eps_minus[j]
                n0h = 0.5 * nu0[j]
                npl = nu_plus[j]
                nmi = nu_minus[j]
                gd = gamma_dot[j]
                # (rho11, rho10, rho01, rho00)
                k[s][0] = (n0h - gd) * tmp[0] + npl * tmp[3]
                k[s][1] = (e0h - gd) * tmp[1] + ep * tmp[2]
                k[s][2] = (-e0h - gd) * tmp[2] + em * tmp[1]
                k[s][3] = (-n0h - gd) * tmp[3] + nmi * tmp[0]
            for j in range(4):
                y[j] = y[j] + dt / 6.0 * (w[0] * k[0][j] + w[1] * k[1][j] + w[2] * k[2][j] + w[3] * k[3][j])
                o[i + 1, j] = y[j]
    return out
