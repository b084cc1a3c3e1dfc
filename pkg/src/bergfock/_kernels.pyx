# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled quadrature hot loops; see ``_kernels_py`` for the reference."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, sqrt

cnp.import_array()


cdef inline double cabs2(double complex v) nogil:
    return v.real * v.real + v.imag * v.imag


def polyval(coeffs, z):
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.complex128).view(np.float64)
    cdef const double[::1] zz = np.ascontiguousarray(z, dtype=np.complex128).view(np.float64)
    cdef Py_ssize_t n = zz.shape[0] // 2, deg = c.shape[0] // 2, i, m
    out = np.empty(n, dtype=np.complex128)
    cdef double[::1] o = out.view(np.float64)
    cdef double ar, ai, xr, xi, t
    with nogil:
        for i in range(n):
            xr = zz[2 * i]
            xi = zz[2 * i + 1]
            ar = 0.0
            ai = 0.0
            for m in range(deg - 1, -1, -1):
                t = ar * xr - ai * xi + c[2 * m]
                ai = ar * xi + ai * xr + c[2 * m + 1]
                ar = t
            o[2 * i] = ar
            o[2 * i + 1] = ai
    return out


def lp_sum(values, weights, double p):
    cdef const double complex[::1] v = np.ascontiguousarray(values, dtype=np.complex128)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double total = 0.0, half = 0.5 * p
    with nogil:
        for i in range(n):
            total += w[i] * (cabs2(v[i]) if half == 1.0 else pow(cabs2(v[i]), half))
    return total


def dual_moments(values, z, weights, double p, Py_ssize_t nbasis):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.complex128).view(np.float64)
    cdef const double[::1] zz = np.ascontiguousarray(z, dtype=np.complex128).view(np.float64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t i, m, n = w.shape[0]
    out = np.zeros(nbasis, dtype=np.complex128)
    cdef double[::1] o = out.view(np.float64)
    cdef double a2, scale, dr, di, pr, pi_, xr, xi, t, ex = 0.5 * p - 1.0
    with nogil:
        for i in range(n):
            dr = v[2 * i]
            di = v[2 * i + 1]
            a2 = dr * dr + di * di
            if a2 == 0.0:
                continue
            scale = w[i] * (1.0 if ex == 0.0 else pow(a2, ex))
            dr = scale * dr
            di = -scale * di
            xr = zz[2 * i]
            xi = zz[2 * i + 1]
            pr = 1.0
            pi_ = 0.0
            for m in range(nbasis):
                o[2 * m] += dr * pr - di * pi_
                o[2 * m + 1] += dr * pi_ + di * pr
                t = pr * xr - pi_ * xi
                pi_ = pr * xi + pi_ * xr
                pr = t
    return out


def lp_hessian(values, z, weights, double p, Py_ssize_t nbasis, double floor):
    cdef const double complex[::1] v = np.ascontiguousarray(values, dtype=np.complex128)
    cdef const double complex[::1] zz = np.ascontiguousarray(z, dtype=np.complex128)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t i, a, b, n = v.shape[0], nb2 = 2 * nbasis
    H = np.zeros((nb2, nb2), dtype=np.float64)
    cdef double[:, ::1] h = H
    cols_np = np.empty(nb2, dtype=np.complex128)
    u_np = np.empty(nb2, dtype=np.float64)
    cdef double complex[::1] cols = cols_np
    cdef double[::1] u = u_np
    cdef double mod, base, curv
    cdef double complex g, zp
    with nogil:
        for i in range(n):
            mod = sqrt(cabs2(v[i]))
            if mod < floor:
                mod = floor
            g = v[i] / mod
            base = w[i] * p * pow(mod, p - 2.0)
            curv = base * (p - 2.0)
            zp = 1.0
            for a in range(nbasis):
                cols[a] = zp
                cols[a + nbasis] = 1j * zp
                zp = zp * zz[i]
            for a in range(nb2):
                u[a] = g.real * cols[a].real + g.imag * cols[a].imag
            for a in range(nb2):
                for b in range(a, nb2):
                    h[a, b] += base * (cols[a].real * cols[b].real + cols[a].imag * cols[b].imag) + curv * u[a] * u[b]
        for a in range(nb2):
            for b in range(a):
                h[a, b] = h[b, a]
    return H
