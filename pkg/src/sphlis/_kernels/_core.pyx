# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot numeric kernels.

Single-pass loops over contiguous float64 buffers; semantics match
``sphlis._kernels._pure`` exactly (same expressions, same evaluation order).
"""

from libc.math cimport sqrt, sin, cos

import numpy as np

cdef double FOUR_PI = 12.566370614359172


def cap_integrand(double tau, double[::1] u):
    # regrouped so the radical cannot cancel negative as tau -> 1
    cdef Py_ssize_t n = u.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double t1 = tau - 1.0
    cdef double d, h
    for i in range(n):
        h = 1.0 - u[i]
        d = t1 * t1 + 2.0 * tau * h
        out[i] = (t1 - tau * h) / (d * sqrt(d))
    return out_arr


def cap_integrand_clamped(double tau, double[::1] u):
    cdef Py_ssize_t n = u.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double t1 = tau - 1.0
    cdef double d, h, num
    for i in range(n):
        h = 1.0 - u[i]
        d = t1 * t1 + 2.0 * tau * h
        num = t1 - tau * h
        if num < 0.0:
            num = 0.0
        out[i] = num / (d * sqrt(d))
    return out_arr


def disk_density(double zk, double sin_theta, double cos_theta,
                 double[::1] r, double[::1] phi):
    cdef Py_ssize_t n = r.shape[0]
    if phi.shape[0] != n:
        raise ValueError("r and phi must have the same length")
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef double d2
    for i in range(n):
        d2 = zk * zk - 2.0 * r[i] * zk * sin_theta * sin(phi[i]) + r[i] * r[i]
        out[i] = zk * cos_theta / (FOUR_PI * d2 * sqrt(d2))
    return out_arr


def coherent_power(double[::1] amp, double[::1] phase):
    cdef Py_ssize_t n = amp.shape[0]
    if phase.shape[0] != n:
        raise ValueError("amp and phase must have the same length")
    cdef double re = 0.0, im = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        re += amp[i] * cos(phase[i])
        im += amp[i] * sin(phase[i])
    return re * re + im * im
