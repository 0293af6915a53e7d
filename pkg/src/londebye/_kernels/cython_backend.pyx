# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel sums (real densities, double precision)."""
import numpy as np

cimport numpy as cnp
from libc.math cimport exp, sqrt

cnp.import_array()

cdef double FOURPI = 12.566370614359172


def potential(double[:, ::1] targets, double[:, ::1] sources,
              double[::1] charge, double kappa):
    cdef Py_ssize_t m = targets.shape[0], n = sources.shape[0]
    cdef Py_ssize_t i, q
    cdef double dx, dy, dz, d, acc
    out_arr = np.empty(m)
    cdef double[::1] out = out_arr
    for i in range(m):
        acc = 0.0
        for q in range(n):
            dx = targets[i, 0] - sources[q, 0]
            dy = targets[i, 1] - sources[q, 1]
            dz = targets[i, 2] - sources[q, 2]
            d = sqrt(dx * dx + dy * dy + dz * dz)
            acc += charge[q] * exp(-kappa * d) / (FOURPI * d)
        out[i] = acc
    return out_arr


def gradient(double[:, ::1] targets, double[:, ::1] sources,
             double[::1] charge, double kappa):
    cdef Py_ssize_t m = targets.shape[0], n = sources.shape[0]
    cdef Py_ssize_t i, q
    cdef double dx, dy, dz, d, f, ax, ay, az
    out_arr = np.empty((m, 3))
    cdef double[:, ::1] out = out_arr
    for i in range(m):
        ax = ay = az = 0.0
        for q in range(n):
            dx = targets[i, 0] - sources[q, 0]
            dy = targets[i, 1] - sources[q, 1]
            dz = targets[i, 2] - sources[q, 2]
            d = sqrt(dx * dx + dy * dy + dz * dz)
            f = -charge[q] * exp(-kappa * d) * (kappa * d + 1.0) / (FOURPI * d * d * d)
            ax += f * dx
            ay += f * dy
            az += f * dz
        out[i, 0] = ax
        out[i, 1] = ay
        out[i, 2] = az
    return out_arr


def curl(double[:, ::1] targets, double[:, ::1] sources,
         double[:, ::1] vec, double kappa):
    cdef Py_ssize_t m = targets.shape[0], n = sources.shape[0]
    cdef Py_ssize_t i, q
    cdef double dx, dy, dz, d, f, gx, gy, gz, ax, ay, az
    out_arr = np.empty((m, 3))
    cdef double[:, ::1] out = out_arr
    for i in range(m):
        ax = ay = az = 0.0
        for q in range(n):
            dx = targets[i, 0] - sources[q, 0]
            dy = targets[i, 1] - sources[q, 1]
            dz = targets[i, 2] - sources[q, 2]
            d = sqrt(dx * dx + dy * dy + dz * dz)
            f = -exp(-kappa * d) * (kappa * d + 1.0) / (FOURPI * d * d * d)
            gx = f * dx
            gy = f * dy
            gz = f * dz
            ax += gy * vec[q, 2] - gz * vec[q, 1]
            ay += gz * vec[q, 0] - gx * vec[q, 2]
            az += gx * vec[q, 1] - gy * vec[q, 0]
        out[i, 0] = ax
        out[i, 1] = ay
        out[i, 2] = az
    return out_arr
