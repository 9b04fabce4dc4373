# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contracts as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs
cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double cabs(double complex)

cnp.import_array()

BACKEND = "cython"


def qp_eval(p0, ptau, double tau, z):
    cdef const double[:] c0 = np.ascontiguousarray(p0, dtype=np.float64)
    cdef const double[:] c1 = np.ascontiguousarray(ptau, dtype=np.float64)
    zarr = np.ascontiguousarray(z, dtype=np.complex128)
    shape = zarr.shape
    cdef const double complex[:] zz = zarr.ravel()
    cdef Py_ssize_t npts = zz.shape[0]
    val_a = np.empty(npts, dtype=np.complex128)
    der_a = np.empty(npts, dtype=np.complex128)
    scl_a = np.empty(npts, dtype=np.float64)
    cdef double complex[:] val = val_a
    cdef double complex[:] der = der_a
    cdef double[:] scl = scl_a
    cdef Py_ssize_t i, k
    cdef double complex x, v0, d0, v1, d1, e
    cdef double ax, s0, s1
    cdef Py_ssize_t n0 = c0.shape[0], n1 = c1.shape[0]
    with nogil:
        for i in range(npts):
            x = zz[i]
            ax = cabs(x)
            v0 = 0
            d0 = 0
            s0 = 0
            for k in range(n0 - 1, -1, -1):
                d0 = d0 * x + v0
                v0 = v0 * x + c0[k]
                s0 = s0 * ax + fabs(c0[k])
            v1 = 0
            d1 = 0
            s1 = 0
            for k in range(n1 - 1, -1, -1):
                d1 = d1 * x + v1
                v1 = v1 * x + c1[k]
                s1 = s1 * ax + fabs(c1[k])
            e = cexp(-tau * x)
            val[i] = v0 + v1 * e
            der[i] = d0 + (d1 - tau * v1) * e
            scl[i] = s0 + s1 * cabs(e)
    return val_a.reshape(shape), der_a.reshape(shape), scl_a.reshape(shape)


def kummer_series(a, b, z, int max_terms=10000, double rel_tol=1e-16):
    cdef double complex ca = complex(a), cb = complex(b), cz = complex(z)
    cdef double complex term = 1.0, total = 1.0
    cdef double biggest = 1.0, at
    cdef int k, small_run = 0
    for k in range(max_terms):
        term = term * (ca + k) / (cb + k) * cz / (k + 1)
        total = total + term
        at = cabs(term)
        if at > biggest:
            biggest = at
        if at <= rel_tol * cabs(total):
            small_run += 1
            if small_run >= 3:
                return complex(total), k + 2, biggest, True
        else:
            small_run = 0
    return complex(total), max_terms + 1, biggest, False


cdef inline void _matvec2(const double[:, :] a, const double[:] x,
                          const double[:, :] b, const double[:] y,
                          double[:] out, Py_ssize_t n) nogil:
    cdef Py_ssize_t r, c
    cdef double s
    for r in range(n):
        s = 0.0
        for c in range(n):
            s += a[r, c] * x[c] + b[r, c] * y[c]
        out[r] = s


def rk4_dde(a0, atau, hist_grid, hist_half, Py_ssize_t n_steps, double dt):
    cdef const double[:, :] A = np.ascontiguousarray(a0, dtype=np.float64)
    cdef const double[:, :] B = np.ascontiguousarray(atau, dtype=np.float64)
    cdef const double[:, :] hg = np.ascontiguousarray(hist_grid, dtype=np.float64)
    cdef const double[:, :] hh = np.ascontiguousarray(hist_half, dtype=np.float64)
    cdef Py_ssize_t nd = hg.shape[0] - 1
    cdef Py_ssize_t dim = A.shape[0]
    xs_a = np.empty((nd + n_steps + 1, dim), dtype=np.float64)
    fs_a = np.zeros((nd + n_steps + 1, dim), dtype=np.float64)
    cdef double[:, :] xs = xs_a
    cdef double[:, :] fs = fs_a
    cdef double[:] x = np.empty(dim)
    cdef double[:] tmp = np.empty(dim)
    cdef double[:] xdm = np.empty(dim)
    cdef double[:] k2 = np.empty(dim)
    cdef double[:] k3 = np.empty(dim)
    cdef double[:] k4 = np.empty(dim)
    cdef Py_ssize_t j, k, r, jd
    with nogil:
        for j in range(nd + 1):
            for r in range(dim):
                xs[j, r] = hg[j, r]
        for r in range(dim):
            x[r] = xs[nd, r]
        _matvec2(A, x, B, xs[0], fs[nd], dim)
        for k in range(n_steps):
            j = nd + k
            jd = j - nd
            if jd < nd:
                for r in range(dim):
                    xdm[r] = hh[jd, r]
            else:
                for r in range(dim):
                    xdm[r] = 0.5 * (xs[jd, r] + xs[jd + 1, r]) + dt * (fs[jd, r] - fs[jd + 1, r]) / 8.0
            for r in range(dim):
                tmp[r] = x[r] + 0.5 * dt * fs[j, r]
            _matvec2(A, tmp, B, xdm, k2, dim)
            for r in range(dim):
                tmp[r] = x[r] + 0.5 * dt * k2[r]
            _matvec2(A, tmp, B, xdm, k3, dim)
            for r in range(dim):
                tmp[r] = x[r] + dt * k3[r]
            _matvec2(A, tmp, B, xs[jd + 1], k4, dim)
            for r in range(dim):
                x[r] = x[r] + dt / 6.0 * (fs[j, r] + 2.0 * k2[r] + 2.0 * k3[r] + k4[r])
                xs[j + 1, r] = x[r]
            _matvec2(A, x, B, xs[j + 1 - nd], fs[j + 1], dim)
    return xs_a[nd:].copy()
