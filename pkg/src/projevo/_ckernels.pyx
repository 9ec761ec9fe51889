# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Same call signatures and semantics as ``_pykernels``; ``projevo.kernels``
picks whichever is importable.
"""

import numpy as np

from libc.math cimport sin, cos, fabs, copysign, isinf, M_PI, M_PI_2

cdef extern from "complex.h" nogil:
    double cimag(double complex)
    double creal(double complex)
    double cabs(double complex)

cdef int SI_MAXIT = 200
cdef double SI_EPS = 4e-16
cdef double SI_FPMIN = 1e-300


cdef double _si(double x) noexcept nogil:
    cdef double t = fabs(x)
    cdef double s, term, contrib, tt
    cdef int k
    cdef double complex b, c, d, h, dl
    cdef double a
    if t == 0.0:
        return 0.0
    if isinf(t):
        return copysign(M_PI_2, x)
    if t <= 4.0:
        tt = t * t
        term = t
        s = t
        k = 1
        while k < 60:
            term *= -tt / ((2.0 * k) * (2.0 * k + 1.0))
            contrib = term / (2.0 * k + 1.0)
            s += contrib
            if fabs(contrib) < 1e-17 * fabs(s):
                break
            k += 1
        return copysign(s, x)
    # continued fraction for E1(i t); Si = pi/2 + Im(e^{-it} * cf)
    b = 1.0 + 1j * t
    c = 1.0 / SI_FPMIN
    d = 1.0 / b
    h = d
    k = 2
    while k <= SI_MAXIT:
        a = -(k - 1.0) * (k - 1.0)
        b = b + 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        dl = c * d
        h = h * dl
        if fabs(creal(dl) - 1.0) + fabs(cimag(dl)) < SI_EPS:
            break
        k += 1
    h = (cos(t) - 1j * sin(t)) * h
    return copysign(M_PI_2 + cimag(h), x)


cdef double _edge_term(double u, double dk) noexcept nogil:
    # sin^2(u dk) / (pi u dk), continuous at u = 0
    cdef double z = u * dk
    cdef double sz
    if isinf(u):
        return 0.0
    if fabs(z) < 1e-6:
        return z * (1.0 - z * z / 3.0) / M_PI
    sz = sin(z)
    return sz * sz / (M_PI * z)


cpdef double si(double x):
    return _si(x)


def si_array(double[::1] x):
    cdef Py_ssize_t n = x.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _si(x[i])
    return out


def sinc_sq_array(double[::1] u, double dk):
    cdef Py_ssize_t n = u.shape[0], i
    cdef double z, sz
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            z = u[i] * dk
            if fabs(z) < 1e-8:
                o[i] = dk * dk * (1.0 - z * z / 3.0)
            else:
                sz = sin(z)
                o[i] = sz * sz / (u[i] * u[i])
    return out


def pi_d_1d_array(double lo, double hi, double dk, double[::1] centers):
    cdef Py_ssize_t n = centers.shape[0], i
    cdef double u1, u2
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            u1 = lo - centers[i]
            u2 = hi - centers[i]
            o[i] = (_edge_term(u1, dk) - _edge_term(u2, dk)
                    + (_si(2.0 * dk * u2) - _si(2.0 * dk * u1)) / M_PI)
    return out


def phase_sum(double[::1] x, double[::1] k, double complex[::1] c):
    """out[m] = sum_j c[j] * exp(i k[j] x[m])."""
    cdef Py_ssize_t nx = x.shape[0], nk = k.shape[0], m, j
    cdef double re, im, ph, cr, ci, cs, sn
    out = np.empty(nx, dtype=np.complex128)
    cdef double complex[::1] o = out
    with nogil:
        for m in range(nx):
            re = 0.0
            im = 0.0
            for j in range(nk):
                ph = k[j] * x[m]
                cs = cos(ph)
                sn = sin(ph)
                cr = creal(c[j])
                ci = cimag(c[j])
                re += cr * cs - ci * sn
                im += cr * sn + ci * cs
            o[m] = re + 1j * im
    return out
