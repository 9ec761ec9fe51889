"""Pure numpy fallback for the compiled kernels in ``_ckernels.pyx``.

Every function here mirrors its compiled counterpart exactly (same
branches, same switchover points) so the two backends agree to rounding.
"""

import math

import numpy as np

_SI_SERIES_TERMS = 30
_SI_MAXIT = 200
_SI_EPS = 4e-16
_SI_FPMIN = 1e-300


def _si_series(t):
    tt = t * t
    term = t.copy()
    s = t.copy()
    for k in range(1, _SI_SERIES_TERMS):
        term *= -tt / ((2.0 * k) * (2.0 * k + 1.0))
        s += term / (2.0 * k + 1.0)
    return s


def _si_cf(t):
    b = 1.0 + 1j * t
    c = np.full(t.shape, 1.0 / _SI_FPMIN, dtype=np.complex128)
    d = 1.0 / b
    h = d.copy()
    done = np.zeros(t.shape, dtype=bool)
    for k in range(2, _SI_MAXIT + 1):
        a = -(k - 1.0) ** 2
        b = b + 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        dl = c * d
        h = np.where(done, h, h * dl)
        done |= np.abs(dl.real - 1.0) + np.abs(dl.imag) < _SI_EPS
        if done.all():
            break
    h = (np.cos(t) - 1j * np.sin(t)) * h
    return math.pi / 2 + h.imag


def si_array(x):
    x = np.asarray(x, dtype=np.float64)
    t = np.abs(x)
    out = np.zeros_like(t)
    inf = np.isinf(t)
    out[inf] = math.pi / 2
    small = (t <= 4.0) & (t > 0)
    large = (t > 4.0) & ~inf
    if small.any():
        out[small] = _si_series(t[small])
    if large.any():
        out[large] = _si_cf(t[large])
    return np.copysign(out, x)


def si(x):
    return float(si_array(np.array([x], dtype=np.float64))[0])


def sinc_sq_array(u, dk):
    u = np.asarray(u, dtype=np.float64)
    z = u * dk
    near = np.abs(z) < 1e-8
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin(z) ** 2 / (u * u)
    return np.where(near, dk * dk * (1.0 - z * z / 3.0), out)


def _edge_term(u, dk):
    z = u * dk
    near = np.abs(z) < 1e-6
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin(z) ** 2 / (math.pi * z)
    out = np.where(near, z * (1.0 - z * z / 3.0) / math.pi, out)
    return np.where(np.isinf(u), 0.0, out)


def pi_d_1d_array(lo, hi, dk, centers):
    centers = np.asarray(centers, dtype=np.float64)
    u1 = lo - centers
    u2 = hi - centers
    return (_edge_term(u1, dk) - _edge_term(u2, dk)
            + (si_array(2.0 * dk * u2) - si_array(2.0 * dk * u1)) / math.pi)


def phase_sum(x, k, c, block=4096):
    """out[m] = sum_j c[j] * exp(i k[j] x[m])."""
    x = np.asarray(x, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    c = np.asarray(c, dtype=np.complex128)
    out = np.empty(x.shape[0], dtype=np.complex128)
    # bound the temporary (block x nk) matrix
    step = max(1, block * 64 // max(k.shape[0], 1))
    for start in range(0, x.shape[0], step):
        xs = x[start:start + step]
        out[start:start + step] = np.exp(1j * np.outer(xs, k)) @ c
    return out
