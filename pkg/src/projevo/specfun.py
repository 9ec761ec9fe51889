"""Special functions and quadrature primitives.

``sine_integral`` is Si(x) = int_0^x sin(t)/t dt.  The detection formula
only ever uses differences Si(u2) - Si(u1), so the alternative convention
si(x) = Si(x) - pi/2 gives identical probabilities.
"""

from dataclasses import dataclass
import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from . import kernels
from .errors import ConvergenceError, DomainError

# fraction of the local oscillation period allowed per panel (16-point Gauss
# is accurate to ~1e-20 over a full period)
PANEL_PERIOD_FRACTION = 1.0
GAUSS_ORDER = 16
_GL_NODES, _GL_WEIGHTS = leggauss(GAUSS_ORDER)


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2048

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise DomainError("tolerances must be positive")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be a positive integer")


DEFAULT_QUAD = QuadratureSpec()


def sine_integral(x):
    """Si(x) for a scalar or array argument.

    Power series for |x| <= 4, continued fraction for the auxiliary
    functions beyond.  Accurate to ~1e-15 absolute.
    """
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError("sine_integral requires finite input")
    if arr.ndim == 0:
        return kernels.si(float(arr))
    return kernels.si_array(np.ascontiguousarray(arr.ravel())).reshape(arr.shape)


def sinc_sq_kernel(u, dk):
    """sin^2(u*dk)/u^2, equal to dk^2 at u = 0."""
    if not dk > 0:
        raise DomainError("dk must be positive")
    arr = np.asarray(u, dtype=np.float64)
    out = kernels.sinc_sq_array(np.ascontiguousarray(arr.ravel()), float(dk))
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def adaptive_quad(f, a, b, quad=DEFAULT_QUAD, points=None):
    """Integrate a real function on [a, b].

    Returns ``(value, error_bound)``.  Raises ConvergenceError (carrying the
    best estimate) when QUADPACK reports that the tolerance was not met.
    """
    if not a < b:
        raise DomainError("adaptive_quad requires a < b")
    if points is not None:
        points = [p for p in points if a < p < b] or None
    value, err, info, *rest = integrate.quad(
        f, a, b,
        epsabs=quad.abs_tol, epsrel=quad.rel_tol,
        limit=int(quad.max_subdivisions), points=points, full_output=1,
    )
    ier = rest[0] if rest else 0
    if ier not in (0,) and err > max(quad.abs_tol, quad.rel_tol * abs(value)):
        raise ConvergenceError(
            f"adaptive_quad did not converge on [{a}, {b}] (ier={ier})",
            estimate=value, error_bound=err)
    return value, err


def gauss_panels(lo, hi, n_panels):
    """Nodes and weights of composite Gauss-Legendre on ``n_panels`` equal panels."""
    edges = np.linspace(lo, hi, n_panels + 1)
    left = edges[:-1, None]
    half = 0.5 * np.diff(edges)[:, None]
    nodes = (left + half * (_GL_NODES + 1.0)).ravel()
    weights = (half * _GL_WEIGHTS).ravel()
    return nodes, weights


def _check_budget(n, quad, estimate):
    """Raise when 2n panels exceed the budget, carrying the best affordable estimate."""
    if 2 * n <= quad.max_subdivisions:
        return
    m = max(quad.max_subdivisions // 2, 1)
    fine = estimate(2 * m) if 2 * m <= quad.max_subdivisions else estimate(m)
    coarse = estimate(m)
    raise ConvergenceError(
        f"oscillation resolution needs {2 * n} panels, budget is {quad.max_subdivisions}",
        estimate=fine, error_bound=np.abs(fine - coarse))


def band_integrals(k_lo, k_hi, xs, phase_coeff=0.0, envelope=None, min_panels=1,
                   quad=DEFAULT_QUAD):
    """Vectorised  I(x) = int_{k_lo}^{k_hi} g(k) exp(i k x - i c k^2) dk.

    ``envelope`` is an optional callable g(k) returning complex or real
    values (default 1).  Panels are sized so that each spans at most one
    period of the fastest local oscillation rate |x - 2 c k| over all
    requested x; the panel count is then doubled until two successive
    estimates agree to tolerance.  Returns ``(values, error_bounds)``.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    if not k_lo < k_hi:
        raise DomainError("band integral requires k_lo < k_hi")
    if not (np.all(np.isfinite(xs)) and math.isfinite(phase_coeff)):
        raise DomainError("non-finite argument to band integral")
    # |x - 2 c k| is linear in x and k, so its maximum sits on a corner
    x_ext = (float(xs.min()), float(xs.max())) if xs.size else (0.0, 0.0)
    rate = max(abs(x - 2.0 * phase_coeff * k) for x in x_ext for k in (k_lo, k_hi))
    width = k_hi - k_lo
    n = max(int(min_panels), int(math.ceil(width * rate / (2 * math.pi * PANEL_PERIOD_FRACTION))), 1)

    def estimate(n_panels):
        k, w = gauss_panels(k_lo, k_hi, n_panels)
        c = w * np.exp(-1j * phase_coeff * k * k)
        if envelope is not None:
            c = c * envelope(k)
        return kernels.phase_sum(np.ascontiguousarray(xs), k, np.ascontiguousarray(c, dtype=np.complex128))

    _check_budget(n, quad, estimate)
    coarse = estimate(n)
    while True:
        fine = estimate(2 * n)
        err = np.abs(fine - coarse)
        if np.all(err <= np.maximum(quad.abs_tol, quad.rel_tol * np.abs(fine))):
            return fine, err
        if 4 * n > quad.max_subdivisions:
            raise ConvergenceError(
                f"band integral not converged with {2 * n} panels",
                estimate=fine, error_bound=err)
        n *= 2
        coarse = fine


def quadratic_phase_integral(k_lo, k_hi, x, phase_coeff, quad=DEFAULT_QUAD):
    """int_{k_lo}^{k_hi} exp(i k x) exp(-i phase_coeff k^2) dk as a complex number."""
    values, _ = band_integrals(k_lo, k_hi, [x], phase_coeff, quad=quad)
    return complex(values[0])


def panel_integral(f, lo, hi, period, quad=DEFAULT_QUAD, min_panels=1):
    """Composite Gauss-Legendre integral of a vectorised real ``f`` on [lo, hi].

    ``period`` is the shortest oscillation scale of ``f``; panels start at
    one period each and are doubled until converged.  Returns
    ``(value, error_bound)``.
    """
    if not lo < hi:
        raise DomainError("panel_integral requires lo < hi")
    n = max(int(min_panels), int(math.ceil((hi - lo) / (PANEL_PERIOD_FRACTION * period))), 1)

    def estimate(n_panels):
        x, w = gauss_panels(lo, hi, n_panels)
        return float(np.dot(w, f(x)))

    _check_budget(n, quad, estimate)
    coarse = estimate(n)
    while True:
        fine = estimate(2 * n)
        err = abs(fine - coarse)
        if err <= max(quad.abs_tol, quad.rel_tol * abs(fine)):
            return fine, err
        if 4 * n > quad.max_subdivisions:
            raise ConvergenceError(
                f"panel integral on [{lo}, {hi}] not converged with {2 * n} panels",
                estimate=fine, error_bound=err)
        n *= 2
        coarse = fine
