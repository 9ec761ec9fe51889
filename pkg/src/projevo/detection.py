"""Detection probability pi_D for a box detector.

For the linearized rectangular packet every axis contributes

    (1 / (pi dk)) int_lo^hi sin^2((x - v t) dk) / (x - v t)^2 dx
      = T(lo - v t) - T(hi - v t) + [Si(2 dk (hi - v t)) - Si(2 dk (lo - v t))] / pi

with T(u) = sin^2(u dk) / (pi u dk).  The numeric route integrates
|<x|U|mu>|^2 over the box instead, with either the linearized or the exact
amplitude.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import kernels
from .errors import DomainError, UnsupportedRepresentationError
from .propagation import coherent_axis, group_velocity, rect_axis_exact, rect_axis_linearized
from .specfun import DEFAULT_QUAD, panel_integral
from .wavepacket import CoherentPacket, RectPacket

ANALYTIC_ERROR = 1e-14
METHODS = ("analytic", "quad_linearized", "quad_exact")


@dataclass(frozen=True)
class DetectorBox:
    """Axis-aligned box [a1,a2] x [b1,b2] x [c1,c2]; bounds may be infinite."""

    a1: float = -math.inf
    a2: float = math.inf
    b1: float = -math.inf
    b2: float = math.inf
    c1: float = -math.inf
    c2: float = math.inf

    def __post_init__(self):
        for lo, hi in self.intervals():
            if math.isnan(lo) or math.isnan(hi) or not lo < hi:
                raise DomainError(f"detector interval [{lo}, {hi}] is empty or invalid")

    def intervals(self):
        return ((self.a1, self.a2), (self.b1, self.b2), (self.c1, self.c2))

    @classmethod
    def slab(cls, lo, hi):
        """One-dimensional detector on x; unbounded in y and z."""
        return cls(lo, hi)

    def shifted(self, d):
        d = np.asarray(d, dtype=np.float64)
        return DetectorBox(self.a1 + d[0], self.a2 + d[0], self.b1 + d[1],
                           self.b2 + d[1], self.c1 + d[2], self.c2 + d[2])


@dataclass(frozen=True)
class DetectionResult:
    probability: float
    method: str
    error_bound: float


def pi_d_1d(lo, hi, dk, v_g, tau_d):
    """Closed-form single-axis detection probability.

    ``tau_d`` may be a scalar or an array; ``lo``/``hi`` may be infinite.
    """
    if not lo < hi:
        raise DomainError("pi_d_1d requires lo < hi")
    if not dk > 0:
        raise DomainError("pi_d_1d requires dk > 0")
    tau = np.asarray(tau_d, dtype=np.float64)
    if not np.all(np.isfinite(tau)) or not math.isfinite(v_g):
        raise DomainError("v_g and tau_d must be finite")
    centers = np.ascontiguousarray((v_g * tau).ravel())
    out = kernels.pi_d_1d_array(float(lo), float(hi), float(dk), centers)
    if tau.ndim == 0:
        return float(out[0])
    return out.reshape(tau.shape)


def _require_rect(packet, what):
    if not isinstance(packet, RectPacket):
        raise UnsupportedRepresentationError(f"{what} needs a RectPacket; use pi_d_numeric for coherent packets")


def pi_d_box_grid(packet, prop, box, taus):
    """Vectorised analytic pi_D over an array of etimes."""
    _require_rect(packet, "analytic pi_D")
    taus = np.asarray(taus, dtype=np.float64)
    v = group_velocity(prop, packet.k0)
    out = np.full(taus.shape, packet.scale ** 2)
    for i, (lo, hi) in enumerate(box.intervals()):
        if math.isinf(lo) and math.isinf(hi):
            continue
        out = out * pi_d_1d(lo - packet.origin[i], hi - packet.origin[i], packet.dk[i], v[i], taus)
    return out


def pi_d_box(packet, prop, box, tau_d):
    """Analytic pi_D: product of the closed-form axis factors."""
    p = float(pi_d_box_grid(packet, prop, box, np.array([tau_d]))[0])
    return DetectionResult(p, "analytic", ANALYTIC_ERROR)


def _axis_density(packet, prop, tau, axis, mode, quad):
    """Return (f, period) with f(x) = |axis amplitude|^2, vectorised."""
    beta = prop.beta
    if isinstance(packet, RectPacket):
        k0, dk, x0 = packet.k0[axis], packet.dk[axis], packet.origin[axis]
        period = math.pi / dk
        if mode == "linearized":
            return (lambda x: np.abs(rect_axis_linearized(x, k0, dk, beta, tau, x0)) ** 2), period
        return (lambda x: np.abs(rect_axis_exact(x, k0, dk, beta, tau, x0, quad)[0]) ** 2), period
    if isinstance(packet, CoherentPacket):
        if mode == "linearized":
            raise UnsupportedRepresentationError("coherent packets have no linearized mode")
        K, a, s = packet.K[axis], packet.a[axis], packet.sigma
        return (lambda x: np.abs(coherent_axis(x, K, a, s, beta, tau, quad)[0]) ** 2), math.pi * math.sqrt(s) / 8.0
    raise TypeError(f"unsupported packet type {type(packet).__name__}")


def pi_d_numeric(packet, prop, box, tau_d, mode="exact", quad=DEFAULT_QUAD):
    """pi_D by quadrature of |<x|U(tau_d)|mu>|^2 over the box.

    Axes on which the box is unbounded on both sides contribute exactly 1
    (free evolution conserves the norm); half-infinite axes are rejected.
    """
    if mode not in ("linearized", "exact"):
        raise DomainError(f"unknown mode {mode!r}")
    if not (math.isfinite(tau_d) and tau_d >= 0):
        raise DomainError("tau_d must be finite and non-negative")
    factors, errors = [], []
    for axis, (lo, hi) in enumerate(box.intervals()):
        if math.isinf(lo) and math.isinf(hi):
            continue
        if math.isinf(lo) or math.isinf(hi):
            raise DomainError("numeric pi_D needs finite or fully unbounded detector axes")
        f, period = _axis_density(packet, prop, tau_d, axis, mode, quad)
        val, err = panel_integral(f, lo, hi, period, quad=quad)
        factors.append(val)
        errors.append(err)
    scale = packet.scale ** 2 if isinstance(packet, RectPacket) else 1.0
    prob = scale * float(np.prod(factors)) if factors else scale
    err = 0.0
    for i, e in enumerate(errors):
        err += e * float(np.prod([abs(f) for j, f in enumerate(factors) if j != i]))
    method = "quad_linearized" if mode == "linearized" else "quad_exact"
    return DetectionResult(prob, method, scale * err)


def detection_path_probability(mu_overlap, pi_d):
    """Prob(detect along mu) = <mu|rho0|mu> * pi_D."""
    for name, v in (("mu_overlap", mu_overlap), ("pi_d", pi_d)):
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {v!r}")
    return mu_overlap * pi_d


@dataclass
class PeakScan:
    tau: np.ndarray
    pi_d: np.ndarray

    @property
    def argmax_index(self):
        return int(np.argmax(self.pi_d))

    @property
    def argmax_tau(self):
        return float(self.tau[self.argmax_index])

    @property
    def max_pi_d(self):
        return float(self.pi_d[self.argmax_index])


def check_tau_grid(tau_grid):
    taus = np.asarray(tau_grid, dtype=np.float64).ravel()
    if taus.size == 0:
        raise DomainError("tau grid is empty")
    if not np.all(np.isfinite(taus)) or np.any(taus < 0):
        raise DomainError("tau grid values must be finite and non-negative")
    if np.any(np.diff(taus) <= 0):
        raise DomainError("tau grid must be strictly increasing")
    return taus


def peak_scan(packet, prop, box, tau_grid, method="analytic", quad=DEFAULT_QUAD, executor=None):
    """Evaluate pi_D over an etime grid and locate its maximum.

    ``method`` is ``analytic`` or ``exact``; an optional executor (anything
    with an ordered ``map``) parallelises the exact scan.
    """
    taus = check_tau_grid(tau_grid)
    if method == "analytic":
        return PeakScan(taus, pi_d_box_grid(packet, prop, box, taus))
    if method != "exact":
        raise DomainError(f"unknown method {method!r}")

    def one(t):
        return pi_d_numeric(packet, prop, box, float(t), "exact", quad).probability

    mapper = map if executor is None else executor.map
    return PeakScan(taus, np.array(list(mapper(one, taus))))
