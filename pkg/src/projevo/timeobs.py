"""Time operator M_T(t): detection-time densities.

With <t|k0> = exp(-i k0 t) / sqrt(2 pi), the energy factor
exp(i beta0 k0 tau) of U(tau) translates the time wave by beta0 * tau, so
the density of a packet that started at t0 peaks at t0 + beta0 * tau_D.

Two entry points share the same time profile: ``potential_probability``
reads the temporal structure of a state without touching it, while
``joint_trigger_probability`` is the density of a detection stamped at
time t by a trigger placed right after the detector step.  The trigger's
etime offset epsilon never enters any computation.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DomainError, UnsupportedRepresentationError
from .specfun import DEFAULT_QUAD, band_integrals, panel_integral
from .wavepacket import TimeProfile

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class TimeGrid:
    t_min: float
    t_max: float
    steps: int

    def __post_init__(self):
        if not (math.isfinite(self.t_min) and math.isfinite(self.t_max) and self.t_min < self.t_max):
            raise DomainError("time grid needs finite t_min < t_max")
        if int(self.steps) != self.steps or self.steps < 2:
            raise DomainError("time grid needs at least 2 steps")

    @property
    def points(self):
        return np.linspace(self.t_min, self.t_max, int(self.steps))

    @property
    def spacing(self):
        return (self.t_max - self.t_min) / (self.steps - 1)


@dataclass
class TimeDistribution:
    grid: TimeGrid
    density: np.ndarray
    role: str = "information"
    meta: dict = field(default_factory=dict)

    def integral(self):
        return float(np.trapezoid(self.density, self.grid.points))

    def argmax(self):
        return float(self.grid.points[int(np.argmax(self.density))])

    def fwhm(self):
        """Full width at half maximum by linear interpolation of the crossings."""
        t, d = self.grid.points, self.density
        i = int(np.argmax(d))
        half = 0.5 * d[i]
        left = i
        while left > 0 and d[left] > half:
            left -= 1
        right = i
        while right < len(d) - 1 and d[right] > half:
            right += 1

        def cross(a, b):
            if d[a] == d[b]:
                return t[a]
            return t[a] + (half - d[a]) * (t[b] - t[a]) / (d[b] - d[a])

        return float(cross(right - 1, right) - cross(left, left + 1))

    def bin_probabilities(self):
        """Probabilities of the grid bins (trapezoid weights), renormalised to sum to 1."""
        w = np.full(self.grid.steps, self.grid.spacing)
        w[0] = w[-1] = 0.5 * self.grid.spacing
        mass = self.density * w
        total = mass.sum()
        if total <= 0:
            raise DomainError("time density has no mass on the grid")
        return mass / total

    def coarse_bins(self, n_bins):
        """Merge grid bins into ``n_bins`` contiguous groups.

        Returns ``(times, probabilities)`` with each time the
        probability-weighted mean of its group (empty groups take the
        group midpoint).  Groups differ in size by at most one grid point.
        """
        n_bins = int(n_bins)
        if n_bins < 1 or n_bins > self.grid.steps:
            raise DomainError(f"n_bins must lie in [1, {self.grid.steps}]")
        p = self.bin_probabilities()
        t = self.grid.points
        times, probs = [], []
        for idx in np.array_split(np.arange(t.size), n_bins):
            mass = p[idx].sum()
            probs.append(mass)
            times.append(float(np.dot(p[idx], t[idx]) / mass) if mass > 0 else float(t[idx].mean()))
        probs = np.array(probs)
        return np.array(times), probs / probs.sum()


def time_wave(profile, beta0, tau_d, ts, quad=DEFAULT_QUAD):
    """<t| exp(i beta0 k0 tau_d) |mu0> at the times ``ts``."""
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    lo, hi = profile.support()
    # kappa = |kappa| exp(i k0 t0); combine all linear phases into one shift
    shift = profile.t0 + beta0 * tau_d - ts
    # beyond the half-width |wave|^2 < exp(-64) of its peak; skip the quadrature there
    near = np.abs(shift) <= profile.time_halfwidth()
    out = np.zeros(ts.shape, dtype=np.complex128)
    if near.any():
        n_env = int(math.ceil((hi - lo) / (profile.width if profile.kind == "gaussian" else profile.shoulder)))
        vals, _ = band_integrals(lo, hi, shift[near], 0.0, envelope=profile.envelope, min_panels=n_env, quad=quad)
        out[near] = _INV_SQRT_2PI * vals
    return out


def probc_density(profile, beta0, tau_d, grid, quad=DEFAULT_QUAD):
    """Conditional detection-time density |<t|exp(i beta0 k0 tau_d)|mu0>|^2 on the grid."""
    dens = np.abs(time_wave(profile, beta0, tau_d, grid.points, quad)) ** 2
    return TimeDistribution(grid, dens, "information",
                            {"tau_d": tau_d, "beta0": beta0, "kind": profile.kind,
                             "k0_center": profile.k0_center, "width": profile.width, "t0": profile.t0})


def time_norm(profile, beta0=1.0, tau_d=0.0, quad=DEFAULT_QUAD):
    """int dt |time wave|^2 over the whole real line (1 for a normalised profile)."""
    center = profile.t0 + beta0 * tau_d
    half = profile.time_halfwidth()
    lo, hi = profile.support()
    # |time wave|^2 is band-limited to frequencies below (hi - lo)
    period = 2.0 * math.pi / (hi - lo)
    val, _ = panel_integral(lambda t: np.abs(time_wave(profile, beta0, tau_d, t, quad)) ** 2,
                            center - half, center + half, period, quad=quad)
    return val


def joint_trigger_probability(profile, beta0, tau_d, grid, spatial_pi_d, quad=DEFAULT_QUAD):
    """Density of (detected in the box, at time t): time factor times spatial pi_D."""
    if not 0.0 <= spatial_pi_d <= 1.0:
        raise DomainError("spatial_pi_d must lie in [0, 1]")
    base = probc_density(profile, beta0, tau_d, grid, quad)
    meta = dict(base.meta, spatial_pi_d=spatial_pi_d)
    return TimeDistribution(grid, base.density * spatial_pi_d, "trigger", meta)


@dataclass(frozen=True)
class FactorizedState:
    """A packet state stored as time profile x spatial part, at etime ``tau_d``.

    ``detector`` records that the state has already been conditioned on a
    detector outcome; the temporal structure does not depend on it.
    """

    profile: TimeProfile
    beta0: float = 1.0
    tau_d: float = 0.0
    spatial: object = None
    detector: object = None


def potential_probability(state, grid, quad=DEFAULT_QUAD):
    """Potential probability density Tr(M_T(t) rho) of a factorized state.

    For a product of time and space parts the spatial trace factors out and
    this is the conditional time density of the time part.
    """
    if not isinstance(state, FactorizedState):
        raise UnsupportedRepresentationError(
            f"potential_probability needs a FactorizedState, got {type(state).__name__}")
    return probc_density(state.profile, state.beta0, state.tau_d, grid, quad)
