"""Free evolution U(tau) = exp(i beta0 k0 tau) exp(-i beta |k|^2 tau).

Plane waves are normalised as <x|k> = (2 pi)^(-3/2) exp(i k.x).  The
energy-coordinate factor of U only multiplies the time wave and never
enters spatial probabilities; it lives in ``projevo.timeobs``.  Everything
here works axis by axis, since both the packets and the kinetic phase
factorize over Cartesian axes.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError
from .specfun import DEFAULT_QUAD, band_integrals
from .wavepacket import CoherentPacket, RectPacket, _vec3

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class FreePropagator:
    beta0: float = 1.0
    beta: float = 0.25

    def __post_init__(self):
        if not (math.isfinite(self.beta0) and math.isfinite(self.beta)):
            raise DomainError("propagator coefficients must be finite")


def group_velocity(prop, k0):
    """v_g = 2 beta k0."""
    return 2.0 * prop.beta * _vec3(k0, "k0")


def _check_tau(tau):
    if not (math.isfinite(tau) and tau >= 0):
        raise DomainError("etime tau must be finite and non-negative")


# -- per-axis amplitudes (normalised so that int |A|^2 dx = 1) ---------------

def rect_axis_linearized(xs, k0, dk, beta, tau, origin=0.0):
    """Axis factor of the linearized rectangular-packet amplitude."""
    xs = np.asarray(xs, dtype=np.float64)
    u = xs - origin - 2.0 * beta * k0 * tau
    z = u * dk
    with np.errstate(divide="ignore", invalid="ignore"):
        shape = np.where(np.abs(z) < 1e-8, 2.0 * dk * (1.0 - z * z / 6.0), 2.0 * np.sin(z) / u)
    # exp(-i beta k^2 tau) ~ exp(i beta k0^2 tau) exp(-2 i beta k k0 tau) to first order
    phase = np.exp(1j * beta * k0 * k0 * tau) * np.exp(1j * k0 * u)
    return _INV_SQRT_2PI / math.sqrt(2.0 * dk) * phase * shape


def rect_axis_exact(xs, k0, dk, beta, tau, origin=0.0, quad=DEFAULT_QUAD):
    """Axis factor with the full quadratic phase; returns (values, error_bounds)."""
    xs = np.asarray(xs, dtype=np.float64)
    vals, err = band_integrals(k0 - dk, k0 + dk, xs - origin, beta * tau, quad=quad)
    norm = _INV_SQRT_2PI / math.sqrt(2.0 * dk)
    return norm * vals, norm * err


def coherent_axis(xs, K, a, sigma, beta, tau, quad=DEFAULT_QUAD):
    """Axis factor of a propagated coherent packet; returns (values, error_bounds)."""
    xs = np.asarray(xs, dtype=np.float64)
    half = 8.0 / math.sqrt(sigma)
    norm = (sigma / math.pi) ** 0.25

    def envelope(k):
        return norm * np.exp(-0.5 * sigma * (k - K) ** 2)

    # exp(i(K-k)a) exp(ikx) = exp(iKa) exp(ik(x-a))
    vals, err = band_integrals(K - half, K + half, xs - a, beta * tau, envelope=envelope,
                               min_panels=16, quad=quad)
    pref = _INV_SQRT_2PI * np.exp(1j * K * a)
    return pref * vals, _INV_SQRT_2PI * err


# -- three-dimensional amplitudes -------------------------------------------

def position_amplitude_linearized(packet, prop, tau, x):
    """<x|U(tau)|mu> for a rectangular packet under k^2 ~ 2 k.k0 - k0^2."""
    if not isinstance(packet, RectPacket):
        raise TypeError("linearized amplitude requires a RectPacket")
    _check_tau(tau)
    x = _vec3(x, "x")
    amp = packet.scale + 0j
    for i in range(3):
        amp *= rect_axis_linearized(x[i], packet.k0[i], packet.dk[i], prop.beta, tau, packet.origin[i])
    return complex(amp)


def position_amplitude_exact(packet, prop, tau, x, quad=DEFAULT_QUAD):
    """<x|U(tau)|mu> for a rectangular packet, exact quadratic phase."""
    if not isinstance(packet, RectPacket):
        raise TypeError("position_amplitude_exact requires a RectPacket")
    _check_tau(tau)
    x = _vec3(x, "x")
    amp = packet.scale + 0j
    for i in range(3):
        vals, _ = rect_axis_exact([x[i]], packet.k0[i], packet.dk[i], prop.beta, tau,
                                  packet.origin[i], quad)
        amp *= vals[0]
    return complex(amp)


def coherent_position_amplitude(packet, prop, tau, x, quad=DEFAULT_QUAD):
    if not isinstance(packet, CoherentPacket):
        raise TypeError("coherent_position_amplitude requires a CoherentPacket")
    _check_tau(tau)
    x = _vec3(x, "x")
    amp = 1.0 + 0j
    for i in range(3):
        vals, _ = coherent_axis([x[i]], packet.K[i], packet.a[i], packet.sigma, prop.beta, tau, quad)
        amp *= vals[0]
    return complex(amp)
