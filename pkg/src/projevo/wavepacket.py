"""Momentum-space packet specifications.

Units are dimensionless with hbar = 1.  A four-dimensional packet is always
stored factorized: a spatial part (``RectPacket`` or ``CoherentPacket``)
times a ``TimeProfile`` over the energy coordinate k0.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import erf as _erf

from .errors import DomainError
from .specfun import DEFAULT_QUAD, panel_integral

# Gaussian envelopes are truncated this many standard deviations out
GAUSS_CUTOFF = 8.0


def _vec3(v, name):
    a = np.array(v, dtype=np.float64).reshape(-1)
    if a.shape != (3,) or not np.all(np.isfinite(a)):
        raise DomainError(f"{name} must be a finite 3-vector")
    a.setflags(write=False)
    return a


def rect_normalization(dk):
    """alpha = prod_i (2 dk_i)^(-1/2)."""
    dk = np.asarray(dk, dtype=np.float64)
    if np.any(~(dk > 0)):
        raise DomainError("all packet half-widths must be positive")
    return float(np.prod(1.0 / np.sqrt(2.0 * dk)))


@dataclass(frozen=True, eq=False)
class RectPacket:
    """Uniform amplitude on the open box (k0 - dk, k0 + dk).

    ``alpha`` defaults to the normalising constant; passing another value
    produces a deliberately de-normalised packet.  ``origin`` is the source
    position (amplitude picks up exp(-i k.origin)).
    """

    k0: np.ndarray
    dk: np.ndarray
    alpha: float = None
    origin: np.ndarray = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "k0", _vec3(self.k0, "k0"))
        object.__setattr__(self, "dk", _vec3(self.dk, "dk"))
        object.__setattr__(self, "origin", _vec3(self.origin, "origin"))
        if np.any(self.dk <= 0):
            raise DomainError("dk components must be positive")
        if self.alpha is None:
            object.__setattr__(self, "alpha", rect_normalization(self.dk))
        elif not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise DomainError("alpha must be positive")

    @property
    def scale(self):
        """alpha relative to the normalising value (1 for a proper packet)."""
        return self.alpha / rect_normalization(self.dk)

    def reversed(self):
        return RectPacket(-self.k0, self.dk, self.alpha, self.origin)


@dataclass(frozen=True, eq=False)
class CoherentPacket:
    """(sigma/pi)^(3/4) exp(-sigma |K-k|^2 / 2) exp(i (K-k).a)."""

    K: np.ndarray
    a: np.ndarray
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "K", _vec3(self.K, "K"))
        object.__setattr__(self, "a", _vec3(self.a, "a"))
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise DomainError("sigma must be positive")

    def k_support(self, axis):
        half = GAUSS_CUTOFF / math.sqrt(self.sigma)
        return self.K[axis] - half, self.K[axis] + half

    def reversed(self):
        return CoherentPacket(-self.K, self.a, self.sigma)


def momentum_amplitude(packet, k):
    k = _vec3(k, "k")
    if isinstance(packet, RectPacket):
        inside = np.all(np.abs(k - packet.k0) < packet.dk)
        if not inside:
            return 0j
        return complex(packet.alpha * np.exp(-1j * np.dot(k, packet.origin)))
    if isinstance(packet, CoherentPacket):
        q = packet.K - k
        return complex((packet.sigma / math.pi) ** 0.75
                       * np.exp(-0.5 * packet.sigma * np.dot(q, q))
                       * np.exp(1j * np.dot(q, packet.a)))
    raise TypeError(f"unsupported packet type {type(packet).__name__}")


def norm_check(packet, quad=DEFAULT_QUAD):
    """Quadrature value of int |alpha(k)|^2 d^3k (1 for a normalised packet)."""
    if isinstance(packet, RectPacket):
        # piecewise constant per axis: Gauss on the support is exact
        total = packet.alpha ** 2
        for i in range(3):
            lo, hi = packet.k0[i] - packet.dk[i], packet.k0[i] + packet.dk[i]
            val, _ = panel_integral(np.ones_like, lo, hi, period=hi - lo, quad=quad)
            total *= val
        return total
    if isinstance(packet, CoherentPacket):
        s = packet.sigma
        total = 1.0
        for i in range(3):
            lo, hi = packet.k_support(i)
            k_c = packet.K[i]
            val, _ = panel_integral(
                lambda k: math.sqrt(s / math.pi) * np.exp(-s * (k - k_c) ** 2),
                lo, hi, period=math.sqrt(1.0 / s), quad=quad)
            total *= val
        return total
    raise TypeError(f"unsupported packet type {type(packet).__name__}")


def mean_momentum(packet):
    """Average momentum of a rectangular packet; the box is symmetric about k0."""
    if not isinstance(packet, RectPacket):
        raise TypeError("mean_momentum is defined for RectPacket")
    return packet.k0.copy()


@dataclass(frozen=True)
class TimeProfile:
    """Energy-coordinate amplitude kappa(k0) of a factorized packet.

    ``gaussian``: |kappa| is a Gaussian of standard deviation ``width``
    (in k0) about ``k0_center``.  ``plane_wave_like``: a flat band of
    half-width ``width`` smoothed by a Gaussian of standard deviation
    width/4 (box convolved with Gaussian), i.e. a broad spectrum with
    erf-shaped edges whose time wave decays like a Gaussian.

    The start time enters as kappa ~ exp(+i k0 t0), so that with
    <t|k0> = exp(-i k0 t)/sqrt(2 pi) the time wave is centred on t0.
    ``scale`` multiplies the amplitude (1 = normalised).
    """

    kind: str = "gaussian"
    k0_center: float = 0.0
    width: float = 10.0
    t0: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "plane_wave_like"):
            raise DomainError(f"unknown time profile kind {self.kind!r}")
        if not (self.width > 0 and math.isfinite(self.width)):
            raise DomainError("time profile width must be positive")
        if not (math.isfinite(self.k0_center) and math.isfinite(self.t0)):
            raise DomainError("time profile parameters must be finite")

    @property
    def shoulder(self):
        return self.width / 4.0

    def support(self):
        if self.kind == "gaussian":
            half = GAUSS_CUTOFF * self.width
        else:
            half = self.width + GAUSS_CUTOFF * self.shoulder
        return self.k0_center - half, self.k0_center + half

    def envelope(self, k):
        """Real modulus |kappa(k)|, vectorised."""
        k = np.asarray(k, dtype=np.float64)
        d = k - self.k0_center
        if self.kind == "gaussian":
            norm = (math.pi * self.width ** 2) ** -0.25
            return self.scale * norm * np.exp(-0.5 * (d / self.width) ** 2)
        r = math.sqrt(2.0) * self.shoulder
        box = 0.5 * (_erf((d + self.width) / r) - _erf((d - self.width) / r))
        return self.scale * box / math.sqrt(self._band_norm())

    def _band_norm(self):
        # int (box * g)^2 dk = E[(2w - |Z|)_+] with Z ~ N(0, 2 s^2)
        a = 2.0 * self.width
        sd = math.sqrt(2.0) * self.shoulder
        phi = lambda z: math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
        big_phi = 0.5 * (1.0 + math.erf(a / sd / math.sqrt(2.0)))
        return 2.0 * (a * (big_phi - 0.5) - sd * (phi(0.0) - phi(a / sd)))

    def amplitude(self, k):
        return self.envelope(k) * np.exp(1j * np.asarray(k) * self.t0)

    def time_halfwidth(self):
        """Half-width in t beyond which |time wave|^2 is below ~1e-25 of its peak."""
        if self.kind == "gaussian":
            return GAUSS_CUTOFF / self.width
        return GAUSS_CUTOFF / self.shoulder
