"""Antenna models: circular-aperture pattern, Bessel J1, boresight gain.

The circular-aperture pattern is the classic Airy pattern

    G(theta) = 1                                   theta == 0
    G(theta) = 4 |J1(ka sin theta) / (ka sin theta)|^2   0 < |theta| <= 90 deg

with ``ka = 2 pi a f / c`` (wave number times aperture radius).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError

SPEED_OF_LIGHT_M_S = 299_792_458.0

# Below this |x| J1 comes from the Taylor series, above it from the Hankel
# asymptotic expansion. At x = 12 the series loses ~4 digits to cancellation
# and the asymptotic series bottoms out near 1e-11, both inside 1e-10.
_SERIES_LIMIT = 12.0


def _j1_series(x: float) -> float:
    half = 0.5 * x
    q = -half * half
    term = half
    total = term
    m = 0
    while True:
        m += 1
        term *= q / (m * (m + 1))
        total += term
        if abs(term) < 1e-17 * max(abs(total), 1e-300):
            return total


def _j1_asymptotic(x: float) -> float:
    # J1(x) ~ sqrt(2/(pi x)) (P cos(chi) - Q sin(chi)), chi = x - 3 pi / 4,
    # with P, Q the Hankel series for nu = 1 (mu = 4 nu^2 = 4).
    mu = 4.0
    z = 8.0 * x
    p = 1.0
    q = 0.0
    term = 1.0
    k = 0
    prev = math.inf
    while True:
        k += 1
        term *= (mu - (2 * k - 1) ** 2) / (k * z)
        size = abs(term)
        if size >= prev or size < 1e-17:
            break
        prev = size
        # terms alternate between Q (odd k) and P (even k) with sign (-1)^floor(k/2)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q += sign * term
        else:
            p += sign * term
    chi = x - 0.75 * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


def bessel_j1(x: float) -> float:
    """Bessel function of the first kind, order one.

    Accurate to better than 1e-10 absolute on [0, 50]; odd in ``x``.
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"bessel_j1 requires a finite argument, got {x!r}")
    if x < 0:
        return -bessel_j1(-x)
    if x == 0:
        return 0.0
    if x < _SERIES_LIMIT:
        return _j1_series(x)
    return _j1_asymptotic(x)


def kappa_a(radius_m: float, carrier_freq_hz: float) -> float:
    """Aperture size parameter ``2 pi a f / c`` (2 pi times radius in wavelengths)."""
    if radius_m <= 0 or carrier_freq_hz <= 0:
        raise DomainError("radius and carrier frequency must be > 0")
    return 2.0 * math.pi * radius_m * carrier_freq_hz / SPEED_OF_LIGHT_M_S


@dataclass(frozen=True)
class CircularAperture:
    radius_m: float
    carrier_freq_hz: float

    def __post_init__(self) -> None:
        if not (self.radius_m > 0 and self.carrier_freq_hz > 0):
            raise DomainError("radius_m and carrier_freq_hz must be > 0")

    @property
    def kappa_a(self) -> float:
        return kappa_a(self.radius_m, self.carrier_freq_hz)

    def gain_rel(self, theta_deg: float) -> float:
        return aperture_gain_rel(theta_deg, self.kappa_a)


def aperture_gain_rel(theta_deg: float, kappa_a: float) -> float:
    """Normalised circular-aperture gain (linear, 1 on boresight)."""
    if not abs(theta_deg) <= 90:
        raise DomainError(f"|theta_deg| must be <= 90, got {theta_deg!r}")
    if not kappa_a > 0:
        raise DomainError(f"kappa_a must be > 0, got {kappa_a!r}")
    if theta_deg == 0:
        return 1.0
    u = kappa_a * math.sin(math.radians(abs(theta_deg)))
    if u == 0:
        return 1.0
    ratio = 2.0 * bessel_j1(u) / u
    return min(ratio * ratio, 1.0)


def pattern_nulls(kappa_a: float, count: int = 3, tol_deg: float = 1e-9) -> list[float]:
    """Angles (deg, in (0, 90]) of the first ``count`` pattern nulls.

    Found by scanning the signed field ``J1(ka sin theta)`` for sign changes and
    bisecting each bracket down to ``tol_deg``.
    """
    if not kappa_a > 0:
        raise DomainError(f"kappa_a must be > 0, got {kappa_a!r}")

    def field(theta: float) -> float:
        return bessel_j1(kappa_a * math.sin(math.radians(theta)))

    # Zeros of J1 are ~pi apart, so a step of ~pi/8 in u never skips one.
    du = math.pi / 8.0
    u_max = kappa_a
    steps = max(64, int(u_max / du) + 1)
    nulls: list[float] = []
    prev_t = 0.0
    prev_f = None
    for i in range(1, steps + 1):
        u = u_max * i / steps
        t = math.degrees(math.asin(min(1.0, u / kappa_a)))
        f = field(t)
        if prev_f is not None and prev_f * f <= 0 and prev_f != 0:
            lo, hi, flo = prev_t, t, prev_f
            while hi - lo > tol_deg:
                mid = 0.5 * (lo + hi)
                fm = field(mid)
                if fm == 0:
                    lo = hi = mid
                    break
                if flo * fm < 0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            nulls.append(0.5 * (lo + hi))
            if len(nulls) == count:
                break
        prev_t, prev_f = t, f
    return nulls


def boresight_gain_dbi(diameter_m: float, freq_hz: float, efficiency: float = 0.6) -> float:
    """Peak gain of a circular aperture, ``eta (pi D f / c)^2``, in dBi."""
    if not (diameter_m > 0 and freq_hz > 0):
        raise DomainError("diameter_m and freq_hz must be > 0")
    if not 0 < efficiency <= 1:
        raise DomainError(f"efficiency must be in (0, 1], got {efficiency!r}")
    x = math.pi * diameter_m * freq_hz / SPEED_OF_LIGHT_M_S
    return 10.0 * math.log10(efficiency * x * x)


class AntennaKind(str, enum.Enum):
    CIRCULAR_APERTURE = "circular_aperture"
    UPA_ISOTROPIC = "upa_isotropic"
    VSAT = "vsat"


@dataclass(frozen=True)
class AntennaSpec:
    """One end of the link.

    ``boresight_gain_dbi`` is the authoritative gain used by the link budget;
    the aperture diameter only shapes the off-boresight pattern and feeds the
    consistency check in :meth:`aperture_gain_delta_db`.
    """

    kind: AntennaKind
    boresight_gain_dbi: float
    diameter_m: float | None = None
    efficiency: float = 0.6

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", AntennaKind(self.kind))
        if not math.isfinite(self.boresight_gain_dbi):
            raise DomainError("boresight_gain_dbi must be finite")
        if self.diameter_m is not None and not self.diameter_m > 0:
            raise DomainError(f"diameter_m must be > 0, got {self.diameter_m!r}")
        if not 0 < self.efficiency <= 1:
            raise DomainError(f"efficiency must be in (0, 1], got {self.efficiency!r}")

    @property
    def is_aperture(self) -> bool:
        return self.kind in (AntennaKind.CIRCULAR_APERTURE, AntennaKind.VSAT)

    def gain_dbi(self, theta_deg: float, freq_hz: float) -> float:
        """Gain towards ``theta_deg`` off boresight.

        UPA composites radiate uniformly, so they return the boresight figure
        for every angle. Aperture antennas need ``diameter_m``.
        """
        if not self.is_aperture:
            if not abs(theta_deg) <= 90:
                raise DomainError(f"|theta_deg| must be <= 90, got {theta_deg!r}")
            return self.boresight_gain_dbi
        if self.diameter_m is None:
            raise DomainError(f"{self.kind.value} antenna needs diameter_m for an off-boresight gain")
        rel = aperture_gain_rel(theta_deg, kappa_a(self.diameter_m / 2.0, freq_hz))
        if rel <= 0:
            return -math.inf
        return self.boresight_gain_dbi + 10.0 * math.log10(rel)

    def aperture_gain_delta_db(self, freq_hz: float) -> float | None:
        """Configured gain minus the aperture estimate, or None without a diameter."""
        if self.diameter_m is None:
            return None
        return self.boresight_gain_dbi - boresight_gain_dbi(self.diameter_m, freq_hz, self.efficiency)
