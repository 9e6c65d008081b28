"""Satellite-to-UE geometry on a spherical Earth.

Positions are static for a whole run, so everything here is a pure function
of altitude, elevation angle and beam size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

EARTH_RADIUS_KM = 6371.0
SPEED_OF_LIGHT_KM_S = 299_792.458


@dataclass(frozen=True)
class OrbitGeometry:
    """Fixed satellite/UE geometry.

    Parameters
    ----------
    altitude_km : float
        Satellite altitude above the surface (km).
    elevation_deg : float
        Elevation angle of the satellite seen from the UE, in (0, 90].
    earth_radius_km : float
        Radius of the spherical Earth model.
    """

    altitude_km: float
    elevation_deg: float
    earth_radius_km: float = EARTH_RADIUS_KM

    def __post_init__(self) -> None:
        if not math.isfinite(self.altitude_km) or self.altitude_km <= 0:
            raise DomainError(f"altitude_km must be > 0, got {self.altitude_km!r}")
        if not (0 < self.elevation_deg <= 90):
            raise DomainError(f"elevation_deg must be in (0, 90], got {self.elevation_deg!r}")
        if not math.isfinite(self.earth_radius_km) or self.earth_radius_km <= 0:
            raise DomainError(f"earth_radius_km must be > 0, got {self.earth_radius_km!r}")


def slant_range(geom: OrbitGeometry) -> float:
    """Line-of-sight distance from the UE to the satellite (km).

    Law of cosines in the Earth-centre / UE / satellite triangle:
    ``d = sqrt(Re^2 sin^2(e) + h^2 + 2 Re h) - Re sin(e)``.
    """
    re = geom.earth_radius_km
    h = geom.altitude_km
    if geom.elevation_deg == 90:
        return float(h)
    s = math.sin(math.radians(geom.elevation_deg))
    # h^2 + 2 Re h is the (Re + h)^2 - Re^2 term; kept factored for precision
    return math.sqrt((re * s) ** 2 + h * (h + 2.0 * re)) - re * s


def propagation_delay(distance_km: float) -> float:
    """One-way free-space propagation delay in seconds."""
    if not math.isfinite(distance_km) or distance_km < 0:
        raise DomainError(f"distance_km must be >= 0, got {distance_km!r}")
    return distance_km / SPEED_OF_LIGHT_KM_S


def footprint_area(beam_diameter_km: float) -> float:
    """Area (km^2) of a circular beam footprint of the given diameter."""
    if not math.isfinite(beam_diameter_km) or beam_diameter_km <= 0:
        raise DomainError(f"beam_diameter_km must be > 0, got {beam_diameter_km!r}")
    return math.pi * (beam_diameter_km / 2.0) ** 2
