from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from ntnsim.errors import DomainError
from ntnsim.geometry import (
    EARTH_RADIUS_KM,
    SPEED_OF_LIGHT_KM_S,
    OrbitGeometry,
    footprint_area,
    propagation_delay,
    slant_range,
)


def vector_oracle(h_km: float, elev_deg: float) -> float:
    """Slant range by plane geometry: bisect the Earth-central angle until the
    elevation seen from the UE matches, then measure the chord."""
    r = EARTH_RADIUS_KM + h_km
    target = math.radians(elev_deg)

    def elevation(phi: float) -> float:
        vx, vy = r * math.sin(phi), r * math.cos(phi) - EARTH_RADIUS_KM
        return math.atan2(vy, vx)

    lo, hi = 0.0, math.acos(EARTH_RADIUS_KM / r)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if elevation(mid) > target:
            lo = mid
        else:
            hi = mid
    phi = 0.5 * (lo + hi)
    return math.hypot(r * math.sin(phi), r * math.cos(phi) - EARTH_RADIUS_KM)


def test_zenith_is_altitude():
    assert slant_range(OrbitGeometry(600.0, 90.0)) == pytest.approx(600.0, rel=1e-9)


@pytest.mark.parametrize(
    "h, elev, expected, tol",
    [(600.0, 30.0, 1075.1, 0.5), (35786.0, 12.5, 40316.0, 50.0)],
)
def test_slant_range_examples(h, elev, expected, tol):
    assert abs(slant_range(OrbitGeometry(h, elev)) - expected) <= tol


@pytest.mark.parametrize("h, elev", [(600, 30), (35786, 12.5), (1200, 5), (300, 75), (20000, 45)])
def test_slant_range_matches_vector_oracle(h, elev):
    assert slant_range(OrbitGeometry(h, elev)) == pytest.approx(vector_oracle(h, elev), rel=1e-9)


@pytest.mark.parametrize("elev", [0.0, -1.0, 90.0001, 95.0, math.nan, math.inf])
def test_invalid_elevation(elev):
    with pytest.raises(DomainError):
        OrbitGeometry(600.0, elev)


@pytest.mark.parametrize("h", [0.0, -10.0, math.nan])
def test_invalid_altitude(h):
    with pytest.raises(DomainError):
        OrbitGeometry(h, 30.0)


@given(
    h=st.floats(200, 40000),
    e1=st.floats(1, 89),
    e2=st.floats(1, 89),
)
def test_slant_range_decreasing_in_elevation(h, e1, e2):
    if abs(e1 - e2) < 1e-6:
        return
    lo, hi = sorted((e1, e2))
    assert slant_range(OrbitGeometry(h, lo)) > slant_range(OrbitGeometry(h, hi))


@given(
    elev=st.floats(1, 90),
    h1=st.floats(200, 40000),
    h2=st.floats(200, 40000),
)
def test_slant_range_increasing_in_altitude(elev, h1, h2):
    if abs(h1 - h2) < 1e-6:
        return
    lo, hi = sorted((h1, h2))
    assert slant_range(OrbitGeometry(lo, elev)) < slant_range(OrbitGeometry(hi, elev))


def test_propagation_delay_examples():
    assert propagation_delay(SPEED_OF_LIGHT_KM_S) == 1.0
    assert propagation_delay(1075.1) == pytest.approx(3.586e-3, abs=1e-6)
    assert propagation_delay(40316.0) == pytest.approx(134.47e-3, abs=1e-5)
    assert propagation_delay(0.0) == 0.0


def test_propagation_delay_rejects_negative():
    with pytest.raises(DomainError):
        propagation_delay(-1.0)


@given(a=st.floats(0, 1e5), b=st.floats(0, 1e5))
def test_propagation_delay_linear(a, b):
    lhs = propagation_delay(a + b)
    rhs = propagation_delay(a) + propagation_delay(b)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


def test_footprint_area():
    assert footprint_area(2.0) == pytest.approx(math.pi)
    assert footprint_area(47.6) == pytest.approx(1780, rel=0.01)
    assert footprint_area(653.0) == pytest.approx(334_900, rel=0.01)
    for bad in (0.0, -3.0):
        with pytest.raises(DomainError):
            footprint_area(bad)
