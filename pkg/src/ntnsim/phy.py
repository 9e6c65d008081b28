"""NR numerology and the SNR -> application capacity mapping."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

from .errors import DomainError

# NR 4-bit CQI ladder (64QAM table), efficiency in bit/s/Hz for CQI 1..15.
CQI_EFFICIENCY = (
    0.1523, 0.2344, 0.3770, 0.6016, 0.8770,
    1.1758, 1.4766, 1.9141, 2.4063, 2.7305,
    3.3223, 3.9023, 4.5234, 5.1152, 5.5547,
)


@dataclass(frozen=True)
class Numerology:
    mu: int

    def __post_init__(self) -> None:
        _check_mu(self.mu)

    @property
    def scs_khz(self) -> float:
        return 15.0 * 2**self.mu

    @property
    def slot_duration_ms(self) -> float:
        return slot_duration(self.mu)


def _check_mu(mu: int) -> None:
    if isinstance(mu, bool) or not isinstance(mu, int) or not 0 <= mu <= 4:
        raise DomainError(f"numerology mu must be an integer in 0..4, got {mu!r}")


def slot_duration(mu: int) -> float:
    """Slot length in milliseconds for numerology ``mu``."""
    _check_mu(mu)
    return 1.0 / 2**mu


def slot_duration_ns(mu: int) -> int:
    _check_mu(mu)
    return 1_000_000 >> mu


@dataclass(frozen=True)
class CapacityModel:
    """Gap-to-capacity model with CQI quantisation and a fixed overhead.

    When ``calibrated_capacity_bps`` is set it replaces the analytic result
    verbatim.
    """

    gap_db: float = 6.0
    overhead_fraction: float = 0.30
    se_table: tuple[float, ...] = CQI_EFFICIENCY
    calibrated_capacity_bps: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "se_table", tuple(float(v) for v in self.se_table))
        if not math.isfinite(self.gap_db):
            raise DomainError("gap_db must be finite")
        if not 0 <= self.overhead_fraction < 1:
            raise DomainError(f"overhead_fraction must be in [0, 1), got {self.overhead_fraction!r}")
        table = self.se_table
        if not table:
            raise DomainError("se_table must not be empty")
        if any(not (v > 0 and math.isfinite(v)) for v in table):
            raise DomainError("se_table entries must be finite and > 0")
        if any(b <= a for a, b in zip(table, table[1:])):
            raise DomainError("se_table must be strictly increasing")
        cap = self.calibrated_capacity_bps
        if cap is not None and not (math.isfinite(cap) and cap >= 0):
            raise DomainError(f"calibrated_capacity_bps must be >= 0, got {cap!r}")

    def analytic_capacity_bps(self, snr_db: float, bandwidth_hz: float) -> float:
        return link_capacity_bps(bandwidth_hz, spectral_efficiency(snr_db, self), self.overhead_fraction)

    def capacity_bps(self, snr_db: float, bandwidth_hz: float) -> float:
        if self.calibrated_capacity_bps is not None:
            return self.calibrated_capacity_bps
        return self.analytic_capacity_bps(snr_db, bandwidth_hz)


def raw_spectral_efficiency(snr_db: float, gap_db: float) -> float:
    """Gap-adjusted Shannon efficiency ``log2(1 + SNR / gap)``."""
    snr = 10.0 ** (snr_db / 10.0)
    gap = 10.0 ** (gap_db / 10.0)
    return math.log2(1.0 + snr / gap)


def spectral_efficiency(snr_db: float, model: CapacityModel) -> float:
    """Largest table efficiency not above the gap-adjusted Shannon value (0 if none)."""
    if math.isnan(snr_db):
        raise DomainError("snr_db is NaN")
    if snr_db == math.inf:
        return model.se_table[-1]
    raw = raw_spectral_efficiency(snr_db, model.gap_db)
    idx = bisect.bisect_right(model.se_table, raw)
    return model.se_table[idx - 1] if idx else 0.0


def link_capacity_bps(
    bandwidth_hz: float,
    se: float,
    overhead_fraction: float,
    calibrated_capacity_bps: float | None = None,
) -> float:
    """Application-layer serving rate ``B * SE * (1 - overhead)``."""
    if calibrated_capacity_bps is not None:
        return calibrated_capacity_bps
    if bandwidth_hz < 0 or se < 0:
        raise DomainError("bandwidth_hz and se must be >= 0")
    if not 0 <= overhead_fraction < 1:
        raise DomainError(f"overhead_fraction must be in [0, 1), got {overhead_fraction!r}")
    return bandwidth_hz * se * (1.0 - overhead_fraction)
