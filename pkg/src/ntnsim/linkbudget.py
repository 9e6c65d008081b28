"""Downlink budget: FSPL, noise temperature, G/T and SNR in dB arithmetic."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace

from .errors import DomainError

BOLTZMANN_DBW_K_HZ = -228.6
REFERENCE_TEMP_K = 290.0


@dataclass(frozen=True)
class LossBreakdown:
    """Path-loss components in dB. All must be non-negative."""

    fspl_db: float = 0.0
    atmospheric_db: float = 0.0
    scintillation_db: float = 0.0
    shadowing_db: float = 0.0
    additional_db: float = 0.0

    def __post_init__(self) -> None:
        for name in ("fspl_db", "atmospheric_db", "scintillation_db", "shadowing_db", "additional_db"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be a finite value >= 0, got {value!r}")

    @property
    def total_db(self) -> float:
        return (
            self.fspl_db
            + self.atmospheric_db
            + self.scintillation_db
            + self.shadowing_db
            + self.additional_db
        )

    @property
    def excess_db(self) -> float:
        """Everything except free-space loss."""
        return self.total_db - self.fspl_db


def fspl_db(distance_km: float, freq_ghz: float) -> float:
    """Free-space path loss (Friis) for a distance in km and frequency in GHz."""
    if not (distance_km > 0 and freq_ghz > 0):
        raise DomainError("distance_km and freq_ghz must be > 0")
    return 20.0 * math.log10(distance_km) + 20.0 * math.log10(freq_ghz) + 92.45


def total_eirp_dbw(eirp_density_dbw_mhz: float, bandwidth_mhz: float) -> float:
    """Carrier EIRP from a per-MHz density."""
    if not bandwidth_mhz > 0:
        raise DomainError(f"bandwidth_mhz must be > 0, got {bandwidth_mhz!r}")
    return eirp_density_dbw_mhz + 10.0 * math.log10(bandwidth_mhz)


def system_noise_temp_k(noise_figure_db: float, antenna_temp_k: float) -> float:
    """Antenna temperature plus receiver noise referred to the input."""
    if not noise_figure_db >= 0:
        raise DomainError(f"noise_figure_db must be >= 0, got {noise_figure_db!r}")
    if not antenna_temp_k > 0:
        raise DomainError(f"antenna_temp_k must be > 0, got {antenna_temp_k!r}")
    return antenna_temp_k + REFERENCE_TEMP_K * (10.0 ** (noise_figure_db / 10.0) - 1.0)


def g_over_t_dbk(gain_dbi: float, system_temp_k: float) -> float:
    if not system_temp_k > 0:
        raise DomainError(f"system_temp_k must be > 0, got {system_temp_k!r}")
    return gain_dbi - 10.0 * math.log10(system_temp_k)


def snr_db(eirp_dbw: float, g_over_t: float, path_loss_db: float, bandwidth_hz: float) -> float:
    """SNR = EIRP + G/T - k - PL - 10 log10(B)."""
    for name, value in (("eirp_dbw", eirp_dbw), ("g_over_t", g_over_t), ("path_loss_db", path_loss_db)):
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value!r}")
    if not bandwidth_hz > 0:
        raise DomainError(f"bandwidth_hz must be > 0, got {bandwidth_hz!r}")
    return eirp_dbw + g_over_t - BOLTZMANN_DBW_K_HZ - path_loss_db - 10.0 * math.log10(bandwidth_hz)


@dataclass(frozen=True)
class LinkBudget:
    slant_range_km: float
    fspl_db: float
    total_pl_db: float
    g_over_t_dbk: float
    eirp_total_dbw: float
    snr_db: float
    bandwidth_hz: float
    losses: LossBreakdown = field(default_factory=LossBreakdown)
    system_temp_k: float = math.nan
    ue_gain_dbi: float = math.nan

    @property
    def snr_linear(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)

    def recompute_snr_db(self) -> float:
        return snr_db(self.eirp_total_dbw, self.g_over_t_dbk, self.total_pl_db, self.bandwidth_hz)


def compute_budget(
    *,
    slant_range_km: float,
    carrier_freq_ghz: float,
    bandwidth_mhz: float,
    eirp_density_dbw_mhz: float,
    ue_gain_dbi: float,
    noise_figure_db: float,
    antenna_temp_k: float,
    losses: LossBreakdown,
) -> LinkBudget:
    """Assemble a :class:`LinkBudget`. ``losses.fspl_db`` is replaced by the computed FSPL."""
    fspl = fspl_db(slant_range_km, carrier_freq_ghz)
    full = replace(losses, fspl_db=fspl)
    eirp = total_eirp_dbw(eirp_density_dbw_mhz, bandwidth_mhz)
    temp = system_noise_temp_k(noise_figure_db, antenna_temp_k)
    gt = g_over_t_dbk(ue_gain_dbi, temp)
    bw_hz = bandwidth_mhz * 1e6
    return LinkBudget(
        slant_range_km=slant_range_km,
        fspl_db=fspl,
        total_pl_db=full.total_db,
        g_over_t_dbk=gt,
        eirp_total_dbw=eirp,
        snr_db=snr_db(eirp, gt, full.total_db, bw_hz),
        bandwidth_hz=bw_hz,
        losses=full,
        system_temp_k=temp,
        ue_gain_dbi=ue_gain_dbi,
    )


def budget_rows(budget: LinkBudget) -> list[tuple[str, float, str]]:
    """(component, value, unit) rows for the printable budget table."""
    lb = budget.losses
    bw_db = 10.0 * math.log10(budget.bandwidth_hz)
    return [
        ("slant_range", budget.slant_range_km, "km"),
        ("eirp_total", budget.eirp_total_dbw, "dBW"),
        ("ue_gain", budget.ue_gain_dbi, "dBi"),
        ("system_temp", budget.system_temp_k, "K"),
        ("g_over_t", budget.g_over_t_dbk, "dB/K"),
        ("boltzmann", BOLTZMANN_DBW_K_HZ, "dBW/K/Hz"),
        ("fspl", lb.fspl_db, "dB"),
        ("atmospheric", lb.atmospheric_db, "dB"),
        ("scintillation", lb.scintillation_db, "dB"),
        ("shadowing", lb.shadowing_db, "dB"),
        ("additional", lb.additional_db, "dB"),
        ("total_path_loss", budget.total_pl_db, "dB"),
        ("bandwidth", bw_db, "dBHz"),
        ("snr", budget.snr_db, "dB"),
    ]


def format_budget(budget: LinkBudget, title: str | None = None) -> str:
    lines = []
    if title:
        lines.append(title)
    for name, value, unit in budget_rows(budget):
        lines.append(f"  {name:<18}{value:>12.3f}  {unit}")
    return "\n".join(lines) + "\n"


def budget_csv(budget: LinkBudget) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["component", "value", "unit"])
    for name, value, unit in budget_rows(budget):
        writer.writerow([name, repr(float(value)), unit])
    return buf.getvalue()
