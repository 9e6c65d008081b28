"""Sweep reports, calibration checks against the 3GPP reference values, CSV I/O."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from .engine import RunMetrics
from .errors import DomainError
from .scenario import ResolvedScenario

CSV_HEADER = (
    "scenario",
    "rate_mbps",
    "throughput_mbps",
    "pdr",
    "latency_mean_ms",
    "latency_p95_ms",
    "dropped",
    "generated",
)

FSPL_TOLERANCE_DB = 0.05
SNR_TOLERANCE_DB = 0.3


@dataclass(frozen=True)
class CalibrationTarget:
    fspl_db: float
    snr_db: float


# Downlink FSPL / SNR of the 3GPP NTN calibration scenarios.
CALIBRATION_TARGETS = {
    "sc9": CalibrationTarget(fspl_db=159.1, snr_db=6.6),
    "sc6": CalibrationTarget(fspl_db=179.1, snr_db=8.5),
    "sc4": CalibrationTarget(fspl_db=190.6, snr_db=0.0),
    "sc1": CalibrationTarget(fspl_db=210.6, snr_db=11.6),
}


def area_capacity_density(capacity_bps: float, footprint_area_km2: float) -> float:
    """Capacity per unit of illuminated area, in bit/s per km^2."""
    if not footprint_area_km2 > 0:
        raise DomainError(f"footprint area must be > 0, got {footprint_area_km2!r}")
    if not capacity_bps >= 0:
        raise DomainError(f"capacity must be >= 0, got {capacity_bps!r}")
    return capacity_bps / footprint_area_km2


@dataclass(frozen=True)
class Check:
    quantity: str
    computed: float
    expected: float
    tolerance: float

    @property
    def delta(self) -> float:
        return self.computed - self.expected

    @property
    def passed(self) -> bool:
        return abs(self.delta) <= self.tolerance


@dataclass(frozen=True)
class CalibrationReport:
    scenario_id: str
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, quantity: str) -> Check:
        for c in self.checks:
            if c.quantity == quantity:
                return c
        raise KeyError(quantity)

    def line(self) -> str:
        """One summary line: verdict, then computed/target/delta per quantity."""
        parts = [f"{self.scenario_id:<6}", "PASS" if self.passed else "FAIL"]
        for c in self.checks:
            mark = "" if c.passed else "!"
            parts.append(
                f"{c.quantity} {c.computed:.3f} dB (target {c.expected:.1f}, delta {c.delta:+.3f}, tol {c.tolerance}){mark}"
            )
        return "  ".join(parts)


def validate_calibration(resolved: ResolvedScenario) -> CalibrationReport:
    """Compare a resolved preset against its reference FSPL and SNR."""
    target = CALIBRATION_TARGETS.get(resolved.id)
    if target is None:
        raise DomainError(
            f"no calibration target for scenario {resolved.id!r}; known: {', '.join(CALIBRATION_TARGETS)}"
        )
    checks = (
        Check("FSPL", resolved.budget.fspl_db, target.fspl_db, FSPL_TOLERANCE_DB),
        Check("SNR", resolved.budget.snr_db, target.snr_db, SNR_TOLERANCE_DB),
    )
    return CalibrationReport(resolved.id, checks)


@dataclass(frozen=True)
class SweepRow:
    rate_mbps: float
    throughput_mbps: float
    pdr: float
    latency_mean_ms: float
    latency_p95_ms: float
    dropped: int
    generated: int


@dataclass(frozen=True)
class SweepReport:
    scenario_id: str
    rows: tuple[SweepRow, ...]

    def __post_init__(self) -> None:
        rates = [r.rate_mbps for r in self.rows]
        if rates != sorted(rates):
            raise ValueError("sweep rows must be sorted by rate")
        for row in self.rows:
            values = (row.rate_mbps, row.throughput_mbps, row.pdr, row.latency_mean_ms, row.latency_p95_ms)
            if not all(math.isfinite(v) for v in values):
                raise ValueError(f"non-finite value in sweep row {row}")

    @classmethod
    def from_sweep(cls, scenario_id: str, results: Iterable[tuple[float, RunMetrics]]) -> SweepReport:
        rows = [
            SweepRow(
                rate_mbps=rate / 1e6,
                throughput_mbps=m.throughput_bps / 1e6,
                pdr=m.pdr,
                latency_mean_ms=m.latency_ms.mean,
                latency_p95_ms=m.latency_ms.p95,
                dropped=m.dropped_count,
                generated=m.generated_count,
            )
            for rate, m in results
        ]
        rows.sort(key=lambda r: r.rate_mbps)
        return cls(scenario_id, tuple(rows))


def _fmt(value: float | int) -> str:
    if isinstance(value, int):
        return str(value)
    # repr round-trips exactly and never uses thousands separators
    return repr(float(value))


def write_rows(reports: Sequence[SweepReport], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for report in reports:
        for row in report.rows:
            writer.writerow(
                [
                    report.scenario_id,
                    _fmt(row.rate_mbps),
                    _fmt(row.throughput_mbps),
                    _fmt(row.pdr),
                    _fmt(row.latency_mean_ms),
                    _fmt(row.latency_p95_ms),
                    _fmt(row.dropped),
                    _fmt(row.generated),
                ]
            )


def write_csv(report: SweepReport | Sequence[SweepReport], path: str | Path) -> None:
    """Write one or more sweep reports, grouped by scenario, rate-sorted within each."""
    reports = [report] if isinstance(report, SweepReport) else list(report)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            write_rows(reports, fh)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write CSV to {path}: {exc.strerror}", str(path)) from exc


def read_csv(path: str | Path) -> list[SweepReport]:
    """Parse a file written by :func:`write_csv` back into reports."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        grouped: dict[str, list[SweepRow]] = {}
        for rec in reader:
            grouped.setdefault(rec[0], []).append(
                SweepRow(
                    rate_mbps=float(rec[1]),
                    throughput_mbps=float(rec[2]),
                    pdr=float(rec[3]),
                    latency_mean_ms=float(rec[4]),
                    latency_p95_ms=float(rec[5]),
                    dropped=int(rec[6]),
                    generated=int(rec[7]),
                )
            )
    return [SweepReport(sid, tuple(rows)) for sid, rows in grouped.items()]


def format_sweep(report: SweepReport) -> str:
    lines = [
        f"scenario {report.scenario_id}",
        f"  {'R [Mbps]':>9} {'thr [Mbps]':>11} {'PDR':>7} {'lat mean [ms]':>14} {'lat p95 [ms]':>13}",
    ]
    for r in report.rows:
        lines.append(
            f"  {r.rate_mbps:9.1f} {r.throughput_mbps:11.3f} {r.pdr:7.4f} {r.latency_mean_ms:14.3f} {r.latency_p95_ms:13.3f}"
        )
    return "\n".join(lines) + "\n"
