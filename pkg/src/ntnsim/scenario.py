"""Scenario configuration: presets, the flat ``key = value`` file format, resolution.

A configuration file is UTF-8 text with one ``key = value`` per line and ``#``
comments. Nested fields use dotted keys (``ue_antenna.boresight_gain_dbi``);
``capacity.se_table`` is a comma-separated list; optional fields accept
``none``. Required keys:

    carrier_freq_ghz, bandwidth_mhz, altitude_km, elevation_deg,
    sat_eirp_density_dbw_mhz, sat_antenna.boresight_gain_dbi,
    ue_antenna.boresight_gain_dbi, ue_noise_figure_db

Everything else has a default, listed in ``FIELDS``. ``numerology_mu``
defaults to 2 below 7.125 GHz (FR1) and 3 above (FR2).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Mapping

from . import geometry, phy
from .antenna import AntennaKind, AntennaSpec
from .errors import ConfigParseError, DomainError, SchemaError, ScenarioNotFoundError
from .linkbudget import LinkBudget, LossBreakdown, compute_budget

BUILTIN_IDS = ("sc1", "sc4", "sc6", "sc9")
FR1_UPPER_GHZ = 7.125
DEFAULT_BUFFER_BYTES = 1_000_000


@dataclass(frozen=True)
class ScenarioConfig:
    carrier_freq_ghz: float
    bandwidth_mhz: float
    altitude_km: float
    elevation_deg: float
    sat_eirp_density_dbw_mhz: float
    sat_antenna: AntennaSpec
    ue_antenna: AntennaSpec
    ue_noise_figure_db: float
    id: str = "custom"
    antenna_temp_k: float = 290.0
    losses: LossBreakdown = field(default_factory=LossBreakdown)
    numerology_mu: int | None = None
    capacity: phy.CapacityModel = field(default_factory=phy.CapacityModel)
    backhaul_delay_ms: float = 0.0
    buffer_bytes: int = DEFAULT_BUFFER_BYTES
    beam_diameter_km: float | None = None

    def __post_init__(self) -> None:
        if self.numerology_mu is None:
            mu = 2 if self.carrier_freq_ghz < FR1_UPPER_GHZ else 3
            object.__setattr__(self, "numerology_mu", mu)
        flat = _flatten(self)
        for spec in FIELDS:
            spec.validate(flat[spec.key])

    @property
    def geometry(self) -> geometry.OrbitGeometry:
        return geometry.OrbitGeometry(self.altitude_km, self.elevation_deg)


# -- schema ------------------------------------------------------------------

def _finite(v: Any) -> bool:
    return isinstance(v, (int, float)) and math.isfinite(v)


@dataclass(frozen=True)
class Field:
    key: str
    parse: Callable[[str], Any]
    required: bool = False
    default: Any = None
    check: Callable[[Any], bool] = _finite
    constraint: str = "must be a finite number"
    optional: bool = False  # accepts "none"

    def validate(self, value: Any) -> None:
        if value is None:
            if self.optional:
                return
            raise SchemaError(self.key, "is required", value)
        if not self.check(value):
            raise SchemaError(self.key, self.constraint, value)

    def format(self, value: Any) -> str:
        if value is None:
            return "none"
        if isinstance(value, AntennaKind):
            return value.value
        if isinstance(value, bool):
            return str(value)
        if isinstance(value, float):
            return repr(value)
        if isinstance(value, tuple):
            return ", ".join(repr(float(v)) for v in value)
        return str(value)


def _parse_float(text: str) -> float:
    return float(text)


def _parse_int(text: str) -> int:
    text = text.replace("_", "")
    try:
        return int(text)
    except ValueError:
        f = float(text)
        if not f.is_integer():
            raise
        return int(f)


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


def _parse_kind(text: str) -> AntennaKind:
    return AntennaKind(text)


def _parse_id(text: str) -> str:
    return text


def _positive(v: Any) -> bool:
    return _finite(v) and v > 0


def _non_negative(v: Any) -> bool:
    return _finite(v) and v >= 0


def _antenna_fields(prefix: str, default_kind: AntennaKind) -> list[Field]:
    return [
        Field(f"{prefix}.kind", _parse_kind, default=default_kind,
              check=lambda v: isinstance(v, AntennaKind),
              constraint="must be one of " + ", ".join(k.value for k in AntennaKind)),
        Field(f"{prefix}.boresight_gain_dbi", _parse_float, required=True),
        Field(f"{prefix}.diameter_m", _parse_float, optional=True, check=_positive, constraint="must be > 0"),
        Field(f"{prefix}.efficiency", _parse_float, default=0.6,
              check=lambda v: _finite(v) and 0 < v <= 1, constraint="must be in (0, 1]"),
    ]


def _strictly_increasing(v: Any) -> bool:
    return (
        isinstance(v, tuple)
        and len(v) > 0
        and all(_positive(x) for x in v)
        and all(b > a for a, b in zip(v, v[1:]))
    )


FIELDS: tuple[Field, ...] = (
    Field("id", _parse_id, default="custom",
          check=lambda v: isinstance(v, str) and re.fullmatch(r"[A-Za-z0-9_.-]+", v) is not None,
          constraint="must be a non-empty token of letters, digits, '_', '.', '-'"),
    Field("carrier_freq_ghz", _parse_float, required=True, check=_positive, constraint="must be > 0"),
    Field("bandwidth_mhz", _parse_float, required=True, check=_positive, constraint="must be > 0"),
    Field("altitude_km", _parse_float, required=True, check=_positive, constraint="must be > 0"),
    Field("elevation_deg", _parse_float, required=True,
          check=lambda v: _finite(v) and 0 < v <= 90, constraint="must be in (0, 90]"),
    Field("sat_eirp_density_dbw_mhz", _parse_float, required=True),
    *_antenna_fields("sat_antenna", AntennaKind.CIRCULAR_APERTURE),
    *_antenna_fields("ue_antenna", AntennaKind.UPA_ISOTROPIC),
    Field("ue_noise_figure_db", _parse_float, required=True, check=_non_negative, constraint="must be >= 0"),
    Field("antenna_temp_k", _parse_float, default=290.0, check=_positive, constraint="must be > 0"),
    Field("losses.atmospheric_db", _parse_float, default=0.0, check=_non_negative, constraint="must be >= 0"),
    Field("losses.scintillation_db", _parse_float, default=0.0, check=_non_negative, constraint="must be >= 0"),
    Field("losses.shadowing_db", _parse_float, default=0.0, check=_non_negative, constraint="must be >= 0"),
    Field("losses.additional_db", _parse_float, default=0.0, check=_non_negative, constraint="must be >= 0"),
    Field("numerology_mu", _parse_int, optional=True,
          check=lambda v: isinstance(v, int) and not isinstance(v, bool) and 0 <= v <= 4,
          constraint="must be an integer in 0..4"),
    Field("capacity.gap_db", _parse_float, default=6.0),
    Field("capacity.overhead_fraction", _parse_float, default=0.30,
          check=lambda v: _finite(v) and 0 <= v < 1, constraint="must be in [0, 1)"),
    Field("capacity.se_table", _parse_floats, default=phy.CQI_EFFICIENCY, check=_strictly_increasing,
          constraint="must be a non-empty, strictly increasing list of positive numbers"),
    Field("capacity.calibrated_capacity_bps", _parse_float, optional=True,
          check=_non_negative, constraint="must be >= 0"),
    Field("backhaul_delay_ms", _parse_float, default=0.0, check=_non_negative, constraint="must be >= 0"),
    Field("buffer_bytes", _parse_int, default=DEFAULT_BUFFER_BYTES,
          check=lambda v: isinstance(v, int) and not isinstance(v, bool) and v > 0,
          constraint="must be an integer > 0"),
    Field("beam_diameter_km", _parse_float, optional=True, check=_positive, constraint="must be > 0"),
)
FIELD_BY_KEY = {f.key: f for f in FIELDS}


def _flatten(cfg: ScenarioConfig) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for spec in FIELDS:
        obj: Any = cfg
        for part in spec.key.split("."):
            obj = getattr(obj, part)
        out[spec.key] = obj
    return out


def _build(values: Mapping[str, Any]) -> ScenarioConfig:
    for spec in FIELDS:
        spec.validate(values[spec.key])

    def antenna(prefix: str) -> AntennaSpec:
        return AntennaSpec(
            kind=values[f"{prefix}.kind"],
            boresight_gain_dbi=values[f"{prefix}.boresight_gain_dbi"],
            diameter_m=values[f"{prefix}.diameter_m"],
            efficiency=values[f"{prefix}.efficiency"],
        )

    return ScenarioConfig(
        id=values["id"],
        carrier_freq_ghz=values["carrier_freq_ghz"],
        bandwidth_mhz=values["bandwidth_mhz"],
        altitude_km=values["altitude_km"],
        elevation_deg=values["elevation_deg"],
        sat_eirp_density_dbw_mhz=values["sat_eirp_density_dbw_mhz"],
        sat_antenna=antenna("sat_antenna"),
        ue_antenna=antenna("ue_antenna"),
        ue_noise_figure_db=values["ue_noise_figure_db"],
        antenna_temp_k=values["antenna_temp_k"],
        losses=LossBreakdown(
            atmospheric_db=values["losses.atmospheric_db"],
            scintillation_db=values["losses.scintillation_db"],
            shadowing_db=values["losses.shadowing_db"],
            additional_db=values["losses.additional_db"],
        ),
        numerology_mu=values["numerology_mu"],
        capacity=phy.CapacityModel(
            gap_db=values["capacity.gap_db"],
            overhead_fraction=values["capacity.overhead_fraction"],
            se_table=values["capacity.se_table"],
            calibrated_capacity_bps=values["capacity.calibrated_capacity_bps"],
        ),
        backhaul_delay_ms=values["backhaul_delay_ms"],
        buffer_bytes=values["buffer_bytes"],
        beam_diameter_km=values["beam_diameter_km"],
    )


# -- text format ---------------------------------------------------------------

def parse_text(text: str, source: str | None = None) -> dict[str, tuple[str, int]]:
    """Split a config file into ``{key: (raw value, line number)}``."""
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"expected 'key = value', got {raw.strip()!r}", lineno, source)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigParseError("missing key before '='", lineno, source)
        if key not in FIELD_BY_KEY:
            raise ConfigParseError(f"unknown key {key!r}", lineno, source)
        if key in entries:
            raise ConfigParseError(f"duplicate key {key!r} (first set on line {entries[key][1]})", lineno, source)
        entries[key] = (value, lineno)
    return entries


def parse_overrides(items: list[str] | tuple[str, ...]) -> dict[str, str]:
    """Turn ``["k=v", ...]`` into a dict; unknown keys raise :class:`SchemaError`."""
    out: dict[str, str] = {}
    for item in items:
        if "=" not in item:
            raise ConfigParseError(f"override {item!r} is not of the form key=value", source="--set")
        key, value = (part.strip() for part in item.split("=", 1))
        if key not in FIELD_BY_KEY:
            raise SchemaError(key, "is not a known configuration key", value)
        out[key] = value
    return out


def _convert(key: str, raw: str, line: int | None, source: str | None) -> Any:
    spec = FIELD_BY_KEY[key]
    if raw.lower() == "none":
        if spec.optional:
            return None
        raise SchemaError(key, "is not optional", raw)
    if raw == "":
        raise ConfigParseError(f"empty value for {key!r}", line, source)
    try:
        return spec.parse(raw)
    except ValueError:
        raise ConfigParseError(f"cannot parse value {raw!r} for {key!r}", line, source) from None


def from_text(text: str, source: str | None = None, overrides: Mapping[str, str] | None = None) -> ScenarioConfig:
    entries = parse_text(text, source)
    values: dict[str, Any] = {}
    for spec in FIELDS:
        if spec.key in entries:
            raw, line = entries[spec.key]
            values[spec.key] = _convert(spec.key, raw, line, source)
        elif spec.required:
            values[spec.key] = None
        else:
            values[spec.key] = spec.default
    for key, raw in (overrides or {}).items():
        values[key] = _convert(key, raw, None, "--set")
    return _build(values)


def dumps(cfg: ScenarioConfig) -> str:
    """Serialise every field; ``from_text(dumps(c)) == c``."""
    flat = _flatten(cfg)
    lines = [f"{spec.key} = {spec.format(flat[spec.key])}" for spec in FIELDS]
    return "\n".join(lines) + "\n"


def save(cfg: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(dumps(cfg), encoding="utf-8")


def load(path: str | Path, overrides: Mapping[str, str] | None = None) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ConfigParseError(f"not valid UTF-8: {exc}", source=str(path)) from None
    return from_text(text, source=str(path), overrides=overrides)


def with_overrides(cfg: ScenarioConfig, overrides: Mapping[str, str]) -> ScenarioConfig:
    """Apply string overrides exactly as if they had been written in the file."""
    return from_text(dumps(cfg), source=f"<{cfg.id}>", overrides=overrides)


def builtin_path(scenario_id: str) -> Path:
    if scenario_id not in BUILTIN_IDS:
        raise ScenarioNotFoundError(
            f"unknown scenario {scenario_id!r}; built-ins are {', '.join(BUILTIN_IDS)}"
        )
    return Path(str(resources.files("ntnsim") / "scenarios" / f"{scenario_id}.cfg"))


def builtin(scenario_id: str, overrides: Mapping[str, str] | None = None) -> ScenarioConfig:
    """Load one of the shipped calibration presets."""
    return load(builtin_path(scenario_id), overrides)


def get(name: str, overrides: Mapping[str, str] | None = None) -> ScenarioConfig:
    """A preset id, or else a path to a config file."""
    if name in BUILTIN_IDS:
        return builtin(name, overrides)
    path = Path(name)
    if not path.is_file():
        raise ScenarioNotFoundError(f"no built-in scenario or config file named {name!r}")
    return load(path, overrides)


# -- resolution ----------------------------------------------------------------

@dataclass(frozen=True)
class ResolvedScenario:
    config: ScenarioConfig
    budget: LinkBudget
    capacity_bps: float
    propagation_delay_s: float
    backhaul_delay_s: float
    one_way_delay_s: float
    slot_duration_s: float

    @property
    def id(self) -> str:
        return self.config.id


def resolve(config: ScenarioConfig) -> ResolvedScenario:
    """Derive the link budget, capacity and delays for a configuration."""
    d_km = geometry.slant_range(config.geometry)
    budget = compute_budget(
        slant_range_km=d_km,
        carrier_freq_ghz=config.carrier_freq_ghz,
        bandwidth_mhz=config.bandwidth_mhz,
        eirp_density_dbw_mhz=config.sat_eirp_density_dbw_mhz,
        ue_gain_dbi=config.ue_antenna.boresight_gain_dbi,
        noise_figure_db=config.ue_noise_figure_db,
        antenna_temp_k=config.antenna_temp_k,
        losses=config.losses,
    )
    prop = geometry.propagation_delay(d_km)
    backhaul = config.backhaul_delay_ms / 1e3
    mu = config.numerology_mu
    if mu is None:  # pragma: no cover - filled in by ScenarioConfig
        raise DomainError("numerology_mu unresolved")
    return ResolvedScenario(
        config=config,
        budget=budget,
        capacity_bps=config.capacity.capacity_bps(budget.snr_db, budget.bandwidth_hz),
        propagation_delay_s=prop,
        backhaul_delay_s=backhaul,
        one_way_delay_s=prop + backhaul,
        slot_duration_s=phy.slot_duration(mu) / 1e3,
    )
