"""Core domain types: indicators, station records, climate labels, feature regimes.

All types here are immutable value objects and safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .errors import UnknownClimate


class Indicator(Enum):
    """The four field-result water quality indicators.

    Enum order is the canonical indicator order used everywhere a fixed
    ordering is needed (feature assembly, report columns).
    """

    PH = ("pH", "pH Units", "ph")
    DISSOLVED_OXYGEN = ("DissolvedOxygen", "mg/L", "do")
    SPECIFIC_CONDUCTANCE = ("SpecificConductance", "µS/cm@25°C", "sc")
    WATER_TEMPERATURE = ("WaterTemperature", "°C", "wt")

    @property
    def column(self) -> str:
        """Default CSV column name."""
        return self.value[0]

    @property
    def unit(self) -> str:
        return self.value[1]

    @property
    def short(self) -> str:
        """Two-letter code used on the command line."""
        return self.value[2]

    @classmethod
    def from_short(cls, code: str) -> "Indicator":
        for ind in cls:
            if ind.short == code.lower():
                return ind
        raise ValueError(f"unknown indicator code {code!r} (expected one of ph, do, sc, wt)")


#: The nine sub-climates occurring in California, in their conventional order.
SUB_CLIMATES = ("BWh", "BWk", "BSh", "BSk", "Csa", "Csb", "Dsa", "Dsb", "Dsc")

#: Major climate classes present in California.
MAJOR_CLIMATES = ("B", "C", "D")


class KoppenClass(Enum):
    """Köppen sub-climate label restricted to the nine California classes."""

    BWH = "BWh"
    BWK = "BWk"
    BSH = "BSh"
    BSK = "BSk"
    CSA = "Csa"
    CSB = "Csb"
    DSA = "Dsa"
    DSB = "Dsb"
    DSC = "Dsc"

    @property
    def sub(self) -> str:
        return self.value

    @property
    def major(self) -> str:
        """Major class letter, always the first letter of the sub code."""
        return self.value[0]

    @classmethod
    def from_code(cls, code: str) -> "KoppenClass":
        for member in cls:
            if member.value == code:
                return member
        raise UnknownClimate(f"climate code {code!r} is not one of the nine California sub-climates")


def major_of(sub: str) -> str:
    """Major class letter for one of the nine sub-climate codes.

    Raises UnknownClimate for any other code.
    """
    return KoppenClass.from_code(sub).major


class GeoType(Enum):
    """Coastal/Inland station label (<= 8 km great-circle distance to the coastline)."""

    INLAND = "Inland"
    COASTAL = "Coastal"

    @classmethod
    def from_name(cls, name: str) -> "GeoType":
        for member in cls:
            if member.value.lower() == name.lower():
                return member
        raise ValueError(f"unknown geographical type {name!r}")


@dataclass(frozen=True, slots=True)
class SampleRecord:
    """One station-month observation with optional derived labels.

    climate_zone and geographical_type stay None until geo-derivation; a
    record is "enriched" once both are set, which feature assembly under the
    variable-dependent regime requires.
    """

    station_id: int
    latitude: float
    longitude: float
    county: str
    year: int
    month: int
    ph: float
    dissolved_oxygen: float
    specific_conductance: float
    water_temperature: float
    climate_zone: KoppenClass | None = None
    geographical_type: GeoType | None = None

    def __post_init__(self):
        if self.station_id <= 0:
            raise ValueError(f"station_id must be positive, got {self.station_id}")
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} outside [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude {self.longitude} outside [-180, 180]")
        if not 1 <= self.month <= 12:
            raise ValueError(f"month {self.month} outside [1, 12]")
        for ind in Indicator:
            v = self.value_of(ind)
            if not math.isfinite(v):
                raise ValueError(f"{ind.column} is not finite: {v}")

    def value_of(self, indicator: Indicator) -> float:
        if indicator is Indicator.PH:
            return self.ph
        if indicator is Indicator.DISSOLVED_OXYGEN:
            return self.dissolved_oxygen
        if indicator is Indicator.SPECIFIC_CONDUCTANCE:
            return self.specific_conductance
        return self.water_temperature

    @property
    def enriched(self) -> bool:
        return self.climate_zone is not None and self.geographical_type is not None

    def with_labels(self, climate_zone: KoppenClass, geographical_type: GeoType) -> "SampleRecord":
        return replace(self, climate_zone=climate_zone, geographical_type=geographical_type)

    def with_station_id(self, station_id: int) -> "SampleRecord":
        return replace(self, station_id=station_id)


class RegimeKind(Enum):
    """Feature regime: spatio-temporal only, or variable-dependent."""

    SPATIO_TEMPORAL = "st"
    VARIABLE_DEPENDENT = "vd"


class ClimateEncoding(Enum):
    """How the climate label enters the variable-dependent feature set."""

    MAJOR = "major"
    SUB = "sub"
    NONE = "none"


@dataclass(frozen=True, slots=True)
class FeatureRegime:
    """Feature-set selection for one target indicator.

    SPATIO_TEMPORAL uses exactly (month, year, latitude, longitude).
    VARIABLE_DEPENDENT adds the three non-target indicators plus the two
    categorical labels (climate zone per `climate_encoding`, geo type).
    """

    kind: RegimeKind
    target: Indicator
    climate_encoding: ClimateEncoding = ClimateEncoding.MAJOR

    @property
    def climate_levels(self) -> tuple[str, ...]:
        if self.climate_encoding is ClimateEncoding.MAJOR:
            return MAJOR_CLIMATES
        if self.climate_encoding is ClimateEncoding.SUB:
            return SUB_CLIMATES
        return ()

    @property
    def expected_width(self) -> int:
        """Number of design-matrix columns this regime produces."""
        if self.kind is RegimeKind.SPATIO_TEMPORAL:
            return 4
        return 7 + len(self.climate_levels) + 2


# --- canonical CSV row format -------------------------------------------------

#: Default column names of the station-record CSV schema.
CSV_COLUMNS = (
    "StationID",
    "Latitude",
    "Longitude",
    "County",
    "Year",
    "Month",
    "pH",
    "DissolvedOxygen",
    "SpecificConductance",
    "WaterTemperature",
)

#: Optional label columns appended once records are enriched.
LABEL_COLUMNS = ("ClimateZone", "GeographicalType")


def fmt_float(x) -> str:
    # repr of the Python float gives the shortest string that round-trips
    # bit-exactly (numpy scalars repr as np.float64(...), so coerce first)
    return repr(float(x))


_fmt = fmt_float


def record_to_row(rec: SampleRecord, labelled: bool = False) -> list[str]:
    """Serialize a record to the external CSV row format (see CSV_COLUMNS)."""
    row = [
        str(rec.station_id),
        _fmt(rec.latitude),
        _fmt(rec.longitude),
        rec.county,
        str(rec.year),
        str(rec.month),
        _fmt(rec.ph),
        _fmt(rec.dissolved_oxygen),
        _fmt(rec.specific_conductance),
        _fmt(rec.water_temperature),
    ]
    if labelled:
        row.append(rec.climate_zone.sub if rec.climate_zone is not None else "")
        row.append(rec.geographical_type.value if rec.geographical_type is not None else "")
    return row


def record_from_row(row: list[str], labelled: bool = False) -> SampleRecord:
    """Parse a row produced by record_to_row; inverse up to bit-equal floats."""
    climate = None
    geotype = None
    if labelled:
        if row[10]:
            climate = KoppenClass.from_code(row[10])
        if row[11]:
            geotype = GeoType.from_name(row[11])
    return SampleRecord(
        station_id=int(row[0]),
        latitude=float(row[1]),
        longitude=float(row[2]),
        county=row[3],
        year=int(row[4]),
        month=int(row[5]),
        ph=float(row[6]),
        dissolved_oxygen=float(row[7]),
        specific_conductance=float(row[8]),
        water_temperature=float(row[9]),
        climate_zone=climate,
        geographical_type=geotype,
    )
