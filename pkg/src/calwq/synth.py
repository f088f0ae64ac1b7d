"""Synthetic station data with documented closed-form ground truth.

Stands in for the real monitoring dataset, which cannot be redistributed.
Every indicator follows the same truth family

    value = intercept + lat_slope*lat + season_amp*sin(2*pi*(month-7)/12)
          + year_slope*(year-2000) + coast_amp*exp(-coast_km/coast_scale)
          - wt_coupling*WT_sample + noise

where WT_sample is the water temperature actually drawn for that record
(truth plus its noise). Coupling to the sampled rather than the noiseless
temperature is what gives the variable-dependent regime real headroom: the
measured temperature carries information no spatio-temporal feature has.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InvalidSpec
from .geo import ClimateRaster, Coastline, enrich_records, haversine_km_many
from .ingest import write_records_csv
from .preprocess import Dataset
from .products import RegionPolygon
from .records import Indicator, SampleRecord

#: (lat_min, lat_max, lon_min, lon_max) covering the study region.
DEFAULT_BBOX = (32.0, 42.5, -125.0, -114.0)

#: Rough coastline running the length of the bbox, (lon, lat) north to south.
DEFAULT_COASTLINE = (
    (-124.4, 42.0),
    (-123.8, 39.5),
    (-122.5, 37.8),
    (-120.6, 34.6),
    (-118.3, 33.8),
    (-117.1, 32.5),
)

#: Region polygon in (lon, lat), a simplified state outline inside the bbox.
DEFAULT_REGION = (
    (-124.5, 42.2),
    (-120.0, 42.2),
    (-120.0, 39.0),
    (-114.2, 35.0),
    (-114.2, 32.3),
    (-117.2, 32.3),
    (-120.8, 34.4),
    (-124.5, 40.2),
)


@dataclass(frozen=True)
class IndicatorParams:
    """Closed-form truth parameters for one indicator."""

    intercept: float
    lat_slope: float = 0.0
    season_amp: float = 0.0
    year_slope: float = 0.0
    coast_amp: float = 0.0
    coast_scale: float = 25.0
    wt_coupling: float = 0.0
    noise_sd: float = 0.0


DEFAULT_PARAMS: dict[Indicator, IndicatorParams] = {
    Indicator.WATER_TEMPERATURE: IndicatorParams(
        intercept=35.0, lat_slope=-0.7, season_amp=5.0, year_slope=0.02, noise_sd=1.0
    ),
    Indicator.DISSOLVED_OXYGEN: IndicatorParams(
        intercept=11.5, wt_coupling=0.25, noise_sd=0.35
    ),
    Indicator.PH: IndicatorParams(intercept=7.8, season_amp=0.3, noise_sd=0.12),
    Indicator.SPECIFIC_CONDUCTANCE: IndicatorParams(
        intercept=250.0, coast_amp=1500.0, coast_scale=25.0, noise_sd=35.0
    ),
}


@dataclass(frozen=True)
class SynthSpec:
    n_stations: int = 500
    samples_per_station: int = 100
    year_lo: int = 1975
    year_hi: int = 2022
    bbox: tuple[float, float, float, float] = DEFAULT_BBOX
    params: dict[Indicator, IndicatorParams] = field(default_factory=lambda: dict(DEFAULT_PARAMS))
    seed: int = 0
    coastline: tuple[tuple[float, float], ...] = DEFAULT_COASTLINE
    region: tuple[tuple[float, float], ...] = DEFAULT_REGION
    raster_cellsize: float = 0.5

    def validate(self) -> None:
        if self.n_stations < 1:
            raise InvalidSpec(f"n_stations must be >= 1, got {self.n_stations}")
        if self.samples_per_station < 1:
            raise InvalidSpec(f"samples_per_station must be >= 1, got {self.samples_per_station}")
        if self.year_hi < self.year_lo:
            raise InvalidSpec(f"year range [{self.year_lo}, {self.year_hi}] is empty")
        lat_min, lat_max, lon_min, lon_max = self.bbox
        if lat_max <= lat_min or lon_max <= lon_min:
            raise InvalidSpec(f"degenerate bbox {self.bbox}")
        for ind in Indicator:
            if ind not in self.params:
                raise InvalidSpec(f"missing params for {ind.column}")
            if self.params[ind].noise_sd < 0:
                raise InvalidSpec(f"negative noise sd for {ind.column}")
            if self.params[ind].coast_scale <= 0:
                raise InvalidSpec(f"coast_scale must be positive for {ind.column}")


def _season(month):
    return np.sin(2.0 * np.pi * (np.asarray(month, dtype=float) - 7.0) / 12.0)


class Truth:
    """Deterministic ground truth, evaluable for any indicator at any point."""

    def __init__(self, spec: SynthSpec, coast: Coastline):
        self.spec = spec
        self.coast = coast

    def coast_km(self, lat, lon):
        lat = np.atleast_1d(np.asarray(lat, dtype=float))
        lon = np.atleast_1d(np.asarray(lon, dtype=float))
        dense = self.coast.densified()
        out = np.empty(len(lat))
        for i in range(len(lat)):
            out[i] = haversine_km_many(lat[i], lon[i], dense[:, 0], dense[:, 1]).min()
        return out

    def __call__(self, indicator: Indicator, lat, lon, year, month) -> np.ndarray:
        p = self.spec.params[indicator]
        lat = np.atleast_1d(np.asarray(lat, dtype=float))
        year = np.asarray(year, dtype=float)
        value = (
            p.intercept
            + p.lat_slope * lat
            + p.season_amp * _season(month)
            + p.year_slope * (year - 2000.0)
        )
        if p.coast_amp != 0.0:
            value = value + p.coast_amp * np.exp(-self.coast_km(lat, lon) / p.coast_scale)
        if p.wt_coupling != 0.0:
            value = value - p.wt_coupling * self(
                Indicator.WATER_TEMPERATURE, lat, lon, year, month
            )
        return value


def generate(spec: SynthSpec | None = None) -> tuple[Dataset, Truth]:
    """Draw the synthetic dataset; returns enriched records plus the truth.

    Stations are placed uniformly inside the region polygon; each station's
    samples come from an independent stream derived from (seed, station
    index), so generation parallelizes without changing output.
    """
    if spec is None:
        spec = SynthSpec()
    spec.validate()
    coast = Coastline(np.array(spec.coastline, dtype=float))
    region = RegionPolygon(np.array(spec.region, dtype=float))
    truth = Truth(spec, coast)

    lat_min, lat_max, lon_min, lon_max = spec.bbox
    placer = np.random.default_rng([spec.seed, 0xC0A57])
    lats = np.empty(spec.n_stations)
    lons = np.empty(spec.n_stations)
    placed = 0
    while placed < spec.n_stations:
        cand_lat = placer.uniform(lat_min, lat_max, size=4 * spec.n_stations)
        cand_lon = placer.uniform(lon_min, lon_max, size=4 * spec.n_stations)
        ok = region.contains_many(cand_lat, cand_lon)
        take = min(int(ok.sum()), spec.n_stations - placed)
        lats[placed : placed + take] = cand_lat[ok][:take]
        lons[placed : placed + take] = cand_lon[ok][:take]
        placed += take
    lats = np.round(lats, 4)
    lons = np.round(lons, 4)

    wt = spec.params[Indicator.WATER_TEMPERATURE]
    county_names = ("Alameda", "Fresno", "Humboldt", "Kern", "Lassen", "Marin",
                    "Monterey", "Riverside", "Shasta", "Yolo")

    records: list[SampleRecord] = []
    for s in range(spec.n_stations):
        rng = np.random.default_rng([spec.seed, 1, s])
        n = spec.samples_per_station
        years = rng.integers(spec.year_lo, spec.year_hi + 1, size=n)
        months = rng.integers(1, 13, size=n)
        county = county_names[s % len(county_names)]

        wt_true = truth(Indicator.WATER_TEMPERATURE, lats[s], lons[s], years, months)
        wt_sample = wt_true + wt.noise_sd * rng.standard_normal(n)
        values: dict[Indicator, np.ndarray] = {Indicator.WATER_TEMPERATURE: wt_sample}
        for ind in (Indicator.PH, Indicator.DISSOLVED_OXYGEN, Indicator.SPECIFIC_CONDUCTANCE):
            p = spec.params[ind]
            base = truth(ind, lats[s], lons[s], years, months)
            if p.wt_coupling != 0.0:
                # couple through the sampled temperature, not the noiseless one
                base = base + p.wt_coupling * (wt_true - wt_sample)
            values[ind] = base + p.noise_sd * rng.standard_normal(n)

        for i in range(n):
            records.append(
                SampleRecord(
                    station_id=s + 1,
                    latitude=float(lats[s]),
                    longitude=float(lons[s]),
                    county=county,
                    year=int(years[i]),
                    month=int(months[i]),
                    ph=float(values[Indicator.PH][i]),
                    dissolved_oxygen=float(values[Indicator.DISSOLVED_OXYGEN][i]),
                    specific_conductance=float(values[Indicator.SPECIFIC_CONDUCTANCE][i]),
                    water_temperature=float(values[Indicator.WATER_TEMPERATURE][i]),
                )
            )

    raster = default_raster(spec, coast)
    records = enrich_records(records, coast, raster)
    return Dataset(records, split_seed=spec.seed), truth


def default_raster(spec: SynthSpec, coast: Coastline | None = None) -> ClimateRaster:
    """Plausible climate grid over the bbox: coast temperate, north cold, south arid."""
    if coast is None:
        coast = Coastline(np.array(spec.coastline, dtype=float))
    lat_min, lat_max, lon_min, lon_max = spec.bbox
    cs = spec.raster_cellsize
    nrows = int(np.ceil((lat_max - lat_min) / cs - 1e-9))
    ncols = int(np.ceil((lon_max - lon_min) / cs - 1e-9))
    legend = {1: "Csb", 2: "Csa", 3: "Dsb", 4: "BSk", 5: "BWh",
              6: "BWk", 7: "BSh", 8: "Dsa", 9: "Dsc"}
    dense = coast.densified()
    cells = np.empty((nrows, ncols), dtype=int)
    for r in range(nrows):
        lat = lat_min + (nrows - r - 0.5) * cs
        lons = lon_min + (np.arange(ncols) + 0.5) * cs
        d = np.empty(ncols)
        for c in range(ncols):
            d[c] = haversine_km_many(lat, lons[c], dense[:, 0], dense[:, 1]).min()
        row = np.where(d <= 60.0, 1, np.where(lat >= 40.0, 3, np.where(lat >= 36.0, 4, 5)))
        cells[r] = row
    return ClimateRaster(ncols, nrows, lon_min, lat_min, cs, -9999, cells, legend)


def write_inputs(spec: SynthSpec, out_dir) -> dict[str, str]:
    """Emit the raw-input file set a real pipeline would start from.

    Returns a name -> path map: data CSV in the ingest schema, coastline,
    climate grid and legend, region polygon, and a truth-parameters sidecar.
    """
    spec.validate()
    dataset, truth = generate(spec)
    paths = {
        "data": os.path.join(out_dir, "data.csv"),
        "coastline": os.path.join(out_dir, "coastline.csv"),
        "raster": os.path.join(out_dir, "climate.asc"),
        "legend": os.path.join(out_dir, "climate_legend.csv"),
        "region": os.path.join(out_dir, "region.csv"),
        "truth": os.path.join(out_dir, "truth.json"),
    }
    write_records_csv(paths["data"], dataset.records, labelled=False)
    truth.coast.to_csv(paths["coastline"])
    raster = default_raster(spec)
    raster.to_files(paths["raster"], paths["legend"])
    RegionPolygon(np.array(spec.region, dtype=float)).to_csv(paths["region"])
    doc = {
        "seed": spec.seed,
        "n_stations": spec.n_stations,
        "samples_per_station": spec.samples_per_station,
        "year_lo": spec.year_lo,
        "year_hi": spec.year_hi,
        "bbox": list(spec.bbox),
        "params": {ind.short: asdict(spec.params[ind]) for ind in Indicator},
    }
    with open(paths["truth"], "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
    return paths
