"""Downstream products: interpolation grids, forecasts with bands, importance.

The product layer never post-processes model output; grid cells and forecast
points are exactly the model's predictions at the requested coordinates.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    ColumnMismatch,
    EmptyMask,
    RegimeMismatch,
    UnsupportedModelKind,
    ZeroVariance,
)
from .evaluation import rmse
from .models import Model, ModelKind, ModelSpec, crossval_rmse, fit
from .preprocess import CategoricalGroup
from .records import fmt_float

ST_COLUMNS = ["Month", "Year", "Latitude", "Longitude"]
NODATA = -9999.0


@dataclass
class RegionPolygon:
    """Closed polygon of (lon, lat) vertices; containment by even-odd rule."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise ValueError("polygon needs at least 3 (lon, lat) vertices")
        if np.all(v[0] == v[-1]):
            v = v[:-1]
        self.vertices = v

    @classmethod
    def from_csv(cls, path) -> "RegionPolygon":
        return cls(np.loadtxt(path, delimiter=",", dtype=float, ndmin=2))

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for lon, lat in self.vertices:
                fh.write(f"{fmt_float(lon)},{fmt_float(lat)}\n")

    def contains(self, lat: float, lon: float) -> bool:
        return bool(self.contains_many(np.array([lat]), np.array([lon]))[0])

    def contains_many(self, lats: np.ndarray, lons: np.ndarray) -> np.ndarray:
        """Even-odd ray casting, vectorized over points."""
        x = np.asarray(lons, dtype=float)
        y = np.asarray(lats, dtype=float)
        inside = np.zeros(x.shape, dtype=bool)
        v = self.vertices
        for k in range(len(v)):
            x1, y1 = v[k]
            x2, y2 = v[(k + 1) % len(v)]
            crosses = (y1 > y) != (y2 > y)
            with np.errstate(invalid="ignore", divide="ignore"):
                x_at = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            inside ^= crosses & (x < x_at)
        return inside


@dataclass
class GridProduct:
    bbox: tuple[float, float, float, float]  # lat_min, lat_max, lon_min, lon_max
    resolution: float
    month: int
    year: int
    indicator: str
    values: np.ndarray  # (n_lat, n_lon), row 0 northernmost; NaN outside mask
    model_kind: ModelKind

    @property
    def n_lat(self) -> int:
        return self.values.shape[0]

    @property
    def n_lon(self) -> int:
        return self.values.shape[1]

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        lat = self.bbox[0] + (self.n_lat - row - 0.5) * self.resolution
        lon = self.bbox[2] + (col + 0.5) * self.resolution
        return lat, lon

    def to_csv(self, path) -> None:
        """lat,lon,value rows for in-mask cells, row-major from the north."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["lat", "lon", "value"])
            for r in range(self.n_lat):
                for c in range(self.n_lon):
                    v = self.values[r, c]
                    if np.isnan(v):
                        continue
                    lat, lon = self.cell_center(r, c)
                    writer.writerow([fmt_float(lat), fmt_float(lon), fmt_float(v)])

    def to_ascii(self, path) -> None:
        """Same text-grid format as the climate raster, NODATA for masked cells."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"ncols {self.n_lon}\n")
            fh.write(f"nrows {self.n_lat}\n")
            fh.write(f"xllcorner {self.bbox[2]!r}\n")
            fh.write(f"yllcorner {self.bbox[0]!r}\n")
            fh.write(f"cellsize {self.resolution!r}\n")
            fh.write(f"NODATA_value {NODATA!r}\n")
            for row in self.values:
                out = np.where(np.isnan(row), NODATA, row)
                fh.write(" ".join(repr(float(v)) for v in out) + "\n")


def _require_st(model: Model) -> None:
    if model.column_names != ST_COLUMNS:
        raise RegimeMismatch(
            "model was not trained under the spatio-temporal regime; "
            f"columns are {model.column_names}"
        )


def interpolate_grid(
    model: Model,
    bbox: tuple[float, float, float, float],
    resolution: float,
    month: int,
    year: int,
    mask: RegionPolygon,
    indicator: str = "",
    companions: dict[str, float] | None = None,
) -> GridProduct:
    """Predict every in-mask cell center at a fixed (month, year).

    Only spatio-temporal models are accepted unless companions supplies a
    value for every extra training column (variable-dependent grids would
    otherwise need unknown future indicator fields).
    """
    if companions:
        missing = [c for c in model.column_names[4:] if c not in companions]
        if model.column_names[:4] != ST_COLUMNS or missing:
            raise RegimeMismatch(f"companions missing values for {missing}")
    else:
        _require_st(model)

    lat_min, lat_max, lon_min, lon_max = bbox
    if not (lat_max > lat_min and lon_max > lon_min and resolution > 0):
        raise ValueError(f"bad bbox/resolution: {bbox}, {resolution}")
    n_lat = int(np.ceil((lat_max - lat_min) / resolution - 1e-9))
    n_lon = int(np.ceil((lon_max - lon_min) / resolution - 1e-9))

    rows, cols = np.meshgrid(np.arange(n_lat), np.arange(n_lon), indexing="ij")
    lats = lat_min + (n_lat - rows - 0.5) * resolution
    lons = lon_min + (cols + 0.5) * resolution
    in_mask = mask.contains_many(lats.ravel(), lons.ravel()).reshape(n_lat, n_lon)
    if not in_mask.any():
        raise EmptyMask("no grid cell centers fall inside the region polygon")

    m = int(in_mask.sum())
    X = np.empty((m, len(model.column_names)), dtype=float)
    X[:, 0] = month
    X[:, 1] = year
    X[:, 2] = lats[in_mask]
    X[:, 3] = lons[in_mask]
    for j, name in enumerate(model.column_names[4:], start=4):
        X[:, j] = float(companions[name])

    values = np.full((n_lat, n_lon), np.nan)
    values[in_mask] = model.predict(X)
    return GridProduct(bbox, resolution, month, year, indicator, values, model.kind)


class BandMethod(Enum):
    RESIDUAL = "residual"
    BOOTSTRAP = "bootstrap"


@dataclass
class ForecastSeries:
    location: tuple[float, float]
    years: np.ndarray
    months: np.ndarray
    prediction: np.ndarray
    band_lo: np.ndarray
    band_hi: np.ndarray
    statewide_mean: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.prediction)
        if not (len(self.years) == len(self.months) == len(self.band_lo) == len(self.band_hi) == n):
            raise ValueError("forecast series arrays disagree in length")
        if np.any(self.band_lo > self.prediction) or np.any(self.prediction > self.band_hi):
            raise ValueError("band does not contain the point forecast")

    def __len__(self) -> int:
        return len(self.prediction)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["year", "month", "prediction", "lo", "hi", "statewide_mean"])
            for i in range(len(self)):
                row = [int(self.years[i]), int(self.months[i]), repr(float(self.prediction[i])),
                       repr(float(self.band_lo[i])), repr(float(self.band_hi[i]))]
                row.append("" if self.statewide_mean is None else repr(float(self.statewide_mean[i])))
                writer.writerow(row)


def forecast_point(
    model: Model,
    location: tuple[float, float],
    start_year: int,
    end_year: int,
    *,
    band_method: BandMethod = BandMethod.RESIDUAL,
    spec: ModelSpec | None = None,
    X_train: np.ndarray | None = None,
    y_train: np.ndarray | None = None,
    station_coords: np.ndarray | None = None,
    max_stations: int = 500,
    bootstrap_rounds: int = 30,
    cv_folds: int = 5,
    seed: int = 0,
) -> ForecastSeries:
    """Monthly predictions at one location with a 95% band.

    RESIDUAL bands are prediction +/- 1.96 x k-fold CV RMSE (constant width);
    BOOTSTRAP refits on resamples and takes pointwise 2.5/97.5 percentiles,
    widened if needed so the band always contains the point forecast. Both
    need spec plus the training matrix. The statewide mean series averages
    forecasts over a seeded sample of at most max_stations station
    coordinates when station_coords is given.
    """
    _require_st(model)
    if end_year < start_year:
        raise ValueError(f"end year {end_year} before start year {start_year}")
    if X_train is None or y_train is None or spec is None:
        raise ValueError("band computation needs spec, X_train, and y_train")

    lat, lon = location
    years = np.repeat(np.arange(start_year, end_year + 1), 12)
    months = np.tile(np.arange(1, 13), end_year - start_year + 1)
    X = np.column_stack([months, years, np.full_like(years, lat, dtype=float),
                         np.full_like(years, lon, dtype=float)]).astype(float)
    pred = model.predict(X)

    if band_method is BandMethod.RESIDUAL:
        cv = crossval_rmse(spec, X_train, y_train, k=cv_folds, seed=seed,
                           column_names=model.column_names)
        half = max(1.96 * cv, 1e-9)
        lo, hi = pred - half, pred + half
    else:
        rng = np.random.default_rng(seed)
        n = len(y_train)
        sims = np.empty((bootstrap_rounds, len(pred)))
        for b in range(bootstrap_rounds):
            rows = rng.integers(0, n, size=n)
            refit = fit(spec.with_seed(seed + b + 1), X_train[rows], y_train[rows],
                        model.column_names)
            sims[b] = refit.predict(X)
        lo = np.minimum(np.quantile(sims, 0.025, axis=0), pred)
        hi = np.maximum(np.quantile(sims, 0.975, axis=0), pred)

    statewide = None
    if station_coords is not None and len(station_coords):
        coords = np.asarray(station_coords, dtype=float)
        if len(coords) > max_stations:
            keep = np.sort(np.random.default_rng(seed).choice(len(coords), max_stations, replace=False))
            coords = coords[keep]
        n_time = len(pred)
        X_all = np.tile(X, (len(coords), 1))
        X_all[:, 2] = np.repeat(coords[:, 0], n_time)
        X_all[:, 3] = np.repeat(coords[:, 1], n_time)
        statewide = model.predict(X_all).reshape(len(coords), n_time).mean(axis=0)

    return ForecastSeries((lat, lon), years, months, pred, lo, hi, statewide)


@dataclass
class ImportanceReport:
    names: list[str]
    values: np.ndarray
    method: str

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if len(self.names) != len(self.values):
            raise ValueError("names and values disagree in length")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, map(float, self.values)))

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["feature", "importance"])
            for name, value in zip(self.names, self.values):
                writer.writerow([name, repr(float(value))])


def _aggregate(names: list[str], raw: np.ndarray,
               groups: tuple[CategoricalGroup, ...]) -> tuple[list[str], np.ndarray]:
    """Fold each one-hot group's columns into a single named entry."""
    grouped_cols = {c: g for g in groups for c in g.columns}
    out_names: list[str] = []
    out_vals: list[float] = []
    seen: set[str] = set()
    for j, name in enumerate(names):
        g = grouped_cols.get(j)
        if g is None:
            out_names.append(name)
            out_vals.append(float(raw[j]))
        elif g.name not in seen:
            seen.add(g.name)
            out_names.append(g.name)
            out_vals.append(float(sum(raw[c] for c in g.columns)))
    return out_names, np.array(out_vals)


def _normalize(names: list[str], values: np.ndarray, method: str) -> ImportanceReport:
    values = np.maximum(values, 0.0)
    total = float(values.sum())
    if total <= 0.0:
        raise ZeroVariance(f"{method} importance has zero total mass")
    return ImportanceReport(names, values / total, method)


def importance_gain(model: Model, groups: tuple[CategoricalGroup, ...] = ()) -> ImportanceReport:
    """Split-gain share per variable for tree ensembles."""
    if model.kind not in (ModelKind.RANDOM_FOREST, ModelKind.GRADIENT_BOOSTING):
        raise UnsupportedModelKind(f"gain importance needs a tree ensemble, got {model.kind.value}")
    names, vals = _aggregate(model.column_names, model.gain_importance(), tuple(groups))
    return _normalize(names, vals, "gain")


def importance_permutation(
    model: Model,
    X_test: np.ndarray,
    y_test: np.ndarray,
    seed: int = 0,
    repeats: int = 5,
    groups: tuple[CategoricalGroup, ...] = (),
) -> ImportanceReport:
    """Mean RMSE increase when a variable's columns are permuted as a unit."""
    X_test = np.asarray(X_test, dtype=float)
    y_test = np.asarray(y_test, dtype=float)
    if X_test.shape[1] != len(model.column_names):
        raise ColumnMismatch(
            f"expected {len(model.column_names)} columns, got {X_test.shape[1]}"
        )
    baseline = rmse(model.predict(X_test), y_test)

    grouped_cols = {c: g for g in groups for c in g.columns}
    variables: list[tuple[str, list[int]]] = []
    seen: set[str] = set()
    for j, name in enumerate(model.column_names):
        g = grouped_cols.get(j)
        if g is None:
            variables.append((name, [j]))
        elif g.name not in seen:
            seen.add(g.name)
            variables.append((g.name, list(g.columns)))

    rng = np.random.default_rng(seed)
    deltas = np.zeros(len(variables))
    for k, (_, cols) in enumerate(variables):
        for _ in range(repeats):
            perm = rng.permutation(len(y_test))
            Xp = X_test.copy()
            Xp[:, cols] = X_test[np.ix_(perm, cols)]
            deltas[k] += rmse(model.predict(Xp), y_test) - baseline
    deltas /= repeats
    return _normalize([v[0] for v in variables], deltas, "permutation")
