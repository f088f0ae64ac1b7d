"""Geographic derivations: great-circle distances, coastline proximity, climate lookup.

Coastline and ClimateRaster are immutable after load; every lookup here is a
pure function, safe to run concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import OutsideRaster, UnknownClimate
from .records import GeoType, KoppenClass, SampleRecord, fmt_float

#: Mean Earth radius in kilometres.
EARTH_RADIUS_KM = 6371.0088

#: Stations at most this far from the coastline are labelled Coastal.
COASTAL_THRESHOLD_KM = 8.0


def haversine_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance in km between two (lat, lon) points in degrees.

    Symmetric, non-negative, and exactly zero for identical inputs.
    """
    lat1, lon1 = np.radians(a[0]), np.radians(a[1])
    lat2, lon2 = np.radians(b[0]), np.radians(b[1])
    s = np.sin((lat2 - lat1) / 2.0) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2.0) ** 2
    return float(2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(s)))


def haversine_km_many(lat: float, lon: float, lats: np.ndarray, lons: np.ndarray) -> np.ndarray:
    """Distances from one point to many, vectorized."""
    lat1 = np.radians(lat)
    lon1 = np.radians(lon)
    lat2 = np.radians(np.asarray(lats, dtype=float))
    lon2 = np.radians(np.asarray(lons, dtype=float))
    s = np.sin((lat2 - lat1) / 2.0) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(s, 0.0, 1.0)))


@dataclass
class Coastline:
    """Ordered coastline polyline; vertices are (longitude, latitude) degrees."""

    vertices: np.ndarray  # (n, 2) lon, lat
    _dense: dict[float, np.ndarray] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 2:
            raise ValueError("coastline needs at least 2 (lon, lat) vertices")
        if np.any(np.all(v[1:] == v[:-1], axis=1)):
            raise ValueError("coastline has coincident consecutive vertices")
        self.vertices = v

    @classmethod
    def from_csv(cls, path) -> "Coastline":
        """Load from a CSV of lon,lat vertex pairs, one per line, in coastal order."""
        v = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
        return cls(v)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for lon, lat in self.vertices:
                fh.write(f"{fmt_float(lon)},{fmt_float(lat)}\n")

    def densified(self, spacing_km: float = 1.0) -> np.ndarray:
        """Vertices with every segment subdivided to <= spacing_km, as (m, 2) lat, lon."""
        key = float(spacing_km)
        cached = self._dense.get(key)
        if cached is not None:
            return cached
        pts = []
        v = self.vertices
        for (lon0, lat0), (lon1, lat1) in zip(v[:-1], v[1:]):
            seg_km = haversine_km((lat0, lon0), (lat1, lon1))
            n = max(1, int(np.ceil(seg_km / key)))
            t = np.linspace(0.0, 1.0, n + 1)[:-1]
            pts.append(np.column_stack([lat0 + t * (lat1 - lat0), lon0 + t * (lon1 - lon0)]))
        pts.append(np.array([[v[-1, 1], v[-1, 0]]]))
        dense = np.vstack(pts)
        self._dense[key] = dense
        return dense


def distance_to_coast_km(p: tuple[float, float], coast: Coastline, spacing_km: float = 1.0) -> float:
    """Minimum great-circle distance from point (lat, lon) to the coastline polyline.

    Segments are densified to <= spacing_km before vertex-distance
    minimization; the approximation error is bounded by ~spacing_km/2.
    """
    dense = coast.densified(spacing_km)
    d = haversine_km_many(p[0], p[1], dense[:, 0], dense[:, 1])
    return float(d.min())


def classify_geotype(
    p: tuple[float, float], coast: Coastline, threshold_km: float = COASTAL_THRESHOLD_KM
) -> GeoType:
    """Coastal iff within threshold_km (inclusive) of the coastline, else Inland."""
    return GeoType.COASTAL if distance_to_coast_km(p, coast) <= threshold_km else GeoType.INLAND


@dataclass
class ClimateRaster:
    """Plain-text climate grid with integer codes mapped to sub-climates by a legend.

    cells is row-major with row 0 the northernmost row (plain-text grid
    convention); legend maps the integer cell codes to sub-climate strings.
    """

    ncols: int
    nrows: int
    xll: float
    yll: float
    cellsize: float
    nodata: int
    cells: np.ndarray  # (nrows, ncols) int
    legend: dict[int, str]

    def __post_init__(self):
        self.cells = np.asarray(self.cells, dtype=int)
        if self.cellsize <= 0:
            raise ValueError("cellsize must be positive")
        if self.cells.shape != (self.nrows, self.ncols):
            raise ValueError(
                f"grid shape {self.cells.shape} does not match header ({self.nrows}, {self.ncols})"
            )

    @classmethod
    def from_files(cls, grid_path, legend_path) -> "ClimateRaster":
        header: dict[str, float] = {}
        rows: list[list[int]] = []
        with open(grid_path, "r", encoding="utf-8") as fh:
            for line in fh:
                parts = line.split()
                if not parts:
                    continue
                if parts[0].lower() in ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value"):
                    header[parts[0].lower()] = float(parts[1])
                else:
                    rows.append([int(float(tok)) for tok in parts])
        legend: dict[int, str] = {}
        with open(legend_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.lower().startswith("code"):
                    continue
                code_s, name = line.split(",", 1)
                legend[int(code_s)] = name.strip()
        return cls(
            ncols=int(header["ncols"]),
            nrows=int(header["nrows"]),
            xll=header["xllcorner"],
            yll=header["yllcorner"],
            cellsize=header["cellsize"],
            nodata=int(header.get("nodata_value", -9999)),
            cells=np.array(rows, dtype=int),
            legend=legend,
        )

    def to_files(self, grid_path, legend_path) -> None:
        with open(grid_path, "w", encoding="utf-8") as fh:
            fh.write(f"ncols {self.ncols}\n")
            fh.write(f"nrows {self.nrows}\n")
            fh.write(f"xllcorner {fmt_float(self.xll)}\n")
            fh.write(f"yllcorner {fmt_float(self.yll)}\n")
            fh.write(f"cellsize {fmt_float(self.cellsize)}\n")
            fh.write(f"NODATA_value {fmt_float(self.nodata)}\n")
            for row in self.cells:
                fh.write(" ".join(str(int(c)) for c in row) + "\n")
        with open(legend_path, "w", encoding="utf-8") as fh:
            fh.write("code,class\n")
            for code in sorted(self.legend):
                fh.write(f"{code},{self.legend[code]}\n")

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        """(lat, lon) of a cell center; row 0 is the northernmost row."""
        lat = self.yll + (self.nrows - row - 0.5) * self.cellsize
        lon = self.xll + (col + 0.5) * self.cellsize
        return lat, lon

    def cell_of(self, lat: float, lon: float) -> tuple[int, int]:
        """(row, col) of the cell containing the point; may be out of bounds."""
        col = int(np.floor((lon - self.xll) / self.cellsize))
        row_from_bottom = int(np.floor((lat - self.yll) / self.cellsize))
        return self.nrows - 1 - row_from_bottom, col


def lookup_climate(
    p: tuple[float, float], raster: ClimateRaster, search_radius_cells: int = 3
) -> KoppenClass:
    """Sub-climate of the raster cell containing (lat, lon).

    NODATA cells (and points just off the grid) fall back to the nearest
    non-NODATA cell center within search_radius_cells. Raises OutsideRaster
    when no valid cell is that close, UnknownClimate for a code whose legend
    entry is not one of the nine sub-climates.
    """
    row, col = raster.cell_of(p[0], p[1])
    inside = 0 <= row < raster.nrows and 0 <= col < raster.ncols
    if inside and raster.cells[row, col] != raster.nodata:
        return _decode(raster, raster.cells[row, col])

    r = search_radius_cells
    r0, r1 = max(0, row - r), min(raster.nrows, row + r + 1)
    c0, c1 = max(0, col - r), min(raster.ncols, col + r + 1)
    best = None
    best_d = np.inf
    for rr in range(r0, r1):
        for cc in range(c0, c1):
            code = raster.cells[rr, cc]
            if code == raster.nodata:
                continue
            d = haversine_km(p, raster.cell_center(rr, cc))
            if d < best_d:
                best_d = d
                best = code
    if best is None:
        raise OutsideRaster(
            f"point ({p[0]}, {p[1]}) has no climate cell within {search_radius_cells} cells"
        )
    return _decode(raster, best)


def _decode(raster: ClimateRaster, code: int) -> KoppenClass:
    name = raster.legend.get(int(code))
    if name is None:
        raise UnknownClimate(f"raster code {code} missing from the legend")
    return KoppenClass.from_code(name)


def enrich_records(
    records: list[SampleRecord],
    coast: Coastline,
    raster: ClimateRaster,
    threshold_km: float = COASTAL_THRESHOLD_KM,
) -> list[SampleRecord]:
    """Attach climate_zone and geographical_type to every record.

    One label per distinct coordinate: stations keep a single climate and
    geo label over their whole lifetime.
    """
    labels: dict[tuple[float, float], tuple[KoppenClass, GeoType]] = {}
    out = []
    for rec in records:
        key = (rec.latitude, rec.longitude)
        got = labels.get(key)
        if got is None:
            climate = lookup_climate(key, raster)
            geotype = classify_geotype(key, coast, threshold_km)
            got = (climate, geotype)
            labels[key] = got
        out.append(rec.with_labels(*got))
    return out
