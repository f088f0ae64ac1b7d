"""Outlier filtering, train/test splitting, and design-matrix assembly."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInput, TooFewRecords, UnenrichedRecord
from .ingest import IngestReport
from .records import (
    MAJOR_CLIMATES,
    FeatureRegime,
    GeoType,
    Indicator,
    RegimeKind,
    SampleRecord,
)

#: Geotype one-hot level order.
GEOTYPE_LEVELS = (GeoType.INLAND.value, GeoType.COASTAL.value)


@dataclass
class Dataset:
    """Enriched records plus the seed that will drive their split."""

    records: list[SampleRecord]
    split_seed: int = 0
    provenance: IngestReport | None = None

    def __post_init__(self):
        for rec in self.records:
            if not rec.enriched:
                raise UnenrichedRecord(f"station {rec.station_id} lacks climate/geo labels")

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class Bounds:
    """Symmetric keep-interval for one indicator.

    lo and hi are constructed as mean -/+ halfwidth, so the symmetry
    invariant holds bit-exactly; halfwidth is 1.96 times the sample sd.
    """

    mean: float
    halfwidth: float
    lo: float
    hi: float

    @classmethod
    def around(cls, mean: float, halfwidth: float) -> "Bounds":
        return cls(mean=mean, halfwidth=halfwidth, lo=mean - halfwidth, hi=mean + halfwidth)

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi


def filter_outliers(
    records: list[SampleRecord],
) -> tuple[list[SampleRecord], list[SampleRecord], dict[Indicator, Bounds]]:
    """Drop records with any indicator strictly outside mean +/- 1.96 sd.

    Bounds are computed per indicator over the full input (sample sd,
    ddof 1). A zero-variance indicator keeps everything: its interval
    degenerates to [mean, mean] and equality is inside.
    """
    if len(records) < 2:
        raise EmptyInput("outlier filtering needs at least 2 records")
    bounds: dict[Indicator, Bounds] = {}
    for ind in Indicator:
        values = np.array([rec.value_of(ind) for rec in records], dtype=float)
        sd = float(np.std(values, ddof=1))
        bounds[ind] = Bounds.around(float(np.mean(values)), 1.96 * sd)

    kept: list[SampleRecord] = []
    removed: list[SampleRecord] = []
    for rec in records:
        if all(bounds[ind].contains(rec.value_of(ind)) for ind in Indicator):
            kept.append(rec)
        else:
            removed.append(rec)
    return kept, removed, bounds


def split(
    records: list[SampleRecord], ratio: float = 0.8, seed: int = 0
) -> tuple[list[SampleRecord], list[SampleRecord]]:
    """Seeded uniform partition; |train| = floor(ratio * n).

    Input order is preserved inside each part so reruns with one seed are
    byte-identical.
    """
    n = len(records)
    if n < 5:
        raise TooFewRecords(f"split needs at least 5 records, got {n}")
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    n_train = int(ratio * n)
    perm = np.random.default_rng(seed).permutation(n)
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])
    return [records[i] for i in train_idx], [records[i] for i in test_idx]


@dataclass(frozen=True)
class CategoricalGroup:
    """One-hot block inside a DesignMatrix: contiguous columns, one per level."""

    name: str
    levels: tuple[str, ...]
    start: int

    @property
    def columns(self) -> range:
        return range(self.start, self.start + len(self.levels))


@dataclass
class DesignMatrix:
    """Numeric features plus target for one regime."""

    X: np.ndarray
    y: np.ndarray
    column_names: list[str]
    groups: list[CategoricalGroup]
    regime: FeatureRegime

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise ValueError("X and y row counts differ")
        if self.X.shape[1] != len(self.column_names):
            raise ValueError("column_names does not match X width")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def to_csv(self, path) -> None:
        """Header is the feature names then the target name; floats use repr."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.column_names + [self.regime.target.column])
            for i in range(self.n):
                writer.writerow([repr(float(v)) for v in self.X[i]] + [repr(float(self.y[i]))])


def assemble(records: list[SampleRecord], regime: FeatureRegime) -> DesignMatrix:
    """Build the design matrix for a regime.

    Column order is fixed: Month, Year, Latitude, Longitude, then for the
    variable-dependent regime the three non-target indicators in declaration
    order, the climate one-hot block, and the geotype one-hot block.
    """
    if not records:
        raise EmptyInput("assemble needs at least one record")
    n = len(records)
    target = regime.target
    y = np.array([rec.value_of(target) for rec in records], dtype=float)

    names = ["Month", "Year", "Latitude", "Longitude"]
    base = np.empty((n, 4), dtype=float)
    for i, rec in enumerate(records):
        base[i] = (rec.month, rec.year, rec.latitude, rec.longitude)

    if regime.kind is RegimeKind.SPATIO_TEMPORAL:
        return DesignMatrix(base, y, names, [], regime)

    others = [ind for ind in Indicator if ind is not target]
    ind_block = np.empty((n, 3), dtype=float)
    for i, rec in enumerate(records):
        if not rec.enriched:
            raise UnenrichedRecord(f"station {rec.station_id} lacks climate/geo labels")
        ind_block[i] = [rec.value_of(ind) for ind in others]
    names += [ind.column for ind in others]

    blocks = [base, ind_block]
    groups: list[CategoricalGroup] = []

    climate_levels = regime.climate_levels
    if climate_levels:
        onehot = np.zeros((n, len(climate_levels)), dtype=float)
        level_idx = {lvl: j for j, lvl in enumerate(climate_levels)}
        use_major = climate_levels == MAJOR_CLIMATES
        for i, rec in enumerate(records):
            code = rec.climate_zone.major if use_major else rec.climate_zone.sub
            onehot[i, level_idx[code]] = 1.0
        groups.append(CategoricalGroup("ClimateZone", climate_levels, len(names)))
        names += [f"ClimateZone={lvl}" for lvl in climate_levels]
        blocks.append(onehot)

    geo = np.zeros((n, 2), dtype=float)
    for i, rec in enumerate(records):
        geo[i, GEOTYPE_LEVELS.index(rec.geographical_type.value)] = 1.0
    groups.append(CategoricalGroup("GeographicalType", GEOTYPE_LEVELS, len(names)))
    names += [f"GeographicalType={lvl}" for lvl in GEOTYPE_LEVELS]
    blocks.append(geo)

    X = np.hstack(blocks)
    assert X.shape[1] == regime.expected_width
    return DesignMatrix(X, y, names, groups, regime)
