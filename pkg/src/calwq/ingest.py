"""CSV ingestion with the dataset's error-rectification rules.

Rows with blank indicators are dropped, positive longitudes that land inside
the configured region once negated are corrected, and anything unparseable is
dropped and counted by category.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .errors import EmptyInput, MissingColumn
from .records import (
    CSV_COLUMNS,
    LABEL_COLUMNS,
    SampleRecord,
    record_from_row,
    record_to_row,
)

#: (lat_min, lat_max, lon_min, lon_max) for California; gates longitude fixes.
CA_BBOX = (32.0, 42.5, -125.0, -114.0)

_NA_TOKENS = frozenset({"", "na", "n/a", "nan", "null", "none"})


@dataclass
class IngestReport:
    """Bookkeeping for one parse run; rows_read = kept + dropped_na + dropped_invalid."""

    rows_read: int = 0
    rows_kept: int = 0
    rows_dropped_na: int = 0
    rows_dropped_invalid: int = 0
    stations_merged: int = 0
    categories: dict[str, int] = field(default_factory=dict)

    def count(self, category: str) -> None:
        self.categories[category] = self.categories.get(category, 0) + 1

    def balanced(self) -> bool:
        return self.rows_read == self.rows_kept + self.rows_dropped_na + self.rows_dropped_invalid


def _is_na(token: str) -> bool:
    return token.strip().lower() in _NA_TOKENS


def parse_csv(
    path,
    schema: dict[str, str] | None = None,
    bbox: tuple[float, float, float, float] = CA_BBOX,
) -> tuple[list[SampleRecord], IngestReport]:
    """Parse one CWQD-shaped CSV into SampleRecords plus an IngestReport.

    schema maps file header names to the canonical column names; None means
    the file already uses the canonical header. Kept rows preserve input
    order. Raises MissingColumn when a needed column is absent under the
    schema, EmptyInput when the file has a header but no data rows.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyInput(f"{path}: no header row") from None
        if not any(h.strip() for h in header):
            raise EmptyInput(f"{path}: blank header row")
        header = [h.strip() for h in header]
        if schema:
            header = [schema.get(h, h) for h in header]
        index = {}
        for name in CSV_COLUMNS:
            try:
                index[name] = header.index(name)
            except ValueError:
                raise MissingColumn(f"{path}: column {name!r} not found in header") from None

        report = IngestReport()
        records: list[SampleRecord] = []
        lat_min, lat_max, lon_min, lon_max = bbox
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            report.rows_read += 1
            try:
                cells = [row[index[name]] for name in CSV_COLUMNS]
            except IndexError:
                report.rows_dropped_invalid += 1
                report.count("short_row")
                continue
            if any(_is_na(cells[i]) for i in (6, 7, 8, 9)):
                report.rows_dropped_na += 1
                report.count("na_indicator")
                continue
            try:
                rec = record_from_row(cells)
            except (ValueError, TypeError):
                rec = _try_longitude_fix(cells, bbox)
                if rec is None:
                    report.rows_dropped_invalid += 1
                    report.count("unparseable")
                    continue
                report.count("longitude_negated")
                records.append(rec)
                report.rows_kept += 1
                continue
            if rec.longitude >= 0:
                fixed = _try_longitude_fix(cells, bbox)
                if fixed is None:
                    report.rows_dropped_invalid += 1
                    report.count("longitude_unfixable")
                    continue
                report.count("longitude_negated")
                rec = fixed
            records.append(rec)
            report.rows_kept += 1

    if report.rows_read == 0:
        raise EmptyInput(f"{path}: no data rows")
    return records, report


def _try_longitude_fix(cells: list[str], bbox) -> SampleRecord | None:
    """Negate a non-negative longitude when the result lands inside bbox."""
    lat_min, lat_max, lon_min, lon_max = bbox
    try:
        lon = float(cells[2])
        lat = float(cells[1])
    except ValueError:
        return None
    if lon < 0:
        return None
    fixed_lon = -lon
    if not (lon_min <= fixed_lon <= lon_max and lat_min <= lat <= lat_max):
        return None
    patched = list(cells)
    patched[2] = repr(fixed_lon)
    try:
        return record_from_row(patched)
    except (ValueError, TypeError):
        return None


def merge_duplicate_stations(
    records: list[SampleRecord], report: IngestReport | None = None
) -> list[SampleRecord]:
    """Give records sharing coordinates (rounded to 1e-4 deg) the smallest station_id.

    Record count and order are unchanged. When a report is supplied its
    stations_merged field is set to the number of ids that were replaced.
    """
    smallest: dict[tuple[float, float], int] = {}
    for rec in records:
        key = (round(rec.latitude, 4), round(rec.longitude, 4))
        cur = smallest.get(key)
        if cur is None or rec.station_id < cur:
            smallest[key] = rec.station_id

    merged_ids: set[int] = set()
    out: list[SampleRecord] = []
    for rec in records:
        key = (round(rec.latitude, 4), round(rec.longitude, 4))
        target = smallest[key]
        if target != rec.station_id:
            merged_ids.add(rec.station_id)
            rec = rec.with_station_id(target)
        out.append(rec)
    if report is not None:
        report.stations_merged = len(merged_ids)
    return out


def ingest_files(paths, schema=None, bbox=CA_BBOX) -> tuple[list[SampleRecord], IngestReport]:
    """Ingest several CSVs, concatenating in file-name order, then merge stations."""
    combined = IngestReport()
    records: list[SampleRecord] = []
    for path in sorted(paths, key=str):
        recs, rep = parse_csv(path, schema=schema, bbox=bbox)
        records.extend(recs)
        combined.rows_read += rep.rows_read
        combined.rows_kept += rep.rows_kept
        combined.rows_dropped_na += rep.rows_dropped_na
        combined.rows_dropped_invalid += rep.rows_dropped_invalid
        for cat, n in rep.categories.items():
            combined.categories[cat] = combined.categories.get(cat, 0) + n
    records = merge_duplicate_stations(records, combined)
    return records, combined


def write_records_csv(path, records: list[SampleRecord], labelled: bool = False) -> None:
    """Serialize records with repr floats so a read-back is bit-identical."""
    columns = CSV_COLUMNS + LABEL_COLUMNS if labelled else CSV_COLUMNS
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for rec in records:
            writer.writerow(record_to_row(rec, labelled=labelled))


def read_records_csv(path, labelled: bool = False) -> list[SampleRecord]:
    """Read back a file written by write_records_csv."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = list(CSV_COLUMNS + LABEL_COLUMNS if labelled else CSV_COLUMNS)
        if header != expected:
            raise MissingColumn(f"{path}: header {header} != expected {expected}")
        return [record_from_row(row, labelled=labelled) for row in reader if row]
