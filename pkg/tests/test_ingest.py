import pytest

from calwq import (
    EmptyInput,
    MissingColumn,
    ingest_files,
    merge_duplicate_stations,
    parse_csv,
    read_records_csv,
    write_records_csv,
)
from calwq.records import CSV_COLUMNS

HEADER = ",".join(CSV_COLUMNS)


def row(station=1, lat=37.5, lon=-120.25, county="Kern", year=2001, month=6,
        ph=7.2, do=8.9, sc=410.0, wt=18.5):
    return f"{station},{lat},{lon},{county},{year},{month},{ph},{do},{sc},{wt}"


def write(tmp_path, lines, name="in.csv"):
    p = tmp_path / name
    p.write_text("\n".join(lines) + "\n")
    return p


class TestParse:
    def test_clean_file(self, tmp_path):
        p = write(tmp_path, [HEADER, row(1), row(2, lat=38.0)])
        records, report = parse_csv(p)
        assert len(records) == 2
        assert report.rows_read == 2
        assert report.rows_kept == 2
        assert report.balanced()

    def test_na_indicator_dropped(self, tmp_path):
        lines = [HEADER, row(1), row(2).replace("8.9", "NA"), row(3).replace("7.2", "")]
        p = write(tmp_path, lines)
        records, report = parse_csv(p)
        assert len(records) == 1
        assert report.rows_dropped_na == 2
        assert report.categories["na_indicator"] == 2
        assert report.balanced()

    def test_na_tokens_case_insensitive(self, tmp_path):
        lines = [HEADER] + [row(i).replace("18.5", tok)
                            for i, tok in enumerate(["null", "NaN", "n/a", "None"], start=1)]
        _, report = parse_csv(write(tmp_path, lines))
        assert report.rows_dropped_na == 4

    def test_positive_longitude_fixed_inside_bbox(self, tmp_path):
        p = write(tmp_path, [HEADER, row(1, lon=120.25)])
        records, report = parse_csv(p)
        assert len(records) == 1
        assert records[0].longitude == -120.25
        assert report.categories["longitude_negated"] == 1

    def test_positive_longitude_outside_bbox_dropped(self, tmp_path):
        # negating 20.0 gives -20.0, far east of California
        p = write(tmp_path, [HEADER, row(1, lon=20.0)])
        records, report = parse_csv(p)
        assert records == []
        assert report.rows_dropped_invalid == 1

    def test_unparseable_row_dropped(self, tmp_path):
        p = write(tmp_path, [HEADER, row(1), row(2).replace("2001", "hello")])
        records, report = parse_csv(p)
        assert len(records) == 1
        assert report.categories["unparseable"] == 1

    def test_short_row_dropped(self, tmp_path):
        p = write(tmp_path, [HEADER, row(1), "5,37.0,-120.0"])
        records, report = parse_csv(p)
        assert len(records) == 1
        assert report.categories["short_row"] == 1

    def test_blank_lines_not_counted(self, tmp_path):
        p = write(tmp_path, [HEADER, row(1), "", "   ", row(2)])
        _, report = parse_csv(p)
        assert report.rows_read == 2

    def test_missing_column_raises(self, tmp_path):
        bad_header = HEADER.replace("County", "Region")
        p = write(tmp_path, [bad_header, row(1)])
        with pytest.raises(MissingColumn):
            parse_csv(p)

    def test_schema_remap(self, tmp_path):
        remapped = HEADER.replace("StationID", "station").replace("WaterTemperature", "temp_c")
        p = write(tmp_path, [remapped, row(7)])
        records, _ = parse_csv(p, schema={"station": "StationID", "temp_c": "WaterTemperature"})
        assert records[0].station_id == 7

    def test_empty_file_raises(self, tmp_path):
        with pytest.raises(EmptyInput):
            parse_csv(write(tmp_path, [HEADER]))
        with pytest.raises(EmptyInput):
            parse_csv(write(tmp_path, [], name="empty.csv"))

    def test_row_order_preserved(self, tmp_path):
        p = write(tmp_path, [HEADER, row(3), row(1), row(2, lat=36.0)])
        records, _ = parse_csv(p)
        assert [r.station_id for r in records] == [3, 1, 2]


class TestMerge:
    def test_same_coordinates_take_smallest_id(self, tmp_path):
        p = write(tmp_path, [HEADER, row(9), row(4), row(6, lat=39.0)])
        records, report = parse_csv(p)
        merged = merge_duplicate_stations(records, report)
        assert [r.station_id for r in merged] == [4, 4, 6]
        assert report.stations_merged == 1

    def test_rounding_tolerance(self, tmp_path):
        # 1e-5 apart rounds to the same 4-decimal key
        p = write(tmp_path, [HEADER, row(2, lat=37.50001), row(1, lat=37.50002)])
        merged = merge_duplicate_stations(parse_csv(p)[0])
        assert {r.station_id for r in merged} == {1}

    def test_count_unchanged(self, tmp_path):
        p = write(tmp_path, [HEADER] + [row(i) for i in range(1, 6)])
        records, _ = parse_csv(p)
        assert len(merge_duplicate_stations(records)) == 5


class TestMultiFile:
    def test_concatenation_in_name_order(self, tmp_path):
        write(tmp_path, [HEADER, row(2)], name="b.csv")
        write(tmp_path, [HEADER, row(1, lat=40.0)], name="a.csv")
        records, report = ingest_files([tmp_path / "b.csv", tmp_path / "a.csv"])
        assert [r.station_id for r in records] == [1, 2]
        assert report.rows_read == 2


class TestRoundTrip:
    def test_write_read_identity(self, tmp_path, clean_records):
        out = tmp_path / "records.csv"
        write_records_csv(out, clean_records, labelled=True)
        back = read_records_csv(out, labelled=True)
        assert back == clean_records

    def test_header_mismatch_raises(self, tmp_path, clean_records):
        out = tmp_path / "records.csv"
        write_records_csv(out, clean_records, labelled=True)
        with pytest.raises(MissingColumn):
            read_records_csv(out, labelled=False)
