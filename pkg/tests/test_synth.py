import json
import os

import numpy as np
import pytest

from calwq import (
    Coastline,
    Indicator,
    InvalidSpec,
    haversine_km,
    read_records_csv,
)
from calwq.synth import (
    DEFAULT_PARAMS,
    IndicatorParams,
    SynthSpec,
    Truth,
    generate,
    write_inputs,
)


def noiseless_params():
    return {
        ind: IndicatorParams(**{**p.__dict__, "noise_sd": 0.0})
        for ind, p in DEFAULT_PARAMS.items()
    }


class TestTruth:
    def test_closed_form_evaluation(self):
        spec = SynthSpec()
        coast = Coastline(np.array(spec.coastline, dtype=float))
        truth = Truth(spec, coast)
        p = spec.params[Indicator.WATER_TEMPERATURE]
        lat, lon, year, month = 36.5, -118.0, 2010, 7
        want = (p.intercept + p.lat_slope * lat
                + p.season_amp * np.sin(2 * np.pi * (month - 7) / 12.0)
                + p.year_slope * (year - 2000))
        got = truth(Indicator.WATER_TEMPERATURE, lat, lon, year, month)
        assert got[0] == pytest.approx(want, abs=1e-12)

    def test_coast_term_decays_inland(self):
        spec = SynthSpec()
        coast = Coastline(np.array(spec.coastline, dtype=float))
        truth = Truth(spec, coast)
        near = truth(Indicator.SPECIFIC_CONDUCTANCE, 37.8, -122.4, 2000, 1)[0]
        far = truth(Indicator.SPECIFIC_CONDUCTANCE, 37.8, -118.0, 2000, 1)[0]
        assert near > far
        assert far == pytest.approx(250.0, abs=30.0)

    def test_coupling_subtracts_temperature(self):
        spec = SynthSpec()
        coast = Coastline(np.array(spec.coastline, dtype=float))
        truth = Truth(spec, coast)
        wt = truth(Indicator.WATER_TEMPERATURE, 35.0, -118.0, 2000, 7)[0]
        do = truth(Indicator.DISSOLVED_OXYGEN, 35.0, -118.0, 2000, 7)[0]
        assert do == pytest.approx(11.5 - 0.25 * wt, abs=1e-12)

    def test_coast_km_is_polyline_minimum(self):
        spec = SynthSpec()
        coast = Coastline(np.array(spec.coastline, dtype=float))
        truth = Truth(spec, coast)
        dense = coast.densified()
        lat, lon = 36.0, -119.0
        want = min(haversine_km((lat, lon), (vlat, vlon)) for vlat, vlon in dense)
        got = truth.coast_km(lat, lon)[0]
        assert got == pytest.approx(want, rel=1e-12)


class TestGenerate:
    def test_zero_noise_matches_truth_exactly(self):
        spec = SynthSpec(n_stations=12, samples_per_station=8, seed=3,
                         params=noiseless_params())
        dataset, truth = generate(spec)
        for rec in dataset.records:
            for ind in Indicator:
                want = truth(ind, rec.latitude, rec.longitude, rec.year, rec.month)[0]
                assert rec.value_of(ind) == pytest.approx(want, abs=1e-9), ind

    def test_do_couples_to_sampled_temperature(self):
        # with WT noise on but DO noise off, DO must track the drawn WT
        params = noiseless_params()
        params[Indicator.WATER_TEMPERATURE] = IndicatorParams(
            intercept=35.0, lat_slope=-0.7, season_amp=5.0, year_slope=0.02, noise_sd=1.0
        )
        spec = SynthSpec(n_stations=10, samples_per_station=10, seed=5, params=params)
        dataset, _ = generate(spec)
        for rec in dataset.records:
            assert rec.dissolved_oxygen == pytest.approx(
                11.5 - 0.25 * rec.water_temperature, abs=1e-9
            )

    def test_determinism_and_seed_divergence(self):
        a, _ = generate(SynthSpec(n_stations=8, samples_per_station=5, seed=1))
        b, _ = generate(SynthSpec(n_stations=8, samples_per_station=5, seed=1))
        c, _ = generate(SynthSpec(n_stations=8, samples_per_station=5, seed=2))
        assert a.records == b.records
        assert a.records != c.records

    def test_record_population(self, small_pair):
        dataset, _ = small_pair
        recs = dataset.records
        assert len(recs) == 40 * 25
        assert len({r.station_id for r in recs}) == 40
        spec = SynthSpec()
        lat_min, lat_max, lon_min, lon_max = spec.bbox
        for rec in recs[:200]:
            assert lat_min <= rec.latitude <= lat_max
            assert lon_min <= rec.longitude <= lon_max
            assert 1975 <= rec.year <= 2022
            assert 1 <= rec.month <= 12

    def test_records_come_enriched(self, small_pair):
        from calwq import GeoType, KoppenClass

        dataset, _ = small_pair
        assert all(r.enriched for r in dataset.records)
        geo = {r.geographical_type for r in dataset.records}
        assert geo <= {GeoType.INLAND, GeoType.COASTAL}
        climates = {r.climate_zone.sub for r in dataset.records}
        assert climates <= {k.sub for k in KoppenClass}

    def test_stations_fall_inside_region(self, small_pair):
        dataset, truth = small_pair
        from calwq import RegionPolygon

        region = RegionPolygon(np.array(SynthSpec().region, dtype=float))
        lats = np.array([r.latitude for r in dataset.records])
        lons = np.array([r.longitude for r in dataset.records])
        assert region.contains_many(lats, lons).all()

    def test_invalid_specs_rejected(self):
        with pytest.raises(InvalidSpec):
            generate(SynthSpec(n_stations=0))
        with pytest.raises(InvalidSpec):
            generate(SynthSpec(samples_per_station=0))
        with pytest.raises(InvalidSpec):
            generate(SynthSpec(year_lo=2001, year_hi=2000))
        with pytest.raises(InvalidSpec):
            generate(SynthSpec(bbox=(40.0, 32.0, -125.0, -114.0)))
        bad = dict(DEFAULT_PARAMS)
        bad[Indicator.PH] = IndicatorParams(intercept=7.8, noise_sd=-1.0)
        with pytest.raises(InvalidSpec):
            generate(SynthSpec(params=bad))
        with pytest.raises(InvalidSpec):
            missing = dict(DEFAULT_PARAMS)
            del missing[Indicator.PH]
            generate(SynthSpec(params=missing))


class TestWriteInputs:
    def test_full_file_set(self, tmp_path):
        spec = SynthSpec(n_stations=6, samples_per_station=4, seed=2)
        paths = write_inputs(spec, tmp_path)
        assert set(paths) == {"data", "coastline", "raster", "legend", "region", "truth"}
        for p in paths.values():
            assert os.path.exists(p)

        recs = read_records_csv(paths["data"])
        assert len(recs) == 24
        assert not recs[0].enriched  # raw schema carries no labels

        with open(paths["truth"]) as fh:
            doc = json.load(fh)
        assert doc["seed"] == 2
        assert doc["params"]["wt"]["lat_slope"] == -0.7

    def test_data_matches_generate(self, tmp_path):
        spec = SynthSpec(n_stations=5, samples_per_station=3, seed=9)
        paths = write_inputs(spec, tmp_path)
        recs = read_records_csv(paths["data"])
        dataset, _ = generate(spec)
        want = [r.with_labels(None, None) for r in dataset.records]
        assert recs == want
