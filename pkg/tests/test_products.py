import csv

import numpy as np
import pytest

from calwq import (
    BandMethod,
    ColumnMismatch,
    EmptyMask,
    ModelKind,
    ModelSpec,
    RegimeMismatch,
    RegionPolygon,
    UnsupportedModelKind,
    ZeroVariance,
    fit,
    forecast_point,
    importance_gain,
    importance_permutation,
    interpolate_grid,
)
from calwq.models import fit_design
from calwq.products import ST_COLUMNS
from calwq.records import RegimeKind

SQUARE = RegionPolygon(np.array([
    (-120.0, 35.0), (-118.0, 35.0), (-118.0, 37.0), (-120.0, 37.0),
], dtype=float))


def linear_st_model(rng, coef=(2.0, 0.1, 3.0, 0.5), intercept=1.0):
    """Exactly recoverable plane over the spatio-temporal columns."""
    n = 300
    X = np.column_stack([
        rng.integers(1, 13, n),
        rng.integers(1975, 2023, n),
        rng.uniform(32, 42.5, n),
        rng.uniform(-125, -114, n),
    ]).astype(float)
    y = intercept + X @ np.asarray(coef)
    model = fit(ModelSpec(ModelKind.LINEAR), X, y, ST_COLUMNS)
    return model, X, y, np.asarray(coef), intercept


class TestRegionPolygon:
    def test_containment(self):
        assert SQUARE.contains(36.0, -119.0)
        assert not SQUARE.contains(36.0, -121.0)
        assert not SQUARE.contains(38.0, -119.0)

    def test_vectorized_matches_scalar(self, rng):
        lats = rng.uniform(33, 39, 200)
        lons = rng.uniform(-122, -116, 200)
        many = SQUARE.contains_many(lats, lons)
        each = np.array([SQUARE.contains(a, b) for a, b in zip(lats, lons)])
        np.testing.assert_array_equal(many, each)

    def test_concave_polygon(self):
        # U shape: the notch between the arms is outside
        u = RegionPolygon(np.array([
            (0.0, 0.0), (3.0, 0.0), (3.0, 3.0), (2.0, 3.0),
            (2.0, 1.0), (1.0, 1.0), (1.0, 3.0), (0.0, 3.0),
        ]))
        assert u.contains(0.5, 0.5)     # inside the base
        assert u.contains(2.0, 2.5)     # inside the right arm
        assert not u.contains(2.0, 1.5)  # inside the notch

    def test_closed_ring_unclosed(self):
        ring = RegionPolygon(np.array([(0, 0), (1, 0), (1, 1), (0, 0)], dtype=float))
        assert len(ring.vertices) == 3

    def test_too_few_vertices(self):
        with pytest.raises(ValueError):
            RegionPolygon(np.array([(0.0, 0.0), (1.0, 1.0)]))

    def test_csv_round_trip(self, tmp_path):
        p = tmp_path / "region.csv"
        SQUARE.to_csv(p)
        back = RegionPolygon.from_csv(p)
        np.testing.assert_array_equal(back.vertices, SQUARE.vertices)


class TestInterpolateGrid:
    def test_dimensions_and_centers(self, rng):
        model, *_ = linear_st_model(rng)
        grid = interpolate_grid(model, (32.0, 42.5, -125.0, -114.0), 0.5,
                                month=7, year=2022, mask=SQUARE, indicator="wt")
        assert (grid.n_lat, grid.n_lon) == (21, 22)
        assert grid.cell_center(0, 0) == (42.25, -124.75)   # row 0 is northernmost
        assert grid.cell_center(20, 21) == (32.25, -114.25)

    def test_values_match_model_closed_form(self, rng):
        model, _, _, coef, intercept = linear_st_model(rng)
        grid = interpolate_grid(model, (34.0, 38.0, -121.0, -117.0), 0.5,
                                month=3, year=2000, mask=SQUARE)
        for r in range(grid.n_lat):
            for c in range(grid.n_lon):
                lat, lon = grid.cell_center(r, c)
                inside = SQUARE.contains(lat, lon)
                v = grid.values[r, c]
                if not inside:
                    assert np.isnan(v)
                else:
                    want = intercept + coef @ np.array([3.0, 2000.0, lat, lon])
                    assert v == pytest.approx(want, abs=1e-8)

    def test_regime_guard(self, wt_split):
        train, _ = wt_split[RegimeKind.VARIABLE_DEPENDENT]
        vd_model = fit_design(ModelSpec(ModelKind.LINEAR), train)
        with pytest.raises(RegimeMismatch):
            interpolate_grid(vd_model, (32.0, 42.5, -125.0, -114.0), 0.5,
                             month=7, year=2022, mask=SQUARE)

    def test_companions_unlock_vd_models(self, wt_split):
        train, _ = wt_split[RegimeKind.VARIABLE_DEPENDENT]
        vd_model = fit_design(ModelSpec(ModelKind.LINEAR), train)
        companions = {name: 1.0 for name in vd_model.column_names[4:]}
        grid = interpolate_grid(vd_model, (32.0, 42.5, -125.0, -114.0), 0.5,
                                month=7, year=2022, mask=SQUARE, companions=companions)
        assert np.isfinite(grid.values[~np.isnan(grid.values)]).all()
        partial = dict(list(companions.items())[:2])
        with pytest.raises(RegimeMismatch):
            interpolate_grid(vd_model, (32.0, 42.5, -125.0, -114.0), 0.5,
                             month=7, year=2022, mask=SQUARE, companions=partial)

    def test_empty_mask(self, rng):
        model, *_ = linear_st_model(rng)
        far = RegionPolygon(np.array([(10.0, 10.0), (11.0, 10.0), (11.0, 11.0)]))
        with pytest.raises(EmptyMask):
            interpolate_grid(model, (32.0, 42.5, -125.0, -114.0), 0.5,
                             month=7, year=2022, mask=far)

    def test_bad_geometry(self, rng):
        model, *_ = linear_st_model(rng)
        with pytest.raises(ValueError):
            interpolate_grid(model, (42.0, 32.0, -125.0, -114.0), 0.5,
                             month=7, year=2022, mask=SQUARE)
        with pytest.raises(ValueError):
            interpolate_grid(model, (32.0, 42.5, -125.0, -114.0), -0.1,
                             month=7, year=2022, mask=SQUARE)

    def test_csv_lists_only_masked_cells(self, rng, tmp_path):
        model, *_ = linear_st_model(rng)
        grid = interpolate_grid(model, (34.0, 38.0, -121.0, -117.0), 0.5,
                                month=7, year=2022, mask=SQUARE)
        p = tmp_path / "grid.csv"
        grid.to_csv(p)
        with open(p, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == int(np.isfinite(grid.values).sum())
        first = rows[0]
        lat, lon = float(first["lat"]), float(first["lon"])
        assert SQUARE.contains(lat, lon)

    def test_ascii_round_trips_shape(self, rng, tmp_path):
        model, *_ = linear_st_model(rng)
        grid = interpolate_grid(model, (34.0, 38.0, -121.0, -117.0), 0.5,
                                month=7, year=2022, mask=SQUARE)
        p = tmp_path / "grid.asc"
        grid.to_ascii(p)
        lines = p.read_text().splitlines()
        assert lines[0] == f"ncols {grid.n_lon}"
        assert lines[1] == f"nrows {grid.n_lat}"
        body = np.loadtxt(lines[6:])
        masked = body == -9999.0
        np.testing.assert_array_equal(masked, np.isnan(grid.values))
        np.testing.assert_array_equal(body[~masked], grid.values[~np.isnan(grid.values)])


class TestForecast:
    def test_monthly_layout(self, rng):
        model, X, y, coef, intercept = linear_st_model(rng)
        spec = ModelSpec(ModelKind.LINEAR)
        fc = forecast_point(model, (37.7749, -122.4194), 1975, 2070,
                            spec=spec, X_train=X, y_train=y)
        assert len(fc) == 96 * 12 == 1152
        assert fc.years[0] == 1975 and fc.years[-1] == 2070
        np.testing.assert_array_equal(fc.months[:12], np.arange(1, 13))
        assert np.all(fc.band_lo <= fc.prediction)
        assert np.all(fc.prediction <= fc.band_hi)

    def test_predictions_are_model_output(self, rng):
        model, X, y, coef, intercept = linear_st_model(rng)
        fc = forecast_point(model, (36.0, -119.0), 2000, 2001,
                            spec=ModelSpec(ModelKind.LINEAR), X_train=X, y_train=y)
        want = intercept + np.array([
            coef @ np.array([m, yr, 36.0, -119.0])
            for yr in (2000, 2001) for m in range(1, 13)
        ])
        np.testing.assert_allclose(fc.prediction, want, atol=1e-8)

    def test_residual_band_width_is_cv_rmse(self, rng):
        from calwq import crossval_rmse

        model, X, y, *_ = linear_st_model(rng)
        spec = ModelSpec(ModelKind.LINEAR)
        fc = forecast_point(model, (36.0, -119.0), 2000, 2000,
                            spec=spec, X_train=X, y_train=y)
        cv = crossval_rmse(spec, X, y, k=5, seed=0, column_names=ST_COLUMNS)
        half = max(1.96 * cv, 1e-9)
        np.testing.assert_allclose(fc.band_hi - fc.prediction, half, atol=1e-12)
        np.testing.assert_allclose(fc.prediction - fc.band_lo, half, atol=1e-12)

    def test_bootstrap_band(self, rng):
        model, X, y, *_ = linear_st_model(rng)
        y = y + rng.normal(size=len(y))  # noise so resamples disagree
        model = fit(ModelSpec(ModelKind.LINEAR), X, y, ST_COLUMNS)
        fc = forecast_point(model, (36.0, -119.0), 2000, 2002,
                            band_method=BandMethod.BOOTSTRAP,
                            spec=ModelSpec(ModelKind.LINEAR), X_train=X, y_train=y,
                            bootstrap_rounds=8)
        assert np.all(fc.band_lo <= fc.prediction)
        assert np.all(fc.prediction <= fc.band_hi)
        assert np.any(fc.band_hi - fc.band_lo > 0)

    def test_statewide_mean(self, rng):
        model, X, y, coef, intercept = linear_st_model(rng)
        coords = np.array([[33.0, -117.0], [37.0, -120.0], [41.0, -123.0]])
        fc = forecast_point(model, (36.0, -119.0), 2000, 2000,
                            spec=ModelSpec(ModelKind.LINEAR), X_train=X, y_train=y,
                            station_coords=coords)
        per_station = []
        for lat, lon in coords:
            per_station.append(intercept + np.array([
                coef @ np.array([m, 2000.0, lat, lon]) for m in range(1, 13)
            ]))
        np.testing.assert_allclose(fc.statewide_mean, np.mean(per_station, axis=0), atol=1e-8)

    def test_input_validation(self, rng, wt_split):
        model, X, y, *_ = linear_st_model(rng)
        with pytest.raises(ValueError):
            forecast_point(model, (36.0, -119.0), 2010, 2005,
                           spec=ModelSpec(ModelKind.LINEAR), X_train=X, y_train=y)
        with pytest.raises(ValueError):
            forecast_point(model, (36.0, -119.0), 2000, 2001)
        train, _ = wt_split[RegimeKind.VARIABLE_DEPENDENT]
        vd_model = fit_design(ModelSpec(ModelKind.LINEAR), train)
        with pytest.raises(RegimeMismatch):
            forecast_point(vd_model, (36.0, -119.0), 2000, 2001,
                           spec=ModelSpec(ModelKind.LINEAR), X_train=X, y_train=y)

    def test_csv_rows(self, rng, tmp_path):
        model, X, y, *_ = linear_st_model(rng)
        fc = forecast_point(model, (36.0, -119.0), 1975, 2070,
                            spec=ModelSpec(ModelKind.LINEAR), X_train=X, y_train=y)
        p = tmp_path / "forecast.csv"
        fc.to_csv(p)
        with open(p, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 1152
        assert rows[0] == {"year": "1975", "month": "1",
                           "prediction": repr(float(fc.prediction[0])),
                           "lo": repr(float(fc.band_lo[0])),
                           "hi": repr(float(fc.band_hi[0])),
                           "statewide_mean": ""}


class TestImportance:
    def test_gain_finds_dominant_feature(self, rng):
        X = rng.normal(size=(400, 3))
        y = 5.0 * X[:, 0] + 0.01 * X[:, 1] + rng.normal(size=400) * 0.1
        spec = ModelSpec(ModelKind.GRADIENT_BOOSTING, {"n_rounds": 60, "max_depth": 3})
        model = fit(spec, X, y, ["a", "b", "c"])
        rep = importance_gain(model)
        assert rep.names == ["a", "b", "c"]
        assert rep.values.sum() == pytest.approx(1.0, abs=1e-9)
        assert rep.as_dict()["a"] > 0.9

    def test_gain_rejects_non_tree_models(self, rng):
        X = rng.normal(size=(50, 2))
        model = fit(ModelSpec(ModelKind.LINEAR), X, X[:, 0])
        with pytest.raises(UnsupportedModelKind):
            importance_gain(model)

    def test_permutation_finds_dominant_feature(self, rng):
        X = rng.normal(size=(300, 3))
        y = 4.0 * X[:, 2] + rng.normal(size=300) * 0.1
        model = fit(ModelSpec(ModelKind.LINEAR), X, y, ["a", "b", "c"])
        rep = importance_permutation(model, X, y)
        assert rep.method == "permutation"
        assert rep.values.sum() == pytest.approx(1.0, abs=1e-9)
        assert rep.as_dict()["c"] > 0.9

    def test_permutation_deterministic(self, rng):
        X = rng.normal(size=(200, 2))
        y = X[:, 0] + X[:, 1]
        model = fit(ModelSpec(ModelKind.LINEAR), X, y)
        a = importance_permutation(model, X, y, seed=4)
        b = importance_permutation(model, X, y, seed=4)
        np.testing.assert_array_equal(a.values, b.values)

    def test_groups_aggregate_onehots(self, wt_split):
        train, test = wt_split[RegimeKind.VARIABLE_DEPENDENT]
        spec = ModelSpec(ModelKind.GRADIENT_BOOSTING, {"n_rounds": 30, "max_depth": 3})
        model = fit_design(spec, train)
        gain = importance_gain(model, groups=train.groups)
        perm = importance_permutation(model, test.X, test.y, groups=train.groups)
        want = ["Month", "Year", "Latitude", "Longitude",
                "pH", "DissolvedOxygen", "SpecificConductance",
                "ClimateZone", "GeographicalType"]
        assert gain.names == want
        assert perm.names == want
        assert gain.values.sum() == pytest.approx(1.0, abs=1e-9)
        assert perm.values.sum() == pytest.approx(1.0, abs=1e-9)

    def test_zero_variance_raises(self, rng):
        X = rng.normal(size=(60, 2))
        y = np.full(60, 2.0)
        # a constant target grows no tree, so predictions ignore X entirely
        gb = fit(ModelSpec(ModelKind.GRADIENT_BOOSTING, {"n_rounds": 5}), X, y)
        with pytest.raises(ZeroVariance):
            importance_permutation(gb, X, y)
        with pytest.raises(ZeroVariance):
            importance_gain(gb)

    def test_column_mismatch(self, rng):
        X = rng.normal(size=(50, 3))
        model = fit(ModelSpec(ModelKind.LINEAR), X, X[:, 0])
        with pytest.raises(ColumnMismatch):
            importance_permutation(model, X[:, :2], X[:, 0])

    def test_csv_rendering(self, rng, tmp_path):
        X = rng.normal(size=(100, 2))
        y = X[:, 0] - X[:, 1]
        model = fit(ModelSpec(ModelKind.LINEAR), X, y, ["u", "v"])
        rep = importance_permutation(model, X, y)
        p = tmp_path / "imp.csv"
        rep.to_csv(p)
        with open(p, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["feature"] for r in rows] == ["u", "v"]
        total = sum(float(r["importance"]) for r in rows)
        assert total == pytest.approx(1.0, abs=1e-9)
