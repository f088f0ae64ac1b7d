"""
A century of monthly forecasts at one location
==============================================

Forecasting is prediction at future (month, year) inputs with the
location held fixed, plus an honest 95% band. The residual band uses
cross-validated RMSE; a bootstrap band is available as well. The series
below runs 1975-2070 at San Francisco (37.7749 N, 122.4194 W), and a
statewide mean track averages the same forecast over station sites.

Two models are contrasted on purpose. The additive model captures the
seasonal shape but its year spline is clamped outside the training
range, so its long-run trend flattens; the linear model extends the
trend indefinitely but reduces seasonality to a straight line in month.
"""

import numpy as np

from calwq import (
    BandMethod,
    FeatureRegime,
    Indicator,
    ModelKind,
    ModelSpec,
    RegimeKind,
    SynthSpec,
    assemble,
    filter_outliers,
    fit_design,
    forecast_point,
    generate,
    split,
)

dataset, truth = generate(SynthSpec(n_stations=100, samples_per_station=40, seed=5))
kept, _, _ = filter_outliers(dataset.records)
train, test = split(kept, 0.8, 0)
last_year = max(r.year for r in train)

regime = FeatureRegime(RegimeKind.SPATIO_TEMPORAL, Indicator.WATER_TEMPERATURE)
design = assemble(train, regime)
coords = np.unique([(r.latitude, r.longitude) for r in kept], axis=0)

sf = (37.7749, -122.4194)
series = {}
for kind in (ModelKind.ADDITIVE, ModelKind.LINEAR):
    spec = ModelSpec(kind, {}, 0)
    model = fit_design(spec, design)
    series[kind] = forecast_point(
        model, sf, 1975, 2070,
        band_method=BandMethod.RESIDUAL,
        spec=spec, X_train=design.X, y_train=design.y,
        station_coords=coords,
    )

gam, lm = series[ModelKind.ADDITIVE], series[ModelKind.LINEAR]
print(f"{len(gam)} monthly points ({gam.years[0]}-{gam.years[-1]}), "
      f"training data ends {last_year}")
print(f"additive band half-width {(gam.band_hi[0] - gam.prediction[0]):.2f}, "
      f"linear {(lm.band_hi[0] - lm.prediction[0]):.2f}")

# the linear trend keeps climbing; the clamped spline levels off once
# the year column leaves the training range
print("\ndecade  additive  linear  statewide(additive)")
for start in range(1975, 2070, 10):
    sel = (gam.years >= start) & (gam.years < start + 10)
    print(f"{start}s  {gam.prediction[sel].mean():8.2f} {lm.prediction[sel].mean():7.2f} "
          f"{gam.statewide_mean[sel].mean():13.2f}")

# seasonal swing, warmest month minus coldest (October vs April here)
by_month = [gam.prediction[gam.months == m].mean() for m in range(1, 13)]
hi, lo = int(np.argmax(by_month)) + 1, int(np.argmin(by_month)) + 1
print(f"\nadditive seasonal swing: month {hi} is "
      f"{by_month[hi - 1] - by_month[lo - 1]:.2f} warmer than month {lo}")
