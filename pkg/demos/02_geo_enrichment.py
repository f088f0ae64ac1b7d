"""
Coastline distance, geotype, and climate labels
===============================================
"""

import tempfile

import numpy as np

from calwq import (
    Coastline,
    ClimateRaster,
    classify_geotype,
    distance_to_coast_km,
    enrich_records,
    haversine_km,
    lookup_climate,
    read_records_csv,
)
from calwq.synth import SynthSpec, write_inputs

# great-circle distances with the mean Earth radius
sf = (37.7749, -122.4194)
la = (34.0522, -118.2437)
print(f"San Francisco -> Los Angeles: {haversine_km(sf, la):.1f} km")
print(f"one degree along the equator: {haversine_km((0, 0), (0, 1)):.4f} km")

out_dir = tempfile.mkdtemp(prefix="calwq_demo_")
paths = write_inputs(SynthSpec(n_stations=40, samples_per_station=5, seed=1), out_dir)

coast = Coastline.from_csv(paths["coastline"])
raster = ClimateRaster.from_files(paths["raster"], paths["legend"])

# stations within 8 km of the coastline count as Coastal, everything
# else as Inland; the boundary itself is Coastal
for lat, lon in [(37.80, -122.40), (36.50, -119.00), (34.00, -117.50)]:
    d = distance_to_coast_km((lat, lon), coast)
    geo = classify_geotype((lat, lon), coast)
    clim = lookup_climate((lat, lon), raster)
    print(f"({lat:6.2f}, {lon:8.2f})  coast {d:7.1f} km  {geo.value:8s}  {clim.sub}"
          f" (major {clim.major})")

# enrichment stamps both labels onto every record in one pass
records = read_records_csv(paths["data"])
enriched = enrich_records(records, coast, raster)
coastal = sum(r.geographical_type.value == "Coastal" for r in enriched)
print(f"\nenriched {len(enriched)} records: {coastal} coastal, "
      f"{len(enriched) - coastal} inland")

# the 8 km default is strict for stations sampled across the whole
# region; a looser cutoff shows the near-coast population
wide = enrich_records(records, coast, raster, threshold_km=60.0)
coastal_wide = sum(r.geographical_type.value == "Coastal" for r in wide)
print(f"with a 60 km cutoff: {coastal_wide} coastal")

majors = {}
for r in enriched:
    majors[r.climate_zone.major] = majors.get(r.climate_zone.major, 0) + 1
print("major climate counts:", dict(sorted(majors.items())))

# labels are cached per coordinate, so repeated stations cost one lookup
assert np.array_equal(
    [r.station_id for r in records], [r.station_id for r in enriched]
), "enrichment preserves order"
print("record order preserved")
