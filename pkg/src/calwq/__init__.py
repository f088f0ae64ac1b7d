"""Spatio-temporal modeling of California stream water quality.

The package covers the full pipeline: ingesting raw station CSVs,
deriving coastal and climate attributes, outlier screening and feature
assembly under two regimes, six regression model families, comparative
evaluation, and the downstream products (interpolated surfaces, long-run
forecasts, and feature importance reports).
"""

__version__ = "0.1.0"

from .errors import (
    CalwqError,
    ColumnMismatch,
    ConfigError,
    DegenerateInput,
    EmptyGrid,
    EmptyInput,
    EmptyMask,
    InvalidHyperparameter,
    InvalidSpec,
    LengthMismatch,
    MissingColumn,
    OutsideRaster,
    RegimeMismatch,
    SingularKernel,
    StageInputMissing,
    TooFewRecords,
    UnenrichedRecord,
    UnknownClimate,
    UnsupportedModelKind,
    ZeroVariance,
)
from .evaluation import EvalCell, EvaluationReport, r_squared, reference_value, rmse, run_comparison
from .geo import (
    COASTAL_THRESHOLD_KM,
    EARTH_RADIUS_KM,
    ClimateRaster,
    Coastline,
    classify_geotype,
    distance_to_coast_km,
    enrich_records,
    haversine_km,
    lookup_climate,
)
from .ingest import (
    IngestReport,
    ingest_files,
    merge_duplicate_stations,
    parse_csv,
    read_records_csv,
    write_records_csv,
)
from .models import (
    DEFAULT_GRIDS,
    Model,
    ModelKind,
    ModelSpec,
    crossval_rmse,
    fit,
    fit_design,
    load_model,
    tune,
)
from .preprocess import Bounds, Dataset, DesignMatrix, assemble, filter_outliers, split
from .products import (
    BandMethod,
    ForecastSeries,
    GridProduct,
    ImportanceReport,
    RegionPolygon,
    forecast_point,
    importance_gain,
    importance_permutation,
    interpolate_grid,
)
from .records import (
    ClimateEncoding,
    FeatureRegime,
    GeoType,
    Indicator,
    KoppenClass,
    RegimeKind,
    SampleRecord,
)
from .synth import DEFAULT_PARAMS, IndicatorParams, SynthSpec, Truth, generate, write_inputs

__all__ = [
    "__version__",
    "CalwqError", "ColumnMismatch", "ConfigError", "DegenerateInput",
    "EmptyGrid", "EmptyInput", "EmptyMask", "InvalidHyperparameter",
    "InvalidSpec", "LengthMismatch", "MissingColumn", "OutsideRaster",
    "RegimeMismatch", "SingularKernel", "StageInputMissing", "TooFewRecords",
    "UnenrichedRecord", "UnknownClimate", "UnsupportedModelKind", "ZeroVariance",
    "EvalCell", "EvaluationReport", "r_squared", "reference_value", "rmse",
    "run_comparison",
    "COASTAL_THRESHOLD_KM", "EARTH_RADIUS_KM", "ClimateRaster", "Coastline",
    "classify_geotype", "distance_to_coast_km", "enrich_records",
    "haversine_km", "lookup_climate",
    "IngestReport", "ingest_files", "merge_duplicate_stations", "parse_csv",
    "read_records_csv", "write_records_csv",
    "DEFAULT_GRIDS", "Model", "ModelKind", "ModelSpec", "crossval_rmse",
    "fit", "fit_design", "load_model", "tune",
    "Bounds", "Dataset", "DesignMatrix", "assemble", "filter_outliers", "split",
    "BandMethod", "ForecastSeries", "GridProduct", "ImportanceReport",
    "RegionPolygon", "forecast_point", "importance_gain",
    "importance_permutation", "interpolate_grid",
    "ClimateEncoding", "FeatureRegime", "GeoType", "Indicator", "KoppenClass",
    "RegimeKind", "SampleRecord",
    "DEFAULT_PARAMS", "IndicatorParams", "SynthSpec", "Truth", "generate",
    "write_inputs",
]
