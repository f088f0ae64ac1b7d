"""Pipeline command line.

Stages write plain files into the output directory plus a JSON manifest
recording input hashes, seeds, and versions. Re-running a stage with the
same inputs and seeds reproduces its artifacts byte for byte (manifests may
differ in timestamp only).

Exit codes: 0 success, 2 configuration error, 3 missing stage input,
4 any other categorized pipeline error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import datetime
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import CalwqError, ConfigError, StageInputMissing
from .evaluation import EvaluationReport, run_comparison
from .geo import ClimateRaster, Coastline, enrich_records
from .ingest import merge_duplicate_stations, parse_csv, read_records_csv, write_records_csv
from .models import DEFAULT_GRIDS, ModelKind, ModelSpec, fit_design, load_model, tune
from .preprocess import assemble, filter_outliers, split
from .products import (
    BandMethod,
    RegionPolygon,
    forecast_point,
    importance_gain,
    importance_permutation,
    interpolate_grid,
)
from .records import ClimateEncoding, FeatureRegime, Indicator, RegimeKind
from .synth import DEFAULT_PARAMS, IndicatorParams, SynthSpec, write_inputs

CONFIG_ENV = "CALWQ_CONFIG"

_DEFAULTS = {
    "out_dir": "calwq_out",
    "seed": 0,
    "split_ratio": 0.8,
    "climate_encoding": "major",
    "models": "all",
    "targets": "all",
    "regimes": "st,vd",
    "tune": False,
    "repeats": 1,
    "jobs": 1,
    "reference_columns": True,
    "bbox": "32.0,42.5,-125.0,-114.0",
    "resolution": 0.1,
}


def _typed(raw: str):
    text = raw.strip()
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


class RunConfig:
    """Flat key=value configuration with --set overrides."""

    def __init__(self, values: dict | None = None):
        self.values = dict(_DEFAULTS)
        if values:
            self.values.update(values)

    @classmethod
    def load(cls, path: str | None, overrides: list[str] | None = None) -> "RunConfig":
        values: dict = {}
        if path is None:
            path = os.environ.get(CONFIG_ENV)
        if path:
            if not os.path.exists(path):
                raise ConfigError(f"config file not found: {path}")
            with open(path, "r", encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, 1):
                    line = line.strip()
                    if not line or line.startswith("#"):
                        continue
                    if "=" not in line:
                        raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
                    key, _, raw = line.partition("=")
                    values[key.strip()] = _typed(raw)
        for item in overrides or []:
            if "=" not in item:
                raise ConfigError(f"--set expects key=value, got {item!r}")
            key, _, raw = item.partition("=")
            values[key.strip()] = _typed(raw)
        return cls(values)

    def get(self, key: str, default=None):
        return self.values.get(key, default)

    def out_dir(self) -> str:
        return str(self.values["out_dir"])

    def artifact(self, name: str) -> str:
        return os.path.join(self.out_dir(), name)

    def input_path(self, key: str, default_name: str) -> str:
        """Configured path for an input, else the artifact of a prior stage."""
        configured = self.values.get(key)
        return str(configured) if configured else self.artifact(default_name)

    def model_overrides(self, kind: ModelKind) -> dict:
        prefix = f"model.{kind.value}."
        return {k[len(prefix):]: v for k, v in self.values.items() if k.startswith(prefix)}

    def kinds(self, raw: str | None = None) -> tuple[ModelKind, ...]:
        text = raw if raw is not None else str(self.values["models"])
        if text == "all":
            return tuple(ModelKind)
        return tuple(ModelKind.from_name(tok.strip()) for tok in text.split(","))

    def targets(self, raw: str | None = None) -> tuple[Indicator, ...]:
        text = raw if raw is not None else str(self.values["targets"])
        if text == "all":
            return tuple(Indicator)
        return tuple(Indicator.from_short(tok.strip()) for tok in text.split(","))

    def regimes(self, raw: str | None = None) -> tuple[RegimeKind, ...]:
        text = raw if raw is not None else str(self.values["regimes"])
        out = []
        for tok in text.split(","):
            tok = tok.strip()
            try:
                out.append(RegimeKind(tok))
            except ValueError:
                raise ConfigError(f"unknown regime {tok!r}, expected st or vd") from None
        return tuple(out)

    def encoding(self) -> ClimateEncoding:
        name = str(self.values["climate_encoding"]).lower()
        try:
            return ClimateEncoding(name)
        except ValueError:
            raise ConfigError(f"unknown climate_encoding {name!r}") from None

    def bbox(self) -> tuple[float, float, float, float]:
        parts = [float(t) for t in str(self.values["bbox"]).split(",")]
        if len(parts) != 4:
            raise ConfigError(f"bbox needs 4 comma-separated numbers, got {self.values['bbox']!r}")
        return tuple(parts)  # type: ignore[return-value]


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _require(path: str, what: str) -> str:
    if not os.path.exists(path):
        raise StageInputMissing(f"{what} not found at {path} (run the producing stage first)")
    return path


def _write_manifest(cfg: RunConfig, stage: str, inputs: dict[str, str],
                    outputs: list[str], extra: dict | None = None) -> None:
    doc = {
        "stage": stage,
        "version": __version__,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "seed": cfg.get("seed"),
        "inputs": {name: {"path": p, "sha256": _sha256(p)} for name, p in inputs.items()},
        "outputs": [os.path.basename(p) for p in outputs],
        "config": {k: v for k, v in sorted(cfg.values.items())},
    }
    if extra:
        doc.update(extra)
    with open(cfg.artifact(f"{stage}.manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)


def _synth_spec(cfg: RunConfig) -> SynthSpec:
    params = {}
    for ind in Indicator:
        base = DEFAULT_PARAMS[ind]
        fields = {}
        for name in ("intercept", "lat_slope", "season_amp", "year_slope",
                     "coast_amp", "coast_scale", "wt_coupling", "noise_sd"):
            key = f"synth.{ind.short}.{name}"
            fields[name] = float(cfg.get(key, getattr(base, name)))
        params[ind] = IndicatorParams(**fields)
    return SynthSpec(
        n_stations=int(cfg.get("synth.n_stations", 500)),
        samples_per_station=int(cfg.get("synth.samples_per_station", 100)),
        year_lo=int(cfg.get("synth.year_lo", 1975)),
        year_hi=int(cfg.get("synth.year_hi", 2022)),
        seed=int(cfg.get("seed", 0)),
        params=params,
    )


def cmd_synth(cfg: RunConfig, args) -> None:
    os.makedirs(cfg.out_dir(), exist_ok=True)
    spec = _synth_spec(cfg)
    paths = write_inputs(spec, cfg.out_dir())
    _write_manifest(cfg, "synth", {}, list(paths.values()),
                    extra={"n_records": spec.n_stations * spec.samples_per_station})
    print(f"synth: wrote {len(paths)} files to {cfg.out_dir()}")


def cmd_ingest(cfg: RunConfig, args) -> None:
    os.makedirs(cfg.out_dir(), exist_ok=True)
    data_csv = _require(cfg.input_path("data_csv", "data.csv"), "input data CSV")
    schema = None
    schema_path = cfg.get("schema")
    if schema_path:
        schema = {}
        with open(_require(str(schema_path), "schema file"), "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#") or "=" not in line:
                    continue
                ours, _, theirs = line.partition("=")
                schema[ours.strip()] = theirs.strip()
    records, report = parse_csv(data_csv, schema=schema)
    records = merge_duplicate_stations(records, report)
    out = cfg.artifact("records.csv")
    write_records_csv(out, records, labelled=False)
    report_path = cfg.artifact("ingest_report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump({
            "rows_read": report.rows_read,
            "rows_kept": report.rows_kept,
            "rows_dropped_na": report.rows_dropped_na,
            "rows_dropped_invalid": report.rows_dropped_invalid,
            "stations_merged": report.stations_merged,
            "categories": report.categories,
        }, fh, indent=2)
    _write_manifest(cfg, "ingest", {"data_csv": data_csv}, [out, report_path])
    print(f"ingest: kept {report.rows_kept}/{report.rows_read} rows "
          f"({report.rows_dropped_na} NA, {report.rows_dropped_invalid} invalid)")


def cmd_enrich(cfg: RunConfig, args) -> None:
    records_path = _require(cfg.artifact("records.csv"), "ingest output")
    coast_path = _require(cfg.input_path("coastline", "coastline.csv"), "coastline")
    raster_path = _require(cfg.input_path("raster", "climate.asc"), "climate raster")
    legend_path = _require(cfg.input_path("legend", "climate_legend.csv"), "climate legend")

    records = read_records_csv(records_path, labelled=False)
    coast = Coastline.from_csv(coast_path)
    raster = ClimateRaster.from_files(raster_path, legend_path)
    enriched = enrich_records(records, coast, raster)
    out = cfg.artifact("enriched.csv")
    write_records_csv(out, enriched, labelled=True)
    _write_manifest(cfg, "enrich",
                    {"records": records_path, "coastline": coast_path,
                     "raster": raster_path, "legend": legend_path}, [out])
    print(f"enrich: labelled {len(enriched)} records")


def cmd_clean(cfg: RunConfig, args) -> None:
    enriched_path = _require(cfg.artifact("enriched.csv"), "enrich output")
    records = read_records_csv(enriched_path, labelled=True)
    kept, removed, bounds = filter_outliers(records)
    out = cfg.artifact("clean.csv")
    write_records_csv(out, kept, labelled=True)
    bounds_path = cfg.artifact("outlier_bounds.json")
    with open(bounds_path, "w", encoding="utf-8") as fh:
        json.dump({ind.short: {"mean": b.mean, "halfwidth": b.halfwidth,
                               "lo": b.lo, "hi": b.hi}
                   for ind, b in bounds.items()}, fh, indent=2)
    _write_manifest(cfg, "clean", {"enriched": enriched_path}, [out, bounds_path],
                    extra={"kept": len(kept), "removed": len(removed)})
    print(f"clean: kept {len(kept)}, removed {len(removed)} outlier records")


def _load_clean(cfg: RunConfig):
    return read_records_csv(_require(cfg.artifact("clean.csv"), "clean output"), labelled=True)


def _model_name(kind: ModelKind, target: Indicator, regime: RegimeKind) -> str:
    return f"model_{kind.value}_{target.short}_{regime.value}.npz"


def cmd_train(cfg: RunConfig, args) -> None:
    records = _load_clean(cfg)
    seed = int(cfg.get("seed", 0))
    train, _ = split(records, float(cfg.get("split_ratio", 0.8)), seed)
    kinds = cfg.kinds(args.models)
    targets = cfg.targets(args.targets)
    regimes = cfg.regimes(args.regimes)
    do_tune = bool(args.tune or cfg.get("tune"))

    outputs = []
    for target in targets:
        for regime_kind in regimes:
            regime = FeatureRegime(regime_kind, target, cfg.encoding())
            design = assemble(train, regime)
            linear_cols = [c for g in design.groups for c in g.columns]
            for kind in kinds:
                spec = ModelSpec(kind, cfg.model_overrides(kind), seed)
                if do_tune:
                    spec = tune(spec, design.X, design.y, DEFAULT_GRIDS[kind], seed=seed,
                                column_names=design.column_names,
                                linear_columns=linear_cols or None)
                model = fit_design(spec, design)
                path = cfg.artifact(_model_name(kind, target, regime_kind))
                model.save(path)
                outputs.append(path)
                print(f"train: {kind.value} {target.short} {regime_kind.value} "
                      f"rmse(train) {model.train_rmse:.4f} -> {os.path.basename(path)}")
    _write_manifest(cfg, "train", {"clean": cfg.artifact("clean.csv")}, outputs,
                    extra={"tuned": do_tune})


def _eval_group(records, kinds, target, regime_kind, seed, ratio, encoding,
                tune_models, repeats, overrides):
    return run_comparison(records, kinds, (target,), (regime_kind,), seed=seed,
                          split_ratio=ratio, climate_encoding=encoding,
                          tune_models=tune_models, repeats=repeats,
                          hyperparameters=overrides)


def cmd_evaluate(cfg: RunConfig, args) -> None:
    records = _load_clean(cfg)
    seed = int(cfg.get("seed", 0))
    ratio = float(cfg.get("split_ratio", 0.8))
    kinds = cfg.kinds(args.models)
    targets = cfg.targets(args.targets)
    regimes = cfg.regimes(args.regimes)
    repeats = int(args.repeats or cfg.get("repeats", 1))
    do_tune = bool(args.tune or cfg.get("tune"))
    jobs = int(args.jobs or cfg.get("jobs", 1))
    overrides = {kind: cfg.model_overrides(kind) for kind in kinds}

    groups = [(target, regime) for target in targets for regime in regimes]
    if jobs > 1 and len(groups) > 1:
        report = EvaluationReport()
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_eval_group, records, kinds, t, r, seed, ratio,
                                   cfg.encoding(), do_tune, repeats, overrides)
                       for t, r in groups]
            partials = [f.result() for f in futures]
        report.metadata = partials[0].metadata
        for target, regime in groups:
            for part in partials:
                for key, cell in part.entries.items():
                    if key[1] is target and key[2] is regime:
                        report.entries[key] = cell
    else:
        report = run_comparison(records, kinds, targets, regimes, seed=seed,
                                split_ratio=ratio, climate_encoding=cfg.encoding(),
                                tune_models=do_tune, repeats=repeats,
                                hyperparameters=overrides)

    csv_path = cfg.artifact("report.csv")
    txt_path = cfg.artifact("report.txt")
    report.to_csv(csv_path)
    with open(txt_path, "w", encoding="utf-8") as fh:
        fh.write(report.to_text(include_reference=bool(cfg.get("reference_columns"))))
    _write_manifest(cfg, "evaluate", {"clean": cfg.artifact("clean.csv")},
                    [csv_path, txt_path],
                    extra={"cells": len(report.entries), "tuned": do_tune})
    print(report.to_text(include_reference=bool(cfg.get("reference_columns"))))
    print(f"evaluate: {len(report.entries)} cells -> {csv_path}")


def cmd_interpolate(cfg: RunConfig, args) -> None:
    kind = ModelKind.from_name(args.model)
    indicator = Indicator.from_short(args.indicator)
    model_path = _require(cfg.artifact(_model_name(kind, indicator, RegimeKind.SPATIO_TEMPORAL)),
                          f"trained {kind.value} model for {indicator.short} (st)")
    region_path = _require(cfg.input_path("region", "region.csv"), "region polygon")
    model = load_model(model_path)
    mask = RegionPolygon.from_csv(region_path)
    companions = None
    if args.companion_source:
        companions = {}
        for pair in args.companion_source.split(","):
            name, _, raw = pair.partition("=")
            companions[name.strip()] = float(raw)
    grid = interpolate_grid(model, cfg.bbox(), float(args.resolution or cfg.get("resolution")),
                            args.month, args.year, mask, indicator.short, companions)
    base = f"grid_{indicator.short}_{args.year}_{args.month:02d}"
    csv_path = cfg.artifact(base + ".csv")
    asc_path = cfg.artifact(base + ".asc")
    grid.to_csv(csv_path)
    grid.to_ascii(asc_path)
    _write_manifest(cfg, "interpolate",
                    {"model": model_path, "region": region_path}, [csv_path, asc_path],
                    extra={"cells": int((~np.isnan(grid.values)).sum())})
    print(f"interpolate: {grid.n_lat}x{grid.n_lon} grid -> {csv_path}")


def cmd_forecast(cfg: RunConfig, args) -> None:
    kind = ModelKind.from_name(args.model)
    indicator = Indicator.from_short(args.indicator)
    model_path = _require(cfg.artifact(_model_name(kind, indicator, RegimeKind.SPATIO_TEMPORAL)),
                          f"trained {kind.value} model for {indicator.short} (st)")
    model = load_model(model_path)
    records = _load_clean(cfg)
    seed = int(cfg.get("seed", 0))
    train, _ = split(records, float(cfg.get("split_ratio", 0.8)), seed)
    regime = FeatureRegime(RegimeKind.SPATIO_TEMPORAL, indicator)
    design = assemble(train, regime)
    coords = sorted({(rec.latitude, rec.longitude) for rec in records})
    spec = ModelSpec(kind, cfg.model_overrides(kind), seed)
    series = forecast_point(
        model, (args.lat, args.lon), args.start, args.end,
        band_method=BandMethod(args.band),
        spec=spec, X_train=design.X, y_train=design.y,
        station_coords=np.array(coords), seed=seed,
    )
    out = cfg.artifact(f"forecast_{indicator.short}_{args.start}_{args.end}.csv")
    series.to_csv(out)
    _write_manifest(cfg, "forecast", {"model": model_path, "clean": cfg.artifact("clean.csv")},
                    [out], extra={"rows": len(series)})
    print(f"forecast: {len(series)} monthly rows -> {out}")


def cmd_importance(cfg: RunConfig, args) -> None:
    kind = ModelKind.from_name(args.model)
    indicator = Indicator.from_short(args.indicator)
    regime_kind = RegimeKind(args.regime)
    model_path = _require(cfg.artifact(_model_name(kind, indicator, regime_kind)),
                          f"trained {kind.value} model for {indicator.short} ({regime_kind.value})")
    model = load_model(model_path)
    records = _load_clean(cfg)
    seed = int(cfg.get("seed", 0))
    _, test = split(records, float(cfg.get("split_ratio", 0.8)), seed)
    regime = FeatureRegime(regime_kind, indicator, cfg.encoding())
    design = assemble(test, regime)

    outputs = []
    inputs = {"model": model_path, "clean": cfg.artifact("clean.csv")}
    if kind in (ModelKind.RANDOM_FOREST, ModelKind.GRADIENT_BOOSTING):
        gain = importance_gain(model, tuple(design.groups))
        path = cfg.artifact(f"importance_gain_{kind.value}_{indicator.short}_{regime_kind.value}.csv")
        gain.to_csv(path)
        outputs.append(path)
    perm = importance_permutation(model, design.X, design.y, seed=seed,
                                  groups=tuple(design.groups))
    path = cfg.artifact(f"importance_permutation_{kind.value}_{indicator.short}_{regime_kind.value}.csv")
    perm.to_csv(path)
    outputs.append(path)
    _write_manifest(cfg, "importance", inputs, outputs)
    print(f"importance: wrote {len(outputs)} reports to {cfg.out_dir()}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"key=value config file (or ${CONFIG_ENV})")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key")
    common.add_argument("--out-dir", help="output directory (config key out_dir)")

    parser = argparse.ArgumentParser(prog="calwq",
                                     description="Water-quality modeling pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("synth", parents=[common], help="generate synthetic input files")
    sub.add_parser("ingest", parents=[common], help="parse the data CSV into records")
    sub.add_parser("enrich", parents=[common], help="attach climate and geo labels")
    sub.add_parser("clean", parents=[common], help="remove outlier records")

    for name in ("train", "evaluate"):
        p = sub.add_parser(name, parents=[common],
                           help="fit models" if name == "train" else "score the model grid")
        p.add_argument("--models", default=None, help="all or comma list: lm,rf,gb,gp,svm,gam")
        p.add_argument("--targets", default=None, help="all or comma list: ph,do,sc,wt")
        p.add_argument("--regimes", default=None, help="comma list: st,vd")
        p.add_argument("--tune", action="store_true", help="grid-search hyperparameters first")
        if name == "evaluate":
            p.add_argument("--repeats", type=int, default=None, help="average over re-splits")
            p.add_argument("--jobs", type=int, default=None, help="parallel worker count")

    p = sub.add_parser("interpolate", parents=[common], help="predict a spatial grid")
    p.add_argument("--model", default="gam")
    p.add_argument("--indicator", required=True)
    p.add_argument("--month", type=int, required=True)
    p.add_argument("--year", type=int, required=True)
    p.add_argument("--resolution", type=float, default=None)
    p.add_argument("--companion-source", default=None,
                   help="name=value list supplying extra columns for variable-dependent models")

    p = sub.add_parser("forecast", parents=[common], help="monthly series with a 95%% band")
    p.add_argument("--model", default="gam")
    p.add_argument("--indicator", required=True)
    p.add_argument("--lat", type=float, default=37.7749)
    p.add_argument("--lon", type=float, default=-122.4194)
    p.add_argument("--start", type=int, default=1975)
    p.add_argument("--end", type=int, default=2070)
    p.add_argument("--band", choices=[m.value for m in BandMethod], default="residual")

    p = sub.add_parser("importance", parents=[common], help="feature importance reports")
    p.add_argument("--model", default="gb")
    p.add_argument("--indicator", required=True)
    p.add_argument("--regime", choices=[r.value for r in RegimeKind], default="vd")

    return parser


_COMMANDS = {
    "synth": cmd_synth,
    "ingest": cmd_ingest,
    "enrich": cmd_enrich,
    "clean": cmd_clean,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "interpolate": cmd_interpolate,
    "forecast": cmd_forecast,
    "importance": cmd_importance,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.load(args.config, args.set)
        if args.out_dir:
            cfg.values["out_dir"] = args.out_dir
        _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except StageInputMissing as exc:
        print(f"missing stage input: {exc}", file=sys.stderr)
        return 3
    except CalwqError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
