"""Shared model contract: specs, the fitted-model base class, serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import ColumnMismatch, InvalidHyperparameter, UnsupportedModelKind

ARTIFACT_VERSION = 1


class ModelKind(Enum):
    LINEAR = "lm"
    RANDOM_FOREST = "rf"
    GRADIENT_BOOSTING = "gb"
    GAUSSIAN_PROCESS = "gp"
    SUPPORT_VECTOR = "svm"
    ADDITIVE = "gam"

    @classmethod
    def from_name(cls, name: str) -> "ModelKind":
        for kind in cls:
            if kind.value == name or kind.name == name.upper():
                return kind
        raise UnsupportedModelKind(f"unknown model kind {name!r}")


@dataclass(frozen=True)
class ModelSpec:
    """What to fit: a kind, its hyperparameter overrides, and a seed."""

    kind: ModelKind
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 0

    def param(self, name: str, default):
        return self.hyperparameters.get(name, default)

    def with_params(self, **overrides) -> "ModelSpec":
        merged = dict(self.hyperparameters)
        merged.update(overrides)
        return ModelSpec(self.kind, merged, self.seed)

    def with_seed(self, seed: int) -> "ModelSpec":
        return ModelSpec(self.kind, dict(self.hyperparameters), seed)


def require(condition: bool, message: str) -> None:
    if not condition:
        raise InvalidHyperparameter(message)


class Model:
    """Base fitted model. Subclasses set kind and implement _predict_rows."""

    kind: ModelKind

    def __init__(self, column_names: list[str], seed: int):
        self.column_names = list(column_names)
        self.seed = seed
        self.n_train = 0
        self.train_rmse = float("nan")
        self.warnings: list[str] = []

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != len(self.column_names):
            raise ColumnMismatch(
                f"{self.kind.value}: expected {len(self.column_names)} columns, got {X.shape[1]}"
            )
        return self._predict_rows(X)

    def _predict_rows(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _finish(self, X: np.ndarray, y: np.ndarray) -> None:
        """Record training size and in-sample RMSE."""
        self.n_train = len(y)
        resid = y - self.predict(X)
        self.train_rmse = float(np.sqrt(np.mean(resid**2)))

    # -- serialization ----------------------------------------------------
    # Artifacts are npz files: numeric state lives in binary arrays, and a
    # JSON header (stored as a string array) carries structure and scalars.

    def _state(self) -> dict:
        """Kind-specific fitted state; may contain numpy arrays anywhere."""
        raise NotImplementedError

    @classmethod
    def _from_state(cls, state: dict, column_names: list[str], seed: int) -> "Model":
        raise NotImplementedError

    def save(self, path) -> None:
        arrays: dict[str, np.ndarray] = {}

        def encode(obj):
            if isinstance(obj, np.ndarray):
                key = f"a{len(arrays)}"
                arrays[key] = obj
                return {"__npz__": key}
            if isinstance(obj, dict):
                return {k: encode(v) for k, v in obj.items()}
            if isinstance(obj, (list, tuple)):
                return [encode(v) for v in obj]
            if isinstance(obj, (np.floating, np.integer)):
                return obj.item()
            return obj

        doc = {
            "version": ARTIFACT_VERSION,
            "kind": self.kind.value,
            "column_names": self.column_names,
            "seed": self.seed,
            "n_train": self.n_train,
            "train_rmse": self.train_rmse,
            "warnings": self.warnings,
            "state": encode(self._state()),
        }
        with open(path, "wb") as fh:
            np.savez(fh, __meta__=np.array(json.dumps(doc)), **arrays)


_REGISTRY: dict[str, type] = {}


def register(cls: type) -> type:
    _REGISTRY[cls.kind.value] = cls
    return cls


def load_model(path) -> Model:
    with np.load(path, allow_pickle=False) as data:
        doc = json.loads(str(data["__meta__"][()]))

        def decode(obj):
            if isinstance(obj, dict):
                if set(obj) == {"__npz__"}:
                    return data[obj["__npz__"]]
                return {k: decode(v) for k, v in obj.items()}
            if isinstance(obj, list):
                return [decode(v) for v in obj]
            return obj

        if doc.get("version") != ARTIFACT_VERSION:
            raise UnsupportedModelKind(f"artifact version {doc.get('version')} not supported")
        cls = _REGISTRY.get(doc["kind"])
        if cls is None:
            raise UnsupportedModelKind(f"no model class registered for kind {doc['kind']!r}")
        model = cls._from_state(decode(doc["state"]), doc["column_names"], doc["seed"])
    model.n_train = doc["n_train"]
    model.train_rmse = doc["train_rmse"]
    model.warnings = list(doc["warnings"])
    return model
