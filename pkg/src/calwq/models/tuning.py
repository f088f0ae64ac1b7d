"""Hyperparameter selection by k-fold cross-validated RMSE."""

from __future__ import annotations

import numpy as np

from ..errors import EmptyGrid
from .base import ModelKind, ModelSpec
from .fitting import fit

#: Small documented grids; tuning cost stays bounded at <= 50 points.
DEFAULT_GRIDS: dict[ModelKind, list[dict]] = {
    ModelKind.LINEAR: [{}],
    ModelKind.RANDOM_FOREST: [{"min_samples_leaf": 2}, {"min_samples_leaf": 5}],
    ModelKind.GRADIENT_BOOSTING: [
        {"learning_rate": 0.1, "max_depth": 6},
        {"learning_rate": 0.1, "max_depth": 4},
        {"learning_rate": 0.05, "max_depth": 6},
        {"learning_rate": 0.05, "max_depth": 4},
    ],
    ModelKind.GAUSSIAN_PROCESS: [{}],
    ModelKind.SUPPORT_VECTOR: [{"C": 1.0}, {"C": 10.0}],
    ModelKind.ADDITIVE: [{}],
}


def kfold_indices(n: int, k: int, seed: int) -> list[np.ndarray]:
    """k disjoint folds covering range(n), from a seeded permutation."""
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(fold) for fold in np.array_split(perm, k)]


def crossval_rmse(spec: ModelSpec, X: np.ndarray, y: np.ndarray, k: int = 5,
                  seed: int = 0, column_names: list[str] | None = None,
                  linear_columns: list[int] | None = None) -> float:
    """Mean held-out RMSE over k seeded folds."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    folds = kfold_indices(len(y), k, seed)
    scores = []
    for fold in folds:
        mask = np.ones(len(y), dtype=bool)
        mask[fold] = False
        model = fit(spec, X[mask], y[mask], column_names, linear_columns)
        resid = y[fold] - model.predict(X[fold])
        scores.append(float(np.sqrt(np.mean(resid**2))))
    return float(np.mean(scores))


def tune(spec: ModelSpec, X: np.ndarray, y: np.ndarray,
         grid: list[dict] | None = None, k: int = 5, seed: int = 0,
         column_names: list[str] | None = None,
         linear_columns: list[int] | None = None) -> ModelSpec:
    """Return spec overridden with the grid point of lowest CV RMSE.

    Ties keep the earliest grid entry. grid None uses the documented
    default for the spec's kind.
    """
    if grid is None:
        grid = DEFAULT_GRIDS[spec.kind]
    if not grid:
        raise EmptyGrid(f"empty hyperparameter grid for {spec.kind}")
    best_spec = None
    best_score = np.inf
    for point in grid:
        candidate = spec.with_params(**point)
        score = crossval_rmse(candidate, X, y, k=k, seed=seed,
                              column_names=column_names, linear_columns=linear_columns)
        if score < best_score:
            best_score = score
            best_spec = candidate
    return best_spec
