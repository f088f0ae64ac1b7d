"""Random forest regression on binned trees."""

from __future__ import annotations

import numpy as np

from .base import Model, ModelKind, ModelSpec, register, require
from .tree import RegressionTree, bin_features, grow_tree


@register
class RandomForestModel(Model):
    kind = ModelKind.RANDOM_FOREST

    def __init__(self, column_names, seed, trees: list[RegressionTree]):
        super().__init__(column_names, seed)
        self.trees = trees

    def _predict_rows(self, X: np.ndarray) -> np.ndarray:
        acc = np.zeros(X.shape[0], dtype=float)
        for tree in self.trees:
            acc += tree.predict(X)
        return acc / len(self.trees)

    def gain_importance(self) -> np.ndarray:
        total = np.zeros(len(self.column_names), dtype=float)
        for tree in self.trees:
            total += tree.gain_by_feature
        return total

    def _state(self) -> dict:
        return {"trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def _from_state(cls, state, column_names, seed):
        return cls(column_names, seed, [RegressionTree.from_dict(d) for d in state["trees"]])


def fit_random_forest(X: np.ndarray, y: np.ndarray, spec: ModelSpec | None = None,
                      column_names: list[str] | None = None) -> RandomForestModel:
    """Bagged trees averaging; per-tree randomness comes from (seed, tree index).

    Hyperparameters: n_trees 300, max_depth None (unbounded), min_samples_leaf
    5, mtry ceil(p/3) feature candidates per split, bootstrap True.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if spec is None:
        spec = ModelSpec(ModelKind.RANDOM_FOREST)
    if column_names is None:
        column_names = [f"x{j}" for j in range(p)]

    n_trees = int(spec.param("n_trees", 300))
    max_depth = spec.param("max_depth", None)
    min_leaf = int(spec.param("min_samples_leaf", 5))
    mtry = int(spec.param("mtry", int(np.ceil(p / 3))))
    bootstrap = bool(spec.param("bootstrap", True))
    require(n_trees >= 1, f"n_trees must be >= 1, got {n_trees}")
    require(min_leaf >= 1, f"min_samples_leaf must be >= 1, got {min_leaf}")
    require(1 <= mtry <= p, f"mtry must be in [1, {p}], got {mtry}")
    require(max_depth is None or int(max_depth) >= 1, f"bad max_depth {max_depth}")

    codes, cuts = bin_features(X)
    pool = np.arange(p)
    all_rows = np.arange(n)
    trees: list[RegressionTree] = []
    for t in range(n_trees):
        rng = np.random.default_rng([spec.seed, t])
        rows = rng.integers(0, n, size=n) if bootstrap else all_rows
        trees.append(
            grow_tree(
                codes,
                cuts,
                y,
                rows,
                max_depth=None if max_depth is None else int(max_depth),
                min_samples_leaf=min_leaf,
                lam=0.0,
                feature_pool=pool,
                mtry=mtry if mtry < p else None,
                rng=rng,
            )
        )

    model = RandomForestModel(column_names, spec.seed, trees)
    model._finish(X, y)
    return model
