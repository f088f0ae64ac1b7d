"""Gradient boosting with squared error on binned trees."""

from __future__ import annotations

import numpy as np

from .base import Model, ModelKind, ModelSpec, register, require
from .tree import RegressionTree, bin_features, grow_tree


@register
class GradientBoostingModel(Model):
    kind = ModelKind.GRADIENT_BOOSTING

    def __init__(self, column_names, seed, base_score: float, learning_rate: float,
                 trees: list[RegressionTree]):
        super().__init__(column_names, seed)
        self.base_score = float(base_score)
        self.learning_rate = float(learning_rate)
        self.trees = trees
        self.train_losses: list[float] = []

    def _predict_rows(self, X: np.ndarray) -> np.ndarray:
        pred = np.full(X.shape[0], self.base_score, dtype=float)
        for tree in self.trees:
            pred += self.learning_rate * tree.predict(X)
        return pred

    def gain_importance(self) -> np.ndarray:
        total = np.zeros(len(self.column_names), dtype=float)
        for tree in self.trees:
            total += tree.gain_by_feature
        return total

    def _state(self) -> dict:
        return {
            "base_score": self.base_score,
            "learning_rate": self.learning_rate,
            "trees": [t.to_dict() for t in self.trees],
            "train_losses": self.train_losses,
        }

    @classmethod
    def _from_state(cls, state, column_names, seed):
        model = cls(
            column_names,
            seed,
            state["base_score"],
            state["learning_rate"],
            [RegressionTree.from_dict(d) for d in state["trees"]],
        )
        model.train_losses = list(state["train_losses"])
        return model


def fit_gradient_boosting(X: np.ndarray, y: np.ndarray, spec: ModelSpec | None = None,
                          column_names: list[str] | None = None) -> GradientBoostingModel:
    """Stagewise trees on residuals from a mean base score.

    Hyperparameters: n_rounds 500, learning_rate 0.1, max_depth 6,
    min_samples_leaf 5, subsample 0.8, colsample 0.8, lam 1.0 (L2 leaf
    penalty). Leaf values are sum(residual) / (count + lam). Mean squared
    training loss is recorded after every round.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if spec is None:
        spec = ModelSpec(ModelKind.GRADIENT_BOOSTING)
    if column_names is None:
        column_names = [f"x{j}" for j in range(p)]

    n_rounds = int(spec.param("n_rounds", 500))
    lr = float(spec.param("learning_rate", 0.1))
    max_depth = int(spec.param("max_depth", 6))
    min_leaf = int(spec.param("min_samples_leaf", 5))
    subsample = float(spec.param("subsample", 0.8))
    colsample = float(spec.param("colsample", 0.8))
    lam = float(spec.param("lam", 1.0))
    require(n_rounds >= 1, f"n_rounds must be >= 1, got {n_rounds}")
    require(lr > 0.0, f"learning_rate must be positive, got {lr}")
    require(max_depth >= 1, f"max_depth must be >= 1, got {max_depth}")
    require(min_leaf >= 1, f"min_samples_leaf must be >= 1, got {min_leaf}")
    require(0.0 < subsample <= 1.0, f"subsample must be in (0, 1], got {subsample}")
    require(0.0 < colsample <= 1.0, f"colsample must be in (0, 1], got {colsample}")
    require(lam >= 0.0, f"lam must be >= 0, got {lam}")

    codes, cuts = bin_features(X)
    base = float(np.mean(y))
    pred = np.full(n, base, dtype=float)
    n_sub = max(1, int(round(subsample * n)))
    n_col = max(1, int(round(colsample * p)))
    all_rows = np.arange(n)
    all_cols = np.arange(p)

    model = GradientBoostingModel(column_names, spec.seed, base, lr, [])
    for m in range(n_rounds):
        rng = np.random.default_rng([spec.seed, m])
        rows = np.sort(rng.choice(n, size=n_sub, replace=False)) if n_sub < n else all_rows
        pool = np.sort(rng.choice(p, size=n_col, replace=False)) if n_col < p else all_cols
        residuals = y - pred
        tree = grow_tree(
            codes,
            cuts,
            residuals,
            rows,
            max_depth=max_depth,
            min_samples_leaf=min_leaf,
            lam=lam,
            feature_pool=pool,
        )
        model.trees.append(tree)
        pred += lr * tree.predict(X)
        model.train_losses.append(float(np.mean((y - pred) ** 2)))

    model.n_train = n
    model.train_rmse = float(np.sqrt(model.train_losses[-1]))
    return model
