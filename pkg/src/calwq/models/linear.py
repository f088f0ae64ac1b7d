"""Ordinary least squares via the normal equations."""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateInput
from .base import Model, ModelKind, ModelSpec, register


@register
class LinearModel(Model):
    kind = ModelKind.LINEAR

    def __init__(self, column_names, seed, coef: np.ndarray, intercept: float):
        super().__init__(column_names, seed)
        self.coef = np.asarray(coef, dtype=float)
        self.intercept = float(intercept)

    def _predict_rows(self, X: np.ndarray) -> np.ndarray:
        return X @ self.coef + self.intercept

    def _state(self) -> dict:
        return {"coef": self.coef, "intercept": self.intercept}

    @classmethod
    def _from_state(cls, state, column_names, seed):
        return cls(column_names, seed, np.asarray(state["coef"]), state["intercept"])


def fit_linear(X: np.ndarray, y: np.ndarray, spec: ModelSpec | None = None,
               column_names: list[str] | None = None) -> LinearModel:
    """OLS with intercept, solved by Cholesky on the normal equations.

    A singular system falls back to a 1e-8 ridge on the slope block and
    records a RankDeficient warning; if even that fails the input is
    degenerate.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if column_names is None:
        column_names = [f"x{j}" for j in range(p)]
    seed = spec.seed if spec is not None else 0

    A = np.hstack([np.ones((n, 1)), X])
    gram = A.T @ A
    rhs = A.T @ y
    warnings: list[str] = []
    try:
        c = np.linalg.cholesky(gram)
        # fp rounding lets Cholesky "succeed" on a singular Gram; a collapsed
        # pivot is the symptom, so treat it the same as an outright failure
        d = np.diag(c)
        if d.min() <= 1e-7 * d.max():
            raise np.linalg.LinAlgError("effectively singular")
        beta = np.linalg.solve(c.T, np.linalg.solve(c, rhs))
    except np.linalg.LinAlgError:
        warnings.append("RankDeficient: normal equations singular, ridge 1e-8 applied")
        ridge = np.eye(p + 1) * 1e-8
        ridge[0, 0] = 0.0
        try:
            c = np.linalg.cholesky(gram + ridge)
            beta = np.linalg.solve(c.T, np.linalg.solve(c, rhs))
        except np.linalg.LinAlgError as exc:
            raise DegenerateInput("normal equations singular even with ridge") from exc
    if not np.all(np.isfinite(beta)):
        raise DegenerateInput("non-finite least-squares solution")

    model = LinearModel(column_names, seed, beta[1:], beta[0])
    model.warnings = warnings
    model._finish(X, y)
    return model
