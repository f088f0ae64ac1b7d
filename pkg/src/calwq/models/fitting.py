"""Single entry point mapping a ModelSpec to the right fit routine."""

from __future__ import annotations

import numpy as np

from ..errors import UnsupportedModelKind
from ..preprocess import DesignMatrix
from .base import Model, ModelKind, ModelSpec
from .boosting import fit_gradient_boosting
from .forest import fit_random_forest
from .gam import fit_additive
from .gp import fit_gaussian_process
from .linear import fit_linear
from .svr import fit_support_vector


def fit(spec: ModelSpec, X: np.ndarray, y: np.ndarray,
        column_names: list[str] | None = None,
        linear_columns: list[int] | None = None) -> Model:
    """Fit any model kind; linear_columns only matters for the additive model."""
    kind = spec.kind
    if kind is ModelKind.LINEAR:
        return fit_linear(X, y, spec, column_names)
    if kind is ModelKind.RANDOM_FOREST:
        return fit_random_forest(X, y, spec, column_names)
    if kind is ModelKind.GRADIENT_BOOSTING:
        return fit_gradient_boosting(X, y, spec, column_names)
    if kind is ModelKind.GAUSSIAN_PROCESS:
        return fit_gaussian_process(X, y, spec, column_names)
    if kind is ModelKind.SUPPORT_VECTOR:
        return fit_support_vector(X, y, spec, column_names)
    if kind is ModelKind.ADDITIVE:
        return fit_additive(X, y, spec, column_names, linear_columns)
    raise UnsupportedModelKind(f"no fit routine for {kind}")


def fit_design(spec: ModelSpec, design: DesignMatrix) -> Model:
    """Fit on a DesignMatrix; one-hot columns become linear GAM terms."""
    linear_cols = [c for g in design.groups for c in g.columns]
    return fit(spec, design.X, design.y, design.column_names, linear_cols or None)
