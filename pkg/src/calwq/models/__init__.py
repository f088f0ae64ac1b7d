"""The six regression families behind one fit/predict contract."""

from .base import Model, ModelKind, ModelSpec, load_model
from .boosting import GradientBoostingModel, fit_gradient_boosting
from .fitting import fit, fit_design
from .forest import RandomForestModel, fit_random_forest
from .gam import AdditiveModel, bspline_basis, fit_additive, second_difference_penalty, uniform_knots
from .gp import GaussianProcessModel, fit_gaussian_process
from .linear import LinearModel, fit_linear
from .svr import SupportVectorModel, fit_support_vector
from .tree import RegressionTree, bin_codes, bin_features, grow_tree
from .tuning import DEFAULT_GRIDS, crossval_rmse, kfold_indices, tune

__all__ = [
    "Model",
    "ModelKind",
    "ModelSpec",
    "load_model",
    "fit",
    "fit_design",
    "fit_linear",
    "fit_random_forest",
    "fit_gradient_boosting",
    "fit_gaussian_process",
    "fit_support_vector",
    "fit_additive",
    "LinearModel",
    "RandomForestModel",
    "GradientBoostingModel",
    "GaussianProcessModel",
    "SupportVectorModel",
    "AdditiveModel",
    "RegressionTree",
    "bin_features",
    "bin_codes",
    "grow_tree",
    "bspline_basis",
    "uniform_knots",
    "second_difference_penalty",
    "DEFAULT_GRIDS",
    "kfold_indices",
    "crossval_rmse",
    "tune",
]
