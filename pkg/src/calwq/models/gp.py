"""Gaussian process regression with a squared-exponential kernel.

Exact posterior on at most max_train_points rows (seeded subsample beyond
that). Inputs are standardized internally; the target is optionally
standardized too (standardize_y, default on) so kernel scales stay O(1).
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from ..errors import SingularKernel
from .base import Model, ModelKind, ModelSpec, register, require

_PREDICT_BATCH = 4096


def _sq_exp(A: np.ndarray, B: np.ndarray, lengthscales: np.ndarray, signal: float) -> np.ndarray:
    """k(a, b) = signal * exp(-0.5 * sum(((a - b) / ell)^2))."""
    As = A / lengthscales
    Bs = B / lengthscales
    d2 = (
        np.sum(As**2, axis=1)[:, None]
        + np.sum(Bs**2, axis=1)[None, :]
        - 2.0 * As @ Bs.T
    )
    return signal * np.exp(-0.5 * np.maximum(d2, 0.0))


@register
class GaussianProcessModel(Model):
    kind = ModelKind.GAUSSIAN_PROCESS

    def __init__(self, column_names, seed, *, X_std, alpha, chol, lengthscales,
                 signal, nugget, x_mean, x_scale, y_mean, y_scale):
        super().__init__(column_names, seed)
        self.X_std = np.asarray(X_std, dtype=float)
        self.alpha = np.asarray(alpha, dtype=float)
        self.chol = np.asarray(chol, dtype=float)
        self.lengthscales = np.asarray(lengthscales, dtype=float)
        self.signal = float(signal)
        self.nugget = float(nugget)
        self.x_mean = np.asarray(x_mean, dtype=float)
        self.x_scale = np.asarray(x_scale, dtype=float)
        self.y_mean = float(y_mean)
        self.y_scale = float(y_scale)

    def _predict_rows(self, X: np.ndarray) -> np.ndarray:
        return self.predict_with_variance(X)[0]

    def predict_with_variance(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and variance (variance includes the nugget)."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        Xs = (X - self.x_mean) / self.x_scale
        mean = np.empty(X.shape[0], dtype=float)
        var = np.empty(X.shape[0], dtype=float)
        for start in range(0, X.shape[0], _PREDICT_BATCH):
            stop = min(start + _PREDICT_BATCH, X.shape[0])
            k_star = _sq_exp(self.X_std, Xs[start:stop], self.lengthscales, self.signal)
            mean[start:stop] = k_star.T @ self.alpha
            v = sla.solve_triangular(self.chol, k_star, lower=True)
            var[start:stop] = self.signal - np.sum(v**2, axis=0) + self.nugget
        np.maximum(var, 0.0, out=var)
        mean = self.y_mean + self.y_scale * mean
        var = var * self.y_scale**2
        return mean, var

    def _state(self) -> dict:
        return {
            "X_std": self.X_std,
            "alpha": self.alpha,
            "chol": self.chol,
            "lengthscales": self.lengthscales,
            "signal": self.signal,
            "nugget": self.nugget,
            "x_mean": self.x_mean,
            "x_scale": self.x_scale,
            "y_mean": self.y_mean,
            "y_scale": self.y_scale,
        }

    @classmethod
    def _from_state(cls, state, column_names, seed):
        return cls(column_names, seed, **state)


def _chol_with_escalation(K: np.ndarray, nugget: float) -> tuple[np.ndarray, float, int]:
    """Cholesky of K + nugget*I, escalating the nugget x10 up to 3 times."""
    for attempt in range(4):
        scaled = nugget * (10.0**attempt)
        try:
            L = np.linalg.cholesky(K + scaled * np.eye(K.shape[0]))
            return L, scaled, attempt
        except np.linalg.LinAlgError:
            continue
    raise SingularKernel(f"kernel matrix not positive definite even at nugget {nugget * 1000.0}")


def fit_gaussian_process(X: np.ndarray, y: np.ndarray, spec: ModelSpec | None = None,
                         column_names: list[str] | None = None) -> GaussianProcessModel:
    """Exact GP fit; lengthscale and signal chosen by log marginal likelihood.

    Hyperparameters: lengthscale (scalar or per-dim, skips the grid),
    signal, nugget (default 1e-2 * var of the fitted target), max_train_points
    2000, standardize_y True, lengthscale_grid (0.5, 1.0, 2.0), signal_grid
    (1.0,).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if n < 1:
        raise ValueError("gaussian process needs at least one training point")
    if spec is None:
        spec = ModelSpec(ModelKind.GAUSSIAN_PROCESS)
    if column_names is None:
        column_names = [f"x{j}" for j in range(p)]

    max_train = int(spec.param("max_train_points", 2000))
    require(max_train >= 1, f"max_train_points must be >= 1, got {max_train}")
    warnings: list[str] = []
    if n > max_train:
        keep = np.sort(np.random.default_rng(spec.seed).choice(n, size=max_train, replace=False))
        X, y = X[keep], y[keep]
        n = max_train
        warnings.append(f"subsampled to {max_train} training points")

    x_mean = X.mean(axis=0)
    x_scale = X.std(axis=0)
    x_scale[x_scale == 0.0] = 1.0
    Xs = (X - x_mean) / x_scale

    if bool(spec.param("standardize_y", True)):
        y_mean = float(np.mean(y))
        y_scale = float(np.std(y)) or 1.0
    else:
        y_mean, y_scale = 0.0, 1.0
    ys = (y - y_mean) / y_scale

    var_y = float(np.var(ys)) or 1.0
    nugget = float(spec.param("nugget", 1e-2 * var_y))
    require(nugget > 0.0, f"nugget must be positive, got {nugget}")

    fixed_ell = spec.param("lengthscale", None)
    if fixed_ell is not None:
        ell_grid = [np.broadcast_to(np.asarray(fixed_ell, dtype=float), (p,)).copy()]
    else:
        ell_grid = [np.full(p, float(s)) for s in spec.param("lengthscale_grid", (0.5, 1.0, 2.0))]
    sig_grid = [float(s) for s in spec.param("signal_grid", (float(spec.param("signal", 1.0)),))]

    best = None
    for ell in ell_grid:
        for sig in sig_grid:
            K = _sq_exp(Xs, Xs, ell, sig)
            L, used_nugget, attempts = _chol_with_escalation(K, nugget)
            alpha = np.linalg.solve(L.T, np.linalg.solve(L, ys))
            lml = (
                -0.5 * float(ys @ alpha)
                - float(np.sum(np.log(np.diag(L))))
                - 0.5 * n * np.log(2.0 * np.pi)
            )
            if best is None or lml > best[0] + 1e-12:
                best = (lml, ell, sig, L, alpha, used_nugget, attempts)

    _, ell, sig, L, alpha, used_nugget, attempts = best
    if attempts > 0:
        warnings.append(f"nugget escalated x{10**attempts} to {used_nugget}")

    model = GaussianProcessModel(
        column_names,
        spec.seed,
        X_std=Xs,
        alpha=alpha,
        chol=L,
        lengthscales=ell,
        signal=sig,
        nugget=used_nugget,
        x_mean=x_mean,
        x_scale=x_scale,
        y_mean=y_mean,
        y_scale=y_scale,
    )
    model.warnings = warnings
    model._finish(X, y)
    return model
