"""Epsilon-insensitive support vector regression with an RBF kernel.

The dual is solved by sequential minimal optimization over the stacked
variable vector theta = [alpha; alpha_star] with equality constraint
a.theta = 0, a = [+1...; -1...]. Working pairs are chosen by maximal
violation; the fit stops when the KKT gap m - M drops to the tolerance.
"""

from __future__ import annotations

import numpy as np

from .base import Model, ModelKind, ModelSpec, register, require


def _rbf(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    d2 = (
        np.sum(A**2, axis=1)[:, None]
        + np.sum(B**2, axis=1)[None, :]
        - 2.0 * A @ B.T
    )
    return np.exp(-gamma * np.maximum(d2, 0.0))


@register
class SupportVectorModel(Model):
    kind = ModelKind.SUPPORT_VECTOR

    def __init__(self, column_names, seed, *, sv_X, dual_coef, bias, gamma,
                 x_mean, x_scale):
        super().__init__(column_names, seed)
        self.sv_X = np.asarray(sv_X, dtype=float)
        self.dual_coef = np.asarray(dual_coef, dtype=float)
        self.bias = float(bias)
        self.gamma = float(gamma)
        self.x_mean = np.asarray(x_mean, dtype=float)
        self.x_scale = np.asarray(x_scale, dtype=float)
        self.dual_objective_ = float("nan")
        self.n_iterations_ = 0

    @property
    def n_support_(self) -> int:
        return len(self.dual_coef)

    def _predict_rows(self, X: np.ndarray) -> np.ndarray:
        if len(self.dual_coef) == 0:
            return np.full(X.shape[0], self.bias, dtype=float)
        Xs = (X - self.x_mean) / self.x_scale
        K = _rbf(Xs, self.sv_X, self.gamma)
        return K @ self.dual_coef + self.bias

    def _state(self) -> dict:
        return {
            "sv_X": self.sv_X,
            "dual_coef": self.dual_coef,
            "bias": self.bias,
            "gamma": self.gamma,
            "x_mean": self.x_mean,
            "x_scale": self.x_scale,
        }

    @classmethod
    def _from_state(cls, state, column_names, seed):
        state = dict(state)
        state["sv_X"] = np.asarray(state["sv_X"]).reshape(-1, len(state["x_mean"]))
        return cls(column_names, seed, **state)


def fit_support_vector(X: np.ndarray, y: np.ndarray, spec: ModelSpec | None = None,
                       column_names: list[str] | None = None) -> SupportVectorModel:
    """SMO fit of epsilon-SVR.

    Hyperparameters: C 1.0, epsilon 0.1 * sd(y), gamma 1/p (on standardized
    inputs), tol 1e-3, max_train_points 5000, max_iter 200000. Hitting the
    iteration cap keeps the best iterate and records a NoConvergence warning.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if spec is None:
        spec = ModelSpec(ModelKind.SUPPORT_VECTOR)
    if column_names is None:
        column_names = [f"x{j}" for j in range(p)]

    max_train = int(spec.param("max_train_points", 5000))
    require(max_train >= 1, f"max_train_points must be >= 1, got {max_train}")
    warnings: list[str] = []
    if n > max_train:
        keep = np.sort(np.random.default_rng(spec.seed).choice(n, size=max_train, replace=False))
        X, y = X[keep], y[keep]
        n = max_train
        warnings.append(f"subsampled to {max_train} training points")

    C = float(spec.param("C", 1.0))
    eps = float(spec.param("epsilon", 0.1 * float(np.std(y))))
    gamma = float(spec.param("gamma", 1.0 / p))
    tol = float(spec.param("tol", 1e-3))
    max_iter = int(spec.param("max_iter", 200000))
    require(C > 0.0, f"C must be positive, got {C}")
    require(eps >= 0.0, f"epsilon must be >= 0, got {eps}")
    require(gamma > 0.0, f"gamma must be positive, got {gamma}")
    require(tol > 0.0, f"tol must be positive, got {tol}")

    x_mean = X.mean(axis=0)
    x_scale = X.std(axis=0)
    x_scale[x_scale == 0.0] = 1.0
    Xs = (X - x_mean) / x_scale

    K = _rbf(Xs, Xs, gamma)
    a = np.concatenate([np.ones(n), -np.ones(n)])
    q = np.concatenate([eps - y, eps + y])
    theta = np.zeros(2 * n)
    G = q.copy()

    iterations = 0
    m = M = 0.0
    while iterations < max_iter:
        phi = -a * G
        up = np.where(a > 0, theta < C, theta > 0.0)
        low = np.where(a > 0, theta > 0.0, theta < C)
        if not up.any() or not low.any():
            break
        phi_up = np.where(up, phi, -np.inf)
        phi_low = np.where(low, phi, np.inf)
        i = int(np.argmax(phi_up))
        j = int(np.argmin(phi_low))
        m = float(phi_up[i])
        M = float(phi_low[j])
        if m - M <= tol:
            break

        ii, jj = i % n, j % n
        eta = max(K[ii, ii] + K[jj, jj] - 2.0 * K[ii, jj], 1e-12)
        t = (m - M) / eta
        # box limits in the +t direction for both endpoints
        t_i = C - theta[i] if a[i] > 0 else theta[i]
        t_j = theta[j] if a[j] > 0 else C - theta[j]
        t = min(t, t_i, t_j)
        if t <= 0.0:
            break
        theta[i] += a[i] * t
        theta[j] -= a[j] * t
        col = np.concatenate([K[:, ii], K[:, ii]]) - np.concatenate([K[:, jj], K[:, jj]])
        G += t * a * col
        iterations += 1

    if iterations >= max_iter:
        warnings.append(f"NoConvergence: iteration cap {max_iter} reached, gap {m - M:.3e}")

    free = (theta > 0.0) & (theta < C)
    phi = -a * G
    if free.any():
        bias = float(np.mean(phi[free]))
    else:
        bias = (m + M) / 2.0

    d = theta[:n] - theta[n:]
    sv = d != 0.0
    model = SupportVectorModel(
        column_names,
        spec.seed,
        sv_X=Xs[sv],
        dual_coef=d[sv],
        bias=bias,
        gamma=gamma,
        x_mean=x_mean,
        x_scale=x_scale,
    )
    model.dual_objective_ = -(0.5 * float(d @ (K @ d)) + float(q @ theta))
    model.n_iterations_ = iterations
    model.warnings = warnings
    model._finish(X, y)
    return model
