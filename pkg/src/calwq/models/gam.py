"""Additive model: penalized cubic B-spline smoothers fit by backfitting.

Numeric features get a uniform-knot cubic B-spline basis with a
second-difference coefficient penalty, so linear signals pass through the
penalty unshrunk. Low-cardinality columns (one-hot blocks in particular)
enter linearly. Smoothing strength per feature is picked by generalized
cross-validation on a fixed grid during the first backfitting sweep.
"""

from __future__ import annotations

import numpy as np

from .base import Model, ModelKind, ModelSpec, register, require

DEGREE = 3
LAMBDA_GRID = (0.1, 1.0, 10.0, 100.0, 1000.0)

#: Columns with at most this many distinct training values enter linearly.
LINEAR_CARDINALITY = 4


def uniform_knots(lo: float, hi: float, n_basis: int, degree: int = DEGREE) -> np.ndarray:
    """Uniformly spaced extended knot vector supporting n_basis splines on [lo, hi]."""
    nseg = n_basis - degree
    if nseg < 1:
        raise ValueError(f"n_basis must exceed the degree, got {n_basis}")
    step = (hi - lo) / nseg
    return lo + step * np.arange(-degree, nseg + degree + 1)


def bspline_basis(x: np.ndarray, knots: np.ndarray, degree: int = DEGREE) -> np.ndarray:
    """Evaluate every B-spline in the knot vector at x, Cox-de Boor recursion.

    x outside [knots[degree], knots[-degree-1]] is clamped to the boundary,
    which makes downstream extrapolation constant.
    """
    x = np.asarray(x, dtype=float)
    n_basis = len(knots) - degree - 1
    lo = knots[degree]
    hi = knots[n_basis]
    u = np.clip(x, lo, hi)
    span = np.clip(np.searchsorted(knots, u, side="right") - 1, degree, n_basis - 1)

    npts = len(u)
    N = np.zeros((npts, degree + 1))
    N[:, 0] = 1.0
    left = np.zeros((npts, degree + 1))
    right = np.zeros((npts, degree + 1))
    for j in range(1, degree + 1):
        left[:, j] = u - knots[span + 1 - j]
        right[:, j] = knots[span + j] - u
        saved = np.zeros(npts)
        for r in range(j):
            temp = N[:, r] / (right[:, r + 1] + left[:, j - r])
            N[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        N[:, j] = saved

    B = np.zeros((npts, n_basis))
    cols = span[:, None] - degree + np.arange(degree + 1)[None, :]
    B[np.arange(npts)[:, None], cols] = N
    return B


def second_difference_penalty(n_basis: int) -> np.ndarray:
    """D such that ||D beta||^2 penalizes curvature; null space holds linear beta."""
    D = np.zeros((n_basis - 2, n_basis))
    for i in range(n_basis - 2):
        D[i, i : i + 3] = (1.0, -2.0, 1.0)
    return D


class _SplineTerm:
    def __init__(self, col: int, x: np.ndarray, n_basis: int):
        self.col = col
        self.lo = float(np.min(x))
        self.hi = float(np.max(x))
        self.knots = uniform_knots(self.lo, self.hi, n_basis)
        self.B = bspline_basis(x, self.knots)
        self.BtB = self.B.T @ self.B
        D = second_difference_penalty(n_basis)
        self.P = D.T @ D
        self.lam: float | None = None
        self.beta = np.zeros(n_basis)
        self.offset = 0.0

    def select_lambda(self, r: np.ndarray, grid) -> None:
        n = len(r)
        best = None
        for lam in grid:
            beta, edf = self._solve(r, lam)
            rss = float(np.sum((r - self.B @ beta) ** 2))
            gcv = n * rss / (n - edf) ** 2
            if best is None or gcv < best[0] - 1e-12:
                best = (gcv, lam)
        self.lam = best[1]

    def _solve(self, r: np.ndarray, lam: float) -> tuple[np.ndarray, float]:
        A = self.BtB + lam * self.P
        rhs = self.B.T @ r
        try:
            beta = np.linalg.solve(A, rhs)
            edf = float(np.trace(np.linalg.solve(A, self.BtB)))
        except np.linalg.LinAlgError:
            A = A + 1e-10 * np.eye(A.shape[0])
            beta = np.linalg.solve(A, rhs)
            edf = float(np.trace(np.linalg.solve(A, self.BtB)))
        return beta, edf

    def fit_partial(self, r: np.ndarray) -> np.ndarray:
        beta, _ = self._solve(r, self.lam)
        f = self.B @ beta
        self.offset = float(np.mean(f))
        self.beta = beta
        return f - self.offset

    def predict(self, x: np.ndarray) -> np.ndarray:
        return bspline_basis(x, self.knots) @ self.beta - self.offset

    def state(self) -> dict:
        return {"type": "spline", "col": self.col, "knots": self.knots,
                "beta": self.beta, "offset": self.offset}


class _LinearTerm:
    def __init__(self, col: int, x: np.ndarray):
        self.col = col
        self.center = float(np.mean(x))
        self.xc = x - self.center
        ss = float(np.sum(self.xc**2))
        self.ss = ss if ss > 0.0 else None
        self.slope = 0.0
        self.lam = 0.0

    def select_lambda(self, r: np.ndarray, grid) -> None:
        pass

    def fit_partial(self, r: np.ndarray) -> np.ndarray:
        if self.ss is None:
            self.slope = 0.0
            return np.zeros(len(r))
        self.slope = float(self.xc @ r) / self.ss
        return self.slope * self.xc

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.slope * (x - self.center)

    def state(self) -> dict:
        return {"type": "linear", "col": self.col, "center": self.center, "slope": self.slope}


@register
class AdditiveModel(Model):
    kind = ModelKind.ADDITIVE

    def __init__(self, column_names, seed, alpha: float, terms: list):
        super().__init__(column_names, seed)
        self.alpha = float(alpha)
        self.terms = terms

    def _predict_rows(self, X: np.ndarray) -> np.ndarray:
        pred = np.full(X.shape[0], self.alpha, dtype=float)
        for term in self.terms:
            pred += term.predict(X[:, term.col])
        return pred

    def component(self, col: int, x: np.ndarray) -> np.ndarray:
        """Fitted f_j evaluated at x, for the term on column col."""
        for term in self.terms:
            if term.col == col:
                return term.predict(np.asarray(x, dtype=float))
        raise KeyError(f"no additive term on column {col}")

    def _state(self) -> dict:
        return {"alpha": self.alpha, "terms": [t.state() for t in self.terms]}

    @classmethod
    def _from_state(cls, state, column_names, seed):
        terms = []
        for ts in state["terms"]:
            if ts["type"] == "spline":
                term = _SplineTerm.__new__(_SplineTerm)
                term.col = ts["col"]
                term.knots = np.asarray(ts["knots"])
                term.beta = np.asarray(ts["beta"])
                term.offset = ts["offset"]
            else:
                term = _LinearTerm.__new__(_LinearTerm)
                term.col = ts["col"]
                term.center = ts["center"]
                term.slope = ts["slope"]
            terms.append(term)
        return cls(column_names, seed, state["alpha"], terms)


def fit_additive(X: np.ndarray, y: np.ndarray, spec: ModelSpec | None = None,
                 column_names: list[str] | None = None,
                 linear_columns: list[int] | None = None) -> AdditiveModel:
    """Backfit an additive model.

    Hyperparameters: n_basis 10, max_sweeps 100, tol 1e-6, lambda_grid
    LAMBDA_GRID, linear_columns (indices forced to a linear term; defaults
    to columns with few distinct values). Components are centered over the
    training rows; alpha is the target mean.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if spec is None:
        spec = ModelSpec(ModelKind.ADDITIVE)
    if column_names is None:
        column_names = [f"x{j}" for j in range(p)]

    n_basis = int(spec.param("n_basis", 10))
    max_sweeps = int(spec.param("max_sweeps", 100))
    tol = float(spec.param("tol", 1e-6))
    grid = tuple(spec.param("lambda_grid", LAMBDA_GRID))
    require(n_basis > DEGREE, f"n_basis must exceed {DEGREE}, got {n_basis}")
    require(max_sweeps >= 1, f"max_sweeps must be >= 1, got {max_sweeps}")
    require(tol > 0.0, f"tol must be positive, got {tol}")
    require(len(grid) > 0, "lambda_grid must be non-empty")

    if linear_columns is None:
        linear_columns = spec.param("linear_columns", None)
    forced_linear = set(linear_columns) if linear_columns is not None else None

    terms: list = []
    for j in range(p):
        col = X[:, j]
        distinct = len(np.unique(col))
        linear = distinct <= LINEAR_CARDINALITY if forced_linear is None else j in forced_linear
        if linear or distinct < 2:
            terms.append(_LinearTerm(j, col))
        else:
            terms.append(_SplineTerm(j, col, min(n_basis, max(DEGREE + 1, distinct))))

    alpha = float(np.mean(y))
    resid_base = y - alpha
    fs = [np.zeros(n) for _ in terms]
    total = np.zeros(n)
    warnings: list[str] = []

    converged = False
    for sweep in range(max_sweeps):
        max_delta = 0.0
        for j, term in enumerate(terms):
            partial = resid_base - (total - fs[j])
            if sweep == 0:
                term.select_lambda(partial, grid)
            new_f = term.fit_partial(partial)
            max_delta = max(max_delta, float(np.max(np.abs(new_f - fs[j]))) if n else 0.0)
            total += new_f - fs[j]
            fs[j] = new_f
        if max_delta <= tol:
            converged = True
            break
    if not converged and max_sweeps > 1:
        warnings.append(f"NoConvergence: backfitting hit {max_sweeps} sweeps")

    model = AdditiveModel(column_names, spec.seed, alpha, terms)
    model.warnings = warnings
    model._finish(X, y)
    return model
