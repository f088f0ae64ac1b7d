"""Histogram-binned regression trees shared by the forest and boosting models.

Features are quantized once per ensemble: a feature with at most max_bins
distinct values keeps every exact threshold, a wider one gets quantile cuts.
Split search then runs on integer codes with cumulative-sum histograms.
Binning is monotone, so rescaling a feature by a positive constant leaves
codes, split choices, and predictions unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_BINS = 256


def bin_features(X: np.ndarray, max_bins: int = MAX_BINS) -> tuple[np.ndarray, list[np.ndarray]]:
    """Quantize each column; returns (codes, cuts).

    codes[i, j] = searchsorted(cuts[j], X[i, j], 'left'), so the candidate
    split "code <= b" is exactly "x <= cuts[j][b]".
    """
    X = np.asarray(X, dtype=float)
    n, p = X.shape
    codes = np.empty((n, p), dtype=np.int32)
    cuts: list[np.ndarray] = []
    for j in range(p):
        col = X[:, j]
        u = np.unique(col)
        if len(u) <= max_bins:
            cj = u[:-1]
        else:
            qs = np.quantile(col, np.linspace(0.0, 1.0, max_bins + 1)[1:-1])
            cj = np.unique(qs)
        codes[:, j] = np.searchsorted(cj, col, side="left")
        cuts.append(cj)
    return codes, cuts


def bin_codes(X: np.ndarray, cuts: list[np.ndarray]) -> np.ndarray:
    """Codes for new rows under an existing binning."""
    X = np.asarray(X, dtype=float)
    codes = np.empty(X.shape, dtype=np.int32)
    for j, cj in enumerate(cuts):
        codes[:, j] = np.searchsorted(cj, X[:, j], side="left")
    return codes


@dataclass
class RegressionTree:
    """Flat-array binary tree; negative child index marks a leaf."""

    feature: np.ndarray  # int, -1 at leaves
    threshold: np.ndarray  # float, raw cut value
    left: np.ndarray  # int child index
    right: np.ndarray
    value: np.ndarray  # float leaf value (defined only at leaves)
    gain_by_feature: np.ndarray  # float, total split gain credited per feature

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        n = X.shape[0]
        idx = np.zeros(n, dtype=np.int64)
        active = self.feature[idx] >= 0
        while np.any(active):
            rows = np.nonzero(active)[0]
            nodes = idx[rows]
            go_left = X[rows, self.feature[nodes]] <= self.threshold[nodes]
            idx[rows[go_left]] = self.left[nodes[go_left]]
            idx[rows[~go_left]] = self.right[nodes[~go_left]]
            active[rows] = self.feature[idx[rows]] >= 0
        return self.value[idx]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left,
            "right": self.right,
            "value": self.value,
            "gain_by_feature": self.gain_by_feature,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RegressionTree":
        return cls(
            feature=np.asarray(d["feature"], dtype=np.int64),
            threshold=np.asarray(d["threshold"], dtype=float),
            left=np.asarray(d["left"], dtype=np.int64),
            right=np.asarray(d["right"], dtype=np.int64),
            value=np.asarray(d["value"], dtype=float),
            gain_by_feature=np.asarray(d["gain_by_feature"], dtype=float),
        )


def grow_tree(
    codes: np.ndarray,
    cuts: list[np.ndarray],
    residuals: np.ndarray,
    rows: np.ndarray,
    *,
    max_depth: int | None,
    min_samples_leaf: int,
    lam: float,
    feature_pool: np.ndarray,
    mtry: int | None = None,
    rng: np.random.Generator | None = None,
) -> RegressionTree:
    """Grow one tree on pre-binned codes.

    residuals is the target the leaves approximate; lam is the L2 leaf
    penalty (leaf value = sum / (count + lam), lam 0 gives the plain mean).
    feature_pool restricts candidates for the whole tree; mtry, when set,
    additionally samples that many pool features per split using rng.
    Ties in gain resolve to the lowest (feature, bin) pair, so growth is
    deterministic for a fixed rng state.
    """
    residuals = np.asarray(residuals, dtype=float)
    feats: list[int] = []
    thresh: list[float] = []
    lefts: list[int] = []
    rights: list[int] = []
    values: list[float] = []
    gain_acc = np.zeros(codes.shape[1], dtype=float)

    def new_node() -> int:
        feats.append(-1)
        thresh.append(0.0)
        lefts.append(-1)
        rights.append(-1)
        values.append(0.0)
        return len(feats) - 1

    root = new_node()
    stack: list[tuple[int, np.ndarray, int]] = [(root, np.asarray(rows), 0)]
    while stack:
        node, node_rows, depth = stack.pop()
        res = residuals[node_rows]
        s = float(res.sum())
        n = len(node_rows)
        parent_score = s * s / (n + lam)

        can_split = n >= 2 * min_samples_leaf and (max_depth is None or depth < max_depth)
        best_gain = 0.0
        best = None
        if can_split:
            if mtry is not None and mtry < len(feature_pool):
                candidates = np.sort(rng.choice(feature_pool, size=mtry, replace=False))
            else:
                candidates = feature_pool
            for j in candidates:
                nbins = len(cuts[j]) + 1
                if nbins < 2:
                    continue
                cj = codes[node_rows, j]
                cnt = np.bincount(cj, minlength=nbins).astype(float)
                sm = np.bincount(cj, weights=res, minlength=nbins)
                cum_n = np.cumsum(cnt)[:-1]
                cum_s = np.cumsum(sm)[:-1]
                n_r = n - cum_n
                ok = (cum_n >= min_samples_leaf) & (n_r >= min_samples_leaf)
                if not ok.any():
                    continue
                gains = np.full(len(cum_n), -np.inf)
                gains[ok] = (
                    cum_s[ok] ** 2 / (cum_n[ok] + lam)
                    + (s - cum_s[ok]) ** 2 / (n_r[ok] + lam)
                    - parent_score
                )
                b = int(np.argmax(gains))
                if gains[b] > best_gain + 1e-12:
                    best_gain = float(gains[b])
                    best = (int(j), b)
        if best is None:
            values[node] = s / (n + lam)
            continue

        j, b = best
        feats[node] = j
        thresh[node] = float(cuts[j][b])
        gain_acc[j] += best_gain
        mask = codes[node_rows, j] <= b
        left_rows = node_rows[mask]
        right_rows = node_rows[~mask]
        li = new_node()
        ri = new_node()
        lefts[node] = li
        rights[node] = ri
        stack.append((ri, right_rows, depth + 1))
        stack.append((li, left_rows, depth + 1))

    return RegressionTree(
        feature=np.array(feats, dtype=np.int64),
        threshold=np.array(thresh, dtype=float),
        left=np.array(lefts, dtype=np.int64),
        right=np.array(rights, dtype=np.int64),
        value=np.array(values, dtype=float),
        gain_by_feature=gain_acc,
    )
