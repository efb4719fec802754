"""Instance-similarity graph: sample Pearson matrix, s-NN adjacency, Laplacian."""

from dataclasses import dataclass

import numpy as np


class InvalidS(Exception):
    """Neighbor count s is out of the valid range [1, n-1]."""


@dataclass(frozen=True)
class NeighborGraph:
    """Pearson matrix R, sparse directed s-NN adjacency S, symmetrized Laplacian L."""

    R: np.ndarray
    S: np.ndarray
    L: np.ndarray
    s: int


def pearson_matrix(X):
    """Pairwise Pearson correlation between the rows (samples) of X.

    Correlation is taken across the feature coordinates of each sample pair.
    Rows with zero variance get correlation 0 against everything (a constant
    sample carries no correlation signal); the diagonal is always 1.  The
    covariance normalization cancels in the ratio, so the result does not
    depend on the ddof convention.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be 2-dimensional")
    n, m = X.shape
    if m < 2:
        raise ValueError("need at least 2 feature coordinates per sample")
    Xc = X - X.mean(axis=1, keepdims=True)
    ss = np.sqrt((Xc * Xc).sum(axis=1))
    # Constant rows center to values at roundoff scale, not exact zeros.
    degenerate = ss <= 1e-12 * np.maximum(1.0, np.abs(X).max(axis=1))
    denom = np.where(degenerate, 1.0, ss)
    R = (Xc @ Xc.T) / np.outer(denom, denom)
    R[degenerate, :] = 0.0
    R[:, degenerate] = 0.0
    np.clip(R, -1.0, 1.0, out=R)
    np.fill_diagonal(R, 1.0)
    return R


def snn_adjacency(R, s):
    """Keep, per row, the s largest off-diagonal correlations; zero the rest.

    Selection is by signed value (largest correlations, not magnitudes);
    the instance itself is never a neighbor.  Ties are broken toward the
    smaller column index so results are reproducible.  Rows are selected
    independently, so S is generally asymmetric.
    """
    R = np.asarray(R, dtype=float)
    n = R.shape[0]
    if R.shape != (n, n):
        raise ValueError("R must be square")
    if not 1 <= s <= n - 1:
        raise InvalidS(f"s={s} not in [1, {n - 1}]")
    masked = R.copy()
    np.fill_diagonal(masked, -np.inf)
    # Stable sort on the negated row keeps ascending-index order among ties.
    order = np.argsort(-masked, axis=1, kind="stable")[:, :s]
    S = np.zeros_like(R)
    rows = np.repeat(np.arange(n), s)
    cols = order.ravel()
    S[rows, cols] = R[rows, cols]
    np.fill_diagonal(S, 0.0)
    return S


def laplacian(S):
    """Symmetrized graph Laplacian of a (possibly asymmetric) adjacency.

    Builds L0 = Q - S with Q the diagonal of row sums, then returns
    (L0 + L0^T) / 2.  Row-sum degrees guarantee 1^T L 1 = 0 even after
    symmetrization.
    """
    S = np.asarray(S, dtype=float)
    n = S.shape[0]
    if S.shape != (n, n):
        raise ValueError("S must be square")
    L0 = np.diag(S.sum(axis=1)) - S
    return 0.5 * (L0 + L0.T)


def build_graph(X, s):
    """Convenience constructor: Pearson -> s-NN -> Laplacian."""
    R = pearson_matrix(X)
    S = snn_adjacency(R, s)
    return NeighborGraph(R=R, S=S, L=laplacian(S), s=s)
