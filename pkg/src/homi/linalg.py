"""Dense linear-algebra kernels used by the trainer.

Everything here is a thin, contract-checked layer over LAPACK (via numpy
and scipy): factorization-based linear solves, symmetric eigendecomposition,
the coupled two-sided system behind the weight update, and numerical rank.
All functions are pure and operate on float64 arrays.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg


class SingularMatrix(Exception):
    """A linear system is numerically singular (degenerate pivot)."""


class NotSymmetric(Exception):
    """Input matrix is not symmetric within tolerance."""


# Relative pivot threshold for declaring a factorization singular.
PIVOT_RTOL = 1e-12

# Relative symmetry tolerance for eigendecomposition inputs.
SYM_RTOL = 1e-10


def _as_matrix(a, name="matrix"):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if a.size and not np.isfinite(a).all():
        raise ValueError(f"{name} contains non-finite entries")
    return a


def solve_linear(A, R):
    """Solve A @ X = R by LU factorization with partial pivoting.

    Raises SingularMatrix when the smallest pivot magnitude falls below
    PIVOT_RTOL * ||A||_inf, which signals a degenerate system.  The inverse
    of A is never formed.
    """
    A = _as_matrix(A, "A")
    R = np.asarray(R, dtype=float)
    r2d = R if R.ndim == 2 else R.reshape(-1, 1)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"A must be square, got {A.shape}")
    if r2d.shape[0] != A.shape[0]:
        raise ValueError(f"row mismatch: A is {A.shape}, R has {r2d.shape[0]} rows")
    if A.shape[0] == 0:
        return np.zeros_like(r2d) if R.ndim == 2 else np.zeros(0)

    with warnings.catch_warnings():
        # getrf warns on exact zero pivots; we detect them ourselves below.
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        warnings.simplefilter("ignore", RuntimeWarning)
        lu, piv = scipy.linalg.lu_factor(A)
    pivots = np.abs(np.diag(lu))
    tol = PIVOT_RTOL * np.linalg.norm(A, np.inf)
    if pivots.min() < tol or pivots.min() == 0.0:
        raise SingularMatrix(
            f"pivot {pivots.min():.3e} below threshold {tol:.3e}"
        )
    X = scipy.linalg.lu_solve((lu, piv), r2d)
    return X if R.ndim == 2 else X.ravel()


@dataclass(frozen=True)
class SymEig:
    """Eigendecomposition M = U diag(values) U^T with ascending eigenvalues."""

    values: np.ndarray
    vectors: np.ndarray


def sym_eig(M):
    """Eigendecomposition of a symmetric matrix (ascending eigenvalues).

    Raises NotSymmetric when ||M - M^T||_F exceeds the relative tolerance.
    """
    M = _as_matrix(M, "M")
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"M must be square, got {M.shape}")
    asym = np.linalg.norm(M - M.T)
    if asym > SYM_RTOL * max(1.0, np.linalg.norm(M)):
        raise NotSymmetric(f"asymmetry {asym:.3e} exceeds tolerance")
    values, vectors = np.linalg.eigh(M)
    return SymEig(values=values, vectors=vectors)


def solve_w_system(P, G, E, R):
    """Solve P @ W + G @ W @ E = R for W, with E symmetric PSD.

    Diagonalizes E = U diag(d) U^T, transforms the right-hand side, solves
    one shifted system (P + d_i G) per column, and rotates back.  This is
    the stationarity system of the weight subproblem; it avoids inverting
    the (possibly singular) graph curvature term.

    Raises SingularMatrix when any shifted system is numerically singular,
    which signals an ill-posed hyper-parameter combination.
    """
    P = _as_matrix(P, "P")
    G = _as_matrix(G, "G")
    E = _as_matrix(E, "E")
    R = _as_matrix(R, "R")
    m = P.shape[0]
    ell = E.shape[0]
    if P.shape != (m, m) or G.shape != (m, m):
        raise ValueError("P and G must be square with equal dimension")
    if E.shape[0] != E.shape[1]:
        raise ValueError("E must be square")
    if R.shape != (m, ell):
        raise ValueError(f"R must be {m}x{ell}, got {R.shape}")

    eig = sym_eig(0.5 * (E + E.T))
    Rp = R @ eig.vectors
    Wp = np.empty_like(Rp)
    for i, d in enumerate(eig.values):
        Wp[:, i] = solve_linear(P + d * G, Rp[:, i])
    return Wp @ eig.vectors.T


def matrix_rank(M, tol=None):
    """Number of singular values of M strictly exceeding tol.

    With tol=None the standard numerical-rank convention is used:
    tol = max(rows, cols) * eps * sigma_max.
    """
    M = _as_matrix(M, "M")
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    if tol is None:
        tol = max(M.shape) * np.finfo(float).eps * sv.max()
    return int((sv > tol).sum())
