"""Dense real linear algebra kernels: symmetric eigendecomposition, singular
values, linear solves and matrix norms.

All computations are float64. Eigen/singular values are returned in
descending order, and eigenvectors follow a deterministic sign convention:
the entry of largest magnitude in each column is made nonnegative (ties
broken on the lowest index), so repeated runs and permutation tests see
identical output.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, ParameterError, SingularMatrixError

SYMMETRY_TOL = 1e-10
PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class EigDecomposition:
    """Full spectrum of a symmetric matrix.

    eigenvalues are sorted descending; eigenvectors[:, i] is the unit-norm,
    sign-fixed eigenvector of eigenvalues[i].
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ParameterError("matrix contains non-finite entries")
    return a


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is nonnegative."""
    v = vectors.copy()
    idx = np.argmax(np.abs(v), axis=0)
    flip = v[idx, np.arange(v.shape[1])] < 0
    v[:, flip] *= -1.0
    return v


def sym_eig(m) -> EigDecomposition:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending."""
    a = _as_matrix(m)
    n, k = a.shape
    if n != k:
        raise DimensionError(f"matrix must be square, got {n}x{k}")
    if n > 0 and np.max(np.abs(a - a.T)) > SYMMETRY_TOL:
        raise DimensionError("matrix is not symmetric within tolerance")
    vals, vecs = np.linalg.eigh(a)
    order = np.argsort(-vals, kind="stable")
    return EigDecomposition(vals[order], fix_signs(vecs[:, order]))


def top_singular_values(m, k: int) -> np.ndarray:
    """k largest singular values, descending, via the smaller Gram matrix."""
    a = _as_matrix(m)
    if k < 0 or k > min(a.shape):
        raise ParameterError(f"k={k} out of range for shape {a.shape}")
    gram = a.T @ a if a.shape[1] <= a.shape[0] else a @ a.T
    vals = np.linalg.eigvalsh(gram)
    vals = np.sqrt(np.clip(vals, 0.0, None))
    return np.sort(vals)[::-1][:k]


def solve_linear(m, b) -> np.ndarray:
    """Solve m @ x = b; raises SingularMatrixError with the failing pivot."""
    a = _as_matrix(m)
    rhs = np.asarray(b, dtype=float)
    squeeze = rhs.ndim == 1
    if squeeze:
        rhs = rhs[:, None]
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"matrix must be square, got {a.shape}")
    if rhs.shape[0] != a.shape[0]:
        raise DimensionError("right-hand side has mismatched row count")
    with warnings.catch_warnings():
        # singularity is detected from the pivots below, not scipy's warning
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    diag = np.abs(np.diag(lu))
    if diag.size and np.min(diag) <= PIVOT_TOL:
        raise SingularMatrixError(int(np.argmin(diag)))
    x = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
    return x[:, 0] if squeeze else x


def matrix_norms(m) -> tuple[float, float]:
    """(Frobenius norm, operator norm = largest singular value)."""
    a = _as_matrix(m)
    fro = float(np.sqrt(np.sum(a * a)))
    if min(a.shape) == 0:
        return fro, 0.0
    op = float(top_singular_values(a, 1)[0])
    return fro, op
