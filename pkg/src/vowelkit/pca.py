"""Principal component analysis via cyclic Jacobi eigendecomposition.

The covariance matrices here are tiny (13x13 for MFCC vectors), where
Jacobi rotations are accurate and dependency-free. Components carry a
deterministic sign: the largest-magnitude entry of each row is positive.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # (n_components, dim), orthonormal rows
    explained_variance: np.ndarray  # descending eigenvalues
    degenerate: bool = False

    def __post_init__(self):
        for name in ("mean", "components", "explained_variance"):
            arr = np.array(getattr(self, name), dtype=np.float64, copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def jacobi_eigh(matrix: np.ndarray, tol: float = 1e-12,
                max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors) with eigenvectors in columns,
    unsorted. Iterates sweeps until the off-diagonal Frobenius mass falls
    below tol relative to the matrix norm.
    """
    a = np.array(matrix, dtype=np.float64, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"matrix must be square, got {a.shape}")
    v = np.eye(n)
    norm = np.linalg.norm(a)
    if norm == 0.0:
        return np.zeros(n), v

    for _ in range(max_sweeps):
        off_sq = np.sum(a ** 2) - np.sum(np.diag(a) ** 2)  # can round below zero
        if off_sq <= (tol * norm) ** 2:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tol * norm / (n * n):
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) \
                    if theta != 0.0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (p, q) plane rotation
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    return np.diag(a).copy(), v


def pca_fit(data: np.ndarray, n_components: int = 2) -> PcaModel:
    """Fit PCA: mean-center, sample covariance (n-1), top eigenvectors.

    Zero-variance input yields a valid model with arbitrary orthonormal
    components, flagged via ``degenerate``.
    """
    X = np.asarray(data, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("data must be a 2-D array of row vectors")
    n, dim = X.shape
    if n_components > dim:
        raise ValueError(f"n_components {n_components} exceeds dimension {dim}")
    if n < 2 or n < n_components:
        raise ValueError(f"need at least max(2, n_components) samples, got {n}")

    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / (n - 1)
    eigvals, eigvecs = jacobi_eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.maximum(eigvals[order], 0.0)
    components = eigvecs[:, order[:n_components]].T

    degenerate = bool(eigvals[0] <= 1e-300)
    if degenerate:
        log.warning("zero-variance data: PCA components are arbitrary")
    for row in components:
        if row[np.argmax(np.abs(row))] < 0.0:
            row *= -1.0
    return PcaModel(mean=mean, components=components,
                    explained_variance=eigvals[:n_components],
                    degenerate=degenerate)


def pca_project(model: PcaModel, x: np.ndarray) -> np.ndarray:
    """Project one vector (or rows of a matrix) onto the fitted plane."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.mean.shape[0]:
        raise ValueError(f"expected dimension {model.mean.shape[0]}, got {x.shape[-1]}")
    return (x - model.mean) @ model.components.T
