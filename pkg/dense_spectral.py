"""
Dense symmetric linear algebra.
Eigendecomposition (cyclic Jacobi for small matrices, LAPACK above), numerical
kernels and ranks, eigenvalue sign counts, and a deterministic search for
nonnegative vectors in a subspace.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from errors import NumericalAccuracyError, PreconditionError

logger = logging.getLogger(__name__)

JACOBI_MAX_DIM = 24
JACOBI_TOL = 1e-14
ROTATION_HUGE = 1e150
DEFAULT_KERNEL_TOL = 1e-9
SYMMETRY_RTOL = 1e-12
NONNEGATIVE_SLACK = 1e-10

Basis = Union[np.ndarray, Sequence[np.ndarray]]


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues ascending; eigenvectors as orthonormal columns in the same order."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def scale(self) -> float:
        """max(1, spectral radius), the reference for relative tolerances."""
        if self.eigenvalues.size == 0:
            return 1.0
        return max(1.0, float(np.max(np.abs(self.eigenvalues))))


def as_symmetric(A) -> np.ndarray:
    """Check that `A` is a finite symmetric square matrix and return it as floats."""
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericalAccuracyError("matrix has non-finite entries")
    if np.any(np.abs(A - A.T) > SYMMETRY_RTOL * np.maximum(1.0, np.abs(A))):
        raise PreconditionError("matrix is not symmetric")
    return 0.5 * (A + A.T)


def jacobi_eigh(A: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = 64) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cyclic Jacobi rotations until the off-diagonal norm is below tol * ||A||_F.

    Args:
        A: symmetric matrix (not modified)
        tol: relative off-diagonal stopping threshold
        max_sweeps: upper bound on full sweeps

    Returns:
        tuple: (eigenvalues unsorted, eigenvectors as columns)
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    fro = np.linalg.norm(A)
    if n < 2 or fro == 0.0:
        return np.diag(A).copy(), V

    for sweep in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * fro:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > ROTATION_HUGE:
                    # θ² would overflow; t ≈ 1/(2θ)
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                row_p, row_q = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                col_p, col_q = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                A[p, q] = A[q, p] = 0.0

                vec_p, vec_q = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vec_p - s * vec_q
                V[:, q] = s * vec_p + c * vec_q
    else:
        logger.warning("Jacobi stopped after %d sweeps (n=%d) above the off-diagonal threshold", max_sweeps, n)

    return np.diag(A).copy(), V


def eig_sym(A, method: str = "auto") -> EigenDecomposition:
    """
    Full spectrum of a symmetric matrix, sorted ascending.

    Args:
        A: finite symmetric matrix
        method: "jacobi", "lapack", or "auto" (Jacobi up to JACOBI_MAX_DIM)

    Returns:
        EigenDecomposition
    """
    A = as_symmetric(A)
    n = A.shape[0]
    if n == 0:
        return EigenDecomposition(np.zeros(0), np.zeros((0, 0)))
    if method == "auto":
        method = "jacobi" if n <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        w, V = jacobi_eigh(A)
    elif method == "lapack":
        w, V = np.linalg.eigh(A)
    else:
        raise PreconditionError(f"unknown eigensolver {method!r}")
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], V[:, order])


def kernel_basis(A, tol: float = DEFAULT_KERNEL_TOL) -> np.ndarray:
    """Orthonormal columns spanning eigenvectors with |λ| <= tol * max(1, spectral radius)."""
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    dec = eig_sym(A)
    mask = np.abs(dec.eigenvalues) <= tol * dec.scale
    return dec.eigenvectors[:, mask]


def count_signs(A, tol: float = DEFAULT_KERNEL_TOL) -> Tuple[int, int, int]:
    """(negative, zero, positive) eigenvalue counts with a zero band of tol * scale."""
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    dec = eig_sym(A)
    band = tol * dec.scale
    w = dec.eigenvalues
    return int(np.sum(w < -band)), int(np.sum(np.abs(w) <= band)), int(np.sum(w > band))


def nullspace(M, tol: float = DEFAULT_KERNEL_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the null space of a rectangular matrix."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    rows, cols = M.shape
    if cols == 0:
        return np.zeros((0, 0))
    if rows == 0:
        return np.eye(cols)
    _, S, Vt = np.linalg.svd(M, full_matrices=True)
    smax = float(S.max()) if S.size else 0.0
    rank = int(np.sum(S > tol * max(1.0, smax)))
    return Vt[rank:].T.copy()


def sphere_grid(dim: int, resolution: int, chunk: int = 4096) -> Iterator[np.ndarray]:
    """
    Deterministic unit vectors in R^dim, yielded in chunks of rows.

    dim 1 gives ±1, dim 2 a sweep of `resolution` angles, higher dimensions a
    hyperspherical angle grid with `resolution` points per angle. The first
    vector is always e_1.
    """
    if dim < 1:
        raise PreconditionError("dimension must be at least 1")
    if dim == 1:
        yield np.array([[1.0], [-1.0]])
        return
    azimuth = 2.0 * np.pi * np.arange(resolution) / resolution
    if dim == 2:
        yield np.column_stack([np.cos(azimuth), np.sin(azimuth)])
        return

    polar = np.linspace(0.0, np.pi, resolution)
    axes = [range(resolution)] * (dim - 1)
    it = itertools.product(*axes)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        idx = np.array(block)
        angles = np.column_stack([polar[idx[:, k]] for k in range(dim - 2)] + [azimuth[idx[:, -1]]])
        out = np.ones((len(block), dim))
        for k in range(dim - 1):
            out[:, k] *= np.cos(angles[:, k])
            out[:, k + 1 :] *= np.sin(angles[:, k])[:, None]
        yield out


def as_basis(basis: Basis) -> np.ndarray:
    """Stack a list of vectors into columns; arrays are taken as columns already."""
    if isinstance(basis, (list, tuple)):
        if not basis:
            return np.zeros((0, 0))
        return np.column_stack([np.asarray(v, dtype=float) for v in basis])
    B = np.asarray(basis, dtype=float)
    return B[:, None] if B.ndim == 1 else B


def nonnegative_in_span(basis: Basis, resolution: int = 64) -> Optional[np.ndarray]:
    """
    Look for a unit vector in span(basis) whose coordinates are all >= -1e-10.

    Exact for a one-dimensional basis; a grid search otherwise, so `None` for
    dim >= 2 means none was found, not that none exists.
    """
    B = as_basis(basis)
    if B.size == 0 or B.shape[1] == 0:
        raise PreconditionError("empty basis")
    for coeffs in sphere_grid(B.shape[1], resolution):
        V = coeffs @ B.T
        hits = np.flatnonzero(np.all(V >= -NONNEGATIVE_SLACK, axis=1))
        if hits.size:
            v = V[hits[0]]
            return v / np.linalg.norm(v)
    return None
