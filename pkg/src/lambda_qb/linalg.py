"""Dense complex linear algebra for small Hermitian matrices.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; nothing here
keeps state, so every function is safe to call from several threads.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-12


class NotHermitianError(ValueError):
    """Raised when a matrix expected to be Hermitian is not."""


class EigenDecomposition(NamedTuple):
    """Ascending eigenvalues and the matching orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def max_asymmetry(m: np.ndarray) -> float:
    """Largest entry of |M - M^dagger|."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return max_asymmetry(m) <= tol


def hermitize(m: np.ndarray) -> np.ndarray:
    """Hermitian part (M + M^dagger) / 2."""
    return 0.5 * (m + m.conj().T)


def eig_hermitian(m, tol: float = HERMITIAN_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues come back real and non-decreasing, eigenvectors as the
    columns of a unitary matrix. Within a degenerate eigenspace the basis is
    whatever LAPACK returns; callers must not rely on it.

    Raises:
        NotHermitianError: if max |M - M^dagger| exceeds ``tol``.
    """
    m = as_matrix(m)
    asym = max_asymmetry(m)
    if asym > tol:
        raise NotHermitianError(
            f"matrix is not Hermitian: max |M - M^dagger| = {asym:.3e} > {tol:.1e}"
        )
    values, vectors = np.linalg.eigh(hermitize(m))
    return EigenDecomposition(values, vectors)


def propagator(h, dt: float, hbar: float = 1.0) -> np.ndarray:
    """exp(-i H dt / hbar) from the spectral decomposition of ``h``."""
    if not np.isfinite(dt):
        raise ValueError(f"dt must be finite, got {dt}")
    dec = eig_hermitian(h)
    phases = np.exp(-1j * dec.values * dt / hbar)
    return (dec.vectors * phases) @ dec.vectors.conj().T


def trace_product(a, b) -> complex:
    """Tr(AB) without forming the product."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.T.shape or a.ndim != 2:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.sum(a * b.T))
