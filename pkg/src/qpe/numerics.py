"""Dense symmetric eigendecomposition, spectral propagators and eigenprojectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg


@dataclass(frozen=True)
class SpectralDecomp:
    """``M = Q diag(eigenvalues) Q^T`` with eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T

    @property
    def spectral_radius(self) -> float:
        return float(np.abs(self.eigenvalues).max()) if self.dim else 0.0


@dataclass(frozen=True)
class ProjectorSet:
    """Distinct eigenvalues and the orthogonal projectors onto their eigenspaces."""

    eigenvalues: np.ndarray
    projectors: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.projectors)


def sym_eig(m) -> SpectralDecomp:
    """Eigendecomposition of a real symmetric matrix (LAPACK ``syevd``)."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix has non-finite entries")
    if m.size and np.abs(m - m.T).max() > 1e-12:
        raise ValueError("matrix is not symmetric")
    if m.shape[0] == 0:
        return SpectralDecomp(np.zeros(0), np.zeros((0, 0)))
    w, q = scipy.linalg.eigh(m, driver="evd")
    w.setflags(write=False)
    q.setflags(write=False)
    return SpectralDecomp(w, q)


def propagate(d: SpectralDecomp, t: float, v) -> np.ndarray:
    """Apply ``exp(-i M t)`` to ``v`` (a vector, or a matrix of column vectors)."""
    v = np.asarray(v)
    if v.shape[0] != d.dim:
        raise ValueError(f"vector length {v.shape[0]} does not match dimension {d.dim}")
    if t == 0:
        return v.astype(np.complex128)
    q = d.eigenvectors
    phases = np.exp(-1j * d.eigenvalues * t)
    coeffs = q.T @ v
    if coeffs.ndim == 1:
        return q @ (phases * coeffs)
    return q @ (phases[:, None] * coeffs)


def propagator(d: SpectralDecomp, t: float) -> np.ndarray:
    """Full unitary ``exp(-i M t)`` (exactly the identity at ``t = 0``)."""
    if t == 0:
        return np.eye(d.dim, dtype=np.complex128)
    q = d.eigenvectors
    return (q * np.exp(-1j * d.eigenvalues * t)) @ q.T


def default_tolerance(d: SpectralDecomp) -> float:
    return 1e-8 * max(1.0, d.spectral_radius)


def group_eigenvalues(d: SpectralDecomp, tol: float | None = None) -> list[np.ndarray]:
    """Index groups of (ascending) eigenvalues whose consecutive gaps are <= tol."""
    if tol is None:
        tol = default_tolerance(d)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    w = d.eigenvalues
    if w.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(w) > tol) + 1
    return np.split(np.arange(w.size), breaks)


def projectors(d: SpectralDecomp, tol: float | None = None) -> ProjectorSet:
    groups = group_eigenvalues(d, tol)
    values = np.array([d.eigenvalues[g].mean() for g in groups])
    projs = []
    for g in groups:
        q = d.eigenvectors[:, g]
        projs.append(q @ q.T)
    return ProjectorSet(values, tuple(projs))
