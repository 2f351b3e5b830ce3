"""Dense linear algebra helpers for small bipartite quantum systems.

Matrices are plain numpy arrays of complex128. Bipartite operators live on
A (x) B with A the slow (left) kron factor, row-major throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

HERMITICITY_TOL = 1e-10
DENSITY_ATOL = 1e-12
PSD_FLOOR = -1e-10


class DimensionError(ValueError):
    """Operands have incompatible or invalid dimensions."""


class HermitianEig(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def dagger(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).conj().T


def is_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and np.abs(a - dagger(a)).max() <= tol


def hermitian_eig(a: np.ndarray, tol: float = HERMITICITY_TOL) -> HermitianEig:
    """Spectral decomposition of a Hermitian matrix.

    Returns eigenvalues in ascending order and the matching orthonormal
    eigenvector columns. Raises if the input is not Hermitian within tol.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if np.abs(a - dagger(a)).max() > tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(a)
    return HermitianEig(w, v)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the left factor slow (A-major ordering)."""
    return np.kron(a, b)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return a @ b - b @ a


def ptrace(m: np.ndarray, dims: tuple[int, int], keep: str) -> np.ndarray:
    """Partial trace of a (dA*dB) x (dA*dB) matrix; keep is 'A' or 'B'.

    Works on arbitrary matrices (not only states), which is needed for
    tracing commutators.
    """
    da, db = dims
    m = np.asarray(m)
    if m.shape != (da * db, da * db):
        raise DimensionError(f"matrix shape {m.shape} does not match dims {dims}")
    t = m.reshape(da, db, da, db)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError("keep must be 'A' or 'B'")


def matrix_func(a: np.ndarray, g: Callable[[float], float]) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    w, v = hermitian_eig(a)
    gw = np.array([g(float(x)) for x in w], dtype=float)
    if not np.all(np.isfinite(gw)):
        raise ValueError("function is undefined on part of the spectrum")
    out = (v * gw) @ dagger(v)
    return (out + dagger(out)) / 2


@dataclass(frozen=True)
class DensityMatrix:
    """A validated bipartite density matrix with dimension metadata.

    dims = (dA, dB); the matrix acts on A (x) B, A-major. Either factor may
    be 1 for effectively single-party states.
    """

    matrix: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        da, db = self.dims
        if da < 1 or db < 1:
            raise DimensionError(f"invalid dims {self.dims}")
        if mat.shape != (da * db, da * db):
            raise DimensionError(
                f"matrix shape {mat.shape} does not match dims {self.dims}"
            )
        if np.abs(mat - mat.conj().T).max() > DENSITY_ATOL:
            raise ValueError("density matrix is not Hermitian")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > 1e-10:
            raise ValueError(f"density matrix trace {tr} is not 1")
        if np.linalg.eigvalsh(mat).min() < PSD_FLOOR:
            raise ValueError("density matrix has a negative eigenvalue")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", (int(da), int(db)))

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def partial_trace(rho: DensityMatrix, keep: str) -> DensityMatrix:
    """Reduce a bipartite state to one subsystem (keep 'A' or 'B')."""
    da, db = rho.dims
    red = ptrace(rho.matrix, rho.dims, keep)
    dims = (da, 1) if keep == "A" else (1, db)
    return DensityMatrix(red, dims)
