"""Spin operators, rotations, S_z parity and coherent states.

Basis states are ordered by descending magnetic number m = s, s-1, ..., -s,
so for s = 1 the order is |1>, |0>, |-1>.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

import numpy as np

from .linalg import DimensionError, dagger, hermitian_eig, kron


class SpinTriple(NamedTuple):
    s: float
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray


def _check_spin(s: float) -> float:
    two_s = 2 * s
    if abs(two_s - round(two_s)) > 1e-12 or round(two_s) < 1:
        raise ValueError(f"spin must be a positive half-integer, got {s}")
    return round(two_s) / 2


def spin_dim(s: float) -> int:
    return int(round(2 * _check_spin(s))) + 1


@lru_cache(maxsize=None)
def _spin_operators_cached(two_s: int) -> SpinTriple:
    s = two_s / 2
    d = two_s + 1
    m = s - np.arange(d)
    sz = np.diag(m).astype(complex)
    # raising operator: <m+1| S+ |m> = sqrt(s(s+1) - m(m+1))
    sp = np.zeros((d, d), dtype=complex)
    for j in range(1, d):
        mj = m[j]
        sp[j - 1, j] = np.sqrt(s * (s + 1) - mj * (mj + 1))
    sx = (sp + dagger(sp)) / 2
    sy = (sp - dagger(sp)) / 2j
    return SpinTriple(s, sx, sy, sz)


def spin_operators(s: float) -> SpinTriple:
    """Spin matrices (Sx, Sy, Sz) for spin s in the descending-m basis."""
    s = _check_spin(s)
    return _spin_operators_cached(int(round(2 * s)))


def rotation(s: float, axis, angle: float) -> np.ndarray:
    """Rotation exp(-i * angle * axis . S) for a unit 3-vector axis."""
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,):
        raise DimensionError("axis must be a 3-vector")
    if abs(np.linalg.norm(axis) - 1.0) > 1e-10:
        raise ValueError("rotation axis must be a unit vector")
    _, sx, sy, sz = spin_operators(s)
    h = axis[0] * sx + axis[1] * sy + axis[2] * sz
    w, v = hermitian_eig(h)
    return (v * np.exp(-1j * angle * w)) @ dagger(v)


@dataclass(frozen=True)
class ParityOperator:
    """Diagonal S_z parity with eigenvalues (-1)^(m+s)."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        d = mat.shape[0]
        if mat.shape != (d, d) or not np.allclose(mat, np.diag(np.diag(mat))):
            raise ValueError("parity operator must be diagonal")
        if not np.allclose(np.abs(np.diag(mat)), 1.0, atol=1e-12):
            raise ValueError("parity eigenvalues must be +-1")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)


def parity_z(s: float) -> ParityOperator:
    """P_z = exp(i pi (S_z + s)): +1 on even, -1 on odd m + s."""
    s = _check_spin(s)
    d = spin_dim(s)
    m = s - np.arange(d)
    signs = np.array([(-1.0) ** int(round(mi + s)) for mi in m])
    return ParityOperator(np.diag(signs).astype(complex))


def composite_parity(spins: Iterable[float]) -> ParityOperator:
    """Tensor product of per-site parities exp(i pi (S_z^i - s_i)).

    For integer spins this coincides with the product of parity_z factors;
    for half-integer sites the two conventions differ by a site sign only.
    """
    total = np.array([[1.0 + 0j]])
    count = 0
    for s in spins:
        s = _check_spin(s)
        d = spin_dim(s)
        m = s - np.arange(d)
        signs = np.array([(-1.0) ** int(round(mi - s)) for mi in m])
        total = kron(total, np.diag(signs).astype(complex))
        count += 1
    if count == 0:
        raise ValueError("composite_parity needs at least one site")
    return ParityOperator(total)


def coherent_state(s: float, theta: float) -> np.ndarray:
    """Rotated maximal-weight state exp(-i theta S_y)|s, m=s>."""
    d = spin_dim(s)
    e0 = np.zeros(d, dtype=complex)
    e0[0] = 1.0
    return rotation(s, (0.0, 1.0, 0.0), theta) @ e0
