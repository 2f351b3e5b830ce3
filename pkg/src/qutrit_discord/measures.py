"""Measurement-based correlation measures and stationarity operators.

A local measurement on B maps rho to rho' = sum_m (I x Pi_m) rho (I x Pi_m).
Quantum discord compares conditional entropies before and after,

    D(M) = [S(rho') - S(rho'_B)] - [S(rho) - S(rho_B)],

while the generalized information deficit for a concave f with f(0)=f(1)=0 is

    I_f(M) = S_f(rho') - S_f(rho),   S_f(rho) = Tr f(rho).

All logarithms are base 2. f = -x log2 x gives the one-way deficit I_1; the
linear entropy f = x(1-x) gives the geometric discord I_2, reported here as
2 Tr(rho^2 - rho'^2) so a two-qutrit Bell state scores 1.

Stationary measurements satisfy Delta_f = Tr_A [f'(rho'), rho] = 0 (for D an
extra local term -[f'(rho'_B), rho_B] appears). Delta is anti-Hermitian with
zero diagonal in the measured basis; for a perturbation of the basis by
e^{i eps K}, d I_f / d eps = i Tr(K Delta_f), which is what the optimizer
uses as its convergence certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import DensityMatrix, commutator, dagger, kron, ptrace
from .measurements import MeasurementBasis, MeasurementParams

LOG2E = math.log2(math.e)
EIG_CLAMP = -1e-10
SUPPORT_CUTOFF = 1e-12
FPRIME_FLOOR = 1e-18
VALUE_CLAMP = -1e-10


@dataclass(frozen=True)
class EntropyFunctional:
    """Concave single-argument entropy kernel with its derivative."""

    name: str
    f: Callable[[float], float]
    fprime: Callable[[float], float]


def _vn_f(x: float) -> float:
    return -x * math.log2(x) if x > 0 else 0.0


def _vn_fprime(x: float) -> float:
    return -math.log2(x) - LOG2E


VON_NEUMANN = EntropyFunctional("von_neumann", _vn_f, _vn_fprime)
LINEAR = EntropyFunctional("linear", lambda x: x * (1.0 - x), lambda x: 1.0 - 2.0 * x)


@dataclass(frozen=True)
class MeasureAtM:
    """Value of a measure at a fixed measurement, with the post state."""

    value: float
    rho_prime: DensityMatrix
    measurement: MeasurementParams | None


@dataclass(frozen=True)
class StationarityResidual:
    """Stationarity operator Delta on B, its Frobenius norm, and whether
    the support of rho fell partly outside the support of rho'."""

    delta: np.ndarray
    norm: float
    kernel_overlap: bool


def clamp_spectrum(w: np.ndarray) -> np.ndarray:
    """Zero out tiny negative eigenvalues; larger ones are a real error."""
    w = np.asarray(w, dtype=float)
    if w.min() < EIG_CLAMP:
        raise ValueError(f"eigenvalue {w.min()} below clamp floor")
    return np.where(w < 0.0, 0.0, w)


def entropy_of_probs(w) -> float:
    w = clamp_spectrum(np.asarray(w, dtype=float))
    nz = w[w > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def vn_entropy(rho: DensityMatrix) -> float:
    """Von Neumann entropy in bits."""
    return entropy_of_probs(np.linalg.eigvalsh(rho.matrix))


def f_entropy(rho: DensityMatrix, f: EntropyFunctional) -> float:
    """Generalized entropy S_f = Tr f(rho)."""
    w = clamp_spectrum(np.linalg.eigvalsh(rho.matrix))
    return float(sum(f.f(float(x)) for x in w))


def _embed_projectors(basis: MeasurementBasis, da: int) -> np.ndarray:
    eye = np.eye(da)
    return np.stack([kron(eye, p) for p in basis.projectors])


def apply_measurement(rho: DensityMatrix, basis: MeasurementBasis) -> DensityMatrix:
    """Unread projective measurement on B: sum_m (I x Pi_m) rho (I x Pi_m)."""
    da, db = rho.dims
    if db != 3:
        raise ValueError(f"measured subsystem must be a qutrit, got dB={db}")
    post = np.zeros_like(rho.matrix)
    for p in _embed_projectors(basis, da):
        post = post + p @ rho.matrix @ p
    return DensityMatrix(post, rho.dims)


def _clamped(value: float) -> float:
    if value < VALUE_CLAMP:
        raise ValueError(f"measure value {value} below clamp floor")
    return max(value, 0.0)


def discord_given(rho: DensityMatrix, basis: MeasurementBasis) -> MeasureAtM:
    """Quantum discord at a fixed measurement of B, in bits."""
    rho_prime = apply_measurement(rho, basis)
    rho_b = ptrace(rho.matrix, rho.dims, "B")
    rho_b_prime = ptrace(rho_prime.matrix, rho.dims, "B")
    value = (
        entropy_of_probs(np.linalg.eigvalsh(rho_prime.matrix))
        - entropy_of_probs(np.linalg.eigvalsh(rho_b_prime))
        - entropy_of_probs(np.linalg.eigvalsh(rho.matrix))
        + entropy_of_probs(np.linalg.eigvalsh(rho_b))
    )
    return MeasureAtM(_clamped(value), rho_prime, basis.params)


def deficit_given(
    rho: DensityMatrix, basis: MeasurementBasis, f: EntropyFunctional
) -> MeasureAtM:
    """Generalized deficit S_f(rho') - S_f(rho) at a fixed measurement."""
    rho_prime = apply_measurement(rho, basis)
    value = f_entropy(rho_prime, f) - f_entropy(rho, f)
    return MeasureAtM(_clamped(value), rho_prime, basis.params)


def i2_given(rho: DensityMatrix, basis: MeasurementBasis) -> MeasureAtM:
    """Geometric discord 2 Tr(rho^2 - rho'^2) at a fixed measurement.

    The factor 2 normalizes a maximally entangled two-qutrit pair measured
    in its Schmidt basis to 1; the raw value is half of this.
    """
    raw = deficit_given(rho, basis, LINEAR)
    return MeasureAtM(2.0 * raw.value, raw.rho_prime, raw.measurement)


def _fprime_on_support(mat: np.ndarray, f: EntropyFunctional, cutoff=SUPPORT_CUTOFF):
    """f'(mat) on the support of mat, zero on its kernel.

    Returns the operator and the kernel projector. The von Neumann f' is
    singular at 0, so eigenvalues below the cutoff are treated as kernel;
    this matches the one-sided derivative of S_f there.

    With cutoff=None no kernel is declared: every eigenvalue is floored at
    FPRIME_FLOOR and keeps its true (logarithmically large) f'. Optima can
    sit exactly where an eigenvalue of rho' reaches zero, and in the band
    between zero and the cutoff the kernel convention no longer describes
    the derivative of S_f; the optimizer needs the version that does.
    """
    w, v = np.linalg.eigh(mat)
    if cutoff is None:
        gw = np.array([f.fprime(max(float(x), FPRIME_FLOOR)) for x in w])
        kernel = v[:, :0]
    else:
        gw = np.array([f.fprime(float(x)) if x > cutoff else 0.0 for x in w])
        kernel = v[:, w <= cutoff]
    op = (v * gw) @ dagger(v)
    return (op + dagger(op)) / 2, kernel


def stationarity_f(
    rho: DensityMatrix,
    basis: MeasurementBasis,
    f: EntropyFunctional,
    cutoff=SUPPORT_CUTOFF,
) -> StationarityResidual:
    """Delta_f = Tr_A [f'(rho'), rho]; zero at interior optima of I_f."""
    rho_prime = apply_measurement(rho, basis)
    fp, kernel = _fprime_on_support(rho_prime.matrix, f, cutoff)
    delta = ptrace(commutator(fp, rho.matrix), rho.dims, "B")
    overlap = _kernel_overlap(kernel, rho.matrix)
    return StationarityResidual(delta, float(np.linalg.norm(delta)), overlap)


def stationarity_d(
    rho: DensityMatrix, basis: MeasurementBasis, cutoff=SUPPORT_CUTOFF
) -> StationarityResidual:
    """Delta_D = Tr_A [f'(rho'), rho] - [f'(rho'_B), rho_B] for f = -x log2 x."""
    rho_prime = apply_measurement(rho, basis)
    fp, kernel = _fprime_on_support(rho_prime.matrix, VON_NEUMANN, cutoff)
    delta = ptrace(commutator(fp, rho.matrix), rho.dims, "B")
    rho_b = ptrace(rho.matrix, rho.dims, "B")
    rho_b_prime = ptrace(rho_prime.matrix, rho.dims, "B")
    fp_b, kernel_b = _fprime_on_support(rho_b_prime, VON_NEUMANN, cutoff)
    delta = delta - commutator(fp_b, rho_b)
    overlap = _kernel_overlap(kernel, rho.matrix) or _kernel_overlap(kernel_b, rho_b)
    return StationarityResidual(delta, float(np.linalg.norm(delta)), overlap)


def _kernel_overlap(kernel: np.ndarray, mat: np.ndarray) -> bool:
    if kernel.shape[1] == 0:
        return False
    weights = np.real(np.einsum("ik,ij,jk->k", kernel.conj(), mat, kernel))
    return bool(weights.max(initial=0.0) > SUPPORT_CUTOFF)


def measured_frame(delta: np.ndarray, basis: MeasurementBasis) -> np.ndarray:
    """Express a B operator in the measured basis (diagonal of Delta is 0)."""
    u = basis.states
    return dagger(u) @ delta @ u


def parity_invariance_check(
    rho: DensityMatrix, parity: np.ndarray, tol: float = 1e-10
) -> bool:
    """True when [rho, P] vanishes within tol."""
    return float(np.abs(commutator(np.asarray(parity), rho.matrix)).max()) <= tol
