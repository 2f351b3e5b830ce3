"""Construction and classification of qutrit projective measurements.

A complete orthonormal basis of a spin-1 system is parametrized by six
angles (alpha, beta, gamma, psi, theta_r, phi_r). The first three fix the
intrinsic shape of the basis relative to the z axis:

    |1_r> = cos(beta) (e^{-i phi0} cos(alpha)|1> + e^{i phi0} sin(alpha)|-1>)
            - sin(beta) e^{-i gamma}|0>
    |0_r> = sin(beta) (e^{-i phi0} cos(alpha)|1> + e^{i phi0} sin(alpha)|-1>)
            + cos(beta) e^{-i gamma}|0>
    |-1_r> = -e^{-i phi0} sin(alpha)|1> + e^{i phi0} cos(alpha)|-1>

with tan(phi0) = tan(gamma) tan(pi/4 - alpha), which places all three spin
averages <S> in the x-z plane. The remaining three angles apply the overall
rotation R = e^{-i psi Sz} e^{-i theta_r Sy} e^{-i phi_r Sz}.

Ranges alpha, beta in [0, pi/4] and gamma in [-pi/2, pi/2] cover every
measurement once orientation freedom is taken into account (gamma = -pi/2
and pi/2 describe mutually conjugate bases).

Special families:
  * spin measurements: projectors onto eigenstates of k . S,
  * type II (collinear): |+-1_a> = cos(a)|+-1> +- sin(a)|-+1>, |0> fixed,
    rotated about z; these have definite S_z parity,
  * type III (Y-shaped): beta = pi/4, where S_z parity swaps the pair
    (1_r, 0_r) and fixes -1_r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import dagger, hermitian_eig
from .spins import spin_operators

_ANGLE_SLACK = 1e-9
_QUARTER_PI = math.pi / 4

_S1 = spin_operators(1)
SPIN_X, SPIN_Y, SPIN_Z = _S1.sx, _S1.sy, _S1.sz
_SPIN_VEC = np.stack([SPIN_X, SPIN_Y, SPIN_Z])

CLASSIFY_TOL = 1e-8


@dataclass(frozen=True)
class MeasurementParams:
    """Six angles defining a qutrit von Neumann measurement.

    alpha and beta in [0, pi/4] together with the three free orientation
    angles reach every basis; larger mixing angles only repeat bases that
    a rotation already covers.
    """

    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    psi: float = 0.0
    theta_r: float = 0.0
    phi_r: float = 0.0

    def __post_init__(self):
        if not -_ANGLE_SLACK <= self.alpha <= _QUARTER_PI + _ANGLE_SLACK:
            raise ValueError(f"alpha={self.alpha} outside [0, pi/4]")
        if not -_ANGLE_SLACK <= self.beta <= _QUARTER_PI + _ANGLE_SLACK:
            raise ValueError(f"beta={self.beta} outside [0, pi/4]")
        if not -math.pi / 2 - _ANGLE_SLACK <= self.gamma <= math.pi / 2 + _ANGLE_SLACK:
            raise ValueError(f"gamma={self.gamma} outside [-pi/2, pi/2]")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.alpha, self.beta, self.gamma, self.psi, self.theta_r, self.phi_r]
        )


@dataclass(frozen=True)
class MeasurementBasis:
    """Orthonormal qutrit basis; states are the columns of a 3x3 unitary.

    Column order follows the construction: (1_r, 0_r, -1_r). params records
    the generating angles when the basis came from this module's
    constructors, None for ad hoc bases.
    """

    states: np.ndarray
    params: MeasurementParams | None = None

    def __post_init__(self):
        u = np.array(self.states, dtype=complex)
        if u.shape != (3, 3):
            raise ValueError(f"basis must be 3x3, got {u.shape}")
        if np.abs(dagger(u) @ u - np.eye(3)).max() > 1e-10:
            raise ValueError("basis columns are not orthonormal")
        u.setflags(write=False)
        object.__setattr__(self, "states", u)

    @property
    def projectors(self) -> np.ndarray:
        u = self.states
        return np.einsum("im,jm->mij", u, u.conj())


@dataclass(frozen=True)
class SpinDiagram:
    """Spin averages <S> of the three basis states (rows x, y, z columns)."""

    vectors: np.ndarray
    total_length_sq: float


@dataclass(frozen=True)
class MeasurementType:
    label: str
    parity_preserving: bool
    zero_diagram: bool = False


def phi0_angle(alpha: float, gamma: float) -> float:
    """Internal phase tan(phi0) = tan(gamma) tan(pi/4 - alpha)."""
    t = math.tan(_QUARTER_PI - alpha)
    return math.atan2(math.sin(gamma) * t, math.cos(gamma))


def intrinsic_basis(alpha: float, beta: float, gamma: float) -> MeasurementBasis:
    """Unrotated basis with all spin averages in the x-z plane."""
    p = MeasurementParams(alpha=alpha, beta=beta, gamma=gamma)
    return MeasurementBasis(_intrinsic_states(alpha, beta, gamma), p)


def _intrinsic_states(alpha: float, beta: float, gamma: float) -> np.ndarray:
    phi0 = phi0_angle(alpha, gamma)
    ca, sa = math.cos(alpha), math.sin(alpha)
    cb, sb = math.cos(beta), math.sin(beta)
    ep = np.exp(-1j * phi0)
    eg = np.exp(-1j * gamma)
    u = np.empty((3, 3), dtype=complex)
    # components ordered |1>, |0>, |-1>
    u[:, 0] = (cb * ep * ca, -sb * eg, cb * np.conj(ep) * sa)
    u[:, 1] = (sb * ep * ca, cb * eg, sb * np.conj(ep) * sa)
    u[:, 2] = (-ep * sa, 0.0, np.conj(ep) * ca)
    return u


def rotation_zyz(psi: float, theta: float, phi: float) -> np.ndarray:
    """Spin-1 rotation e^{-i psi Sz} e^{-i theta Sy} e^{-i phi Sz}."""
    ct, st = math.cos(theta), math.sin(theta)
    ry = np.array(
        [
            [(1 + ct) / 2, -st / math.sqrt(2), (1 - ct) / 2],
            [st / math.sqrt(2), ct, -st / math.sqrt(2)],
            [(1 - ct) / 2, st / math.sqrt(2), (1 + ct) / 2],
        ],
        dtype=complex,
    )
    zp = np.exp(-1j * psi * np.array([1.0, 0.0, -1.0]))
    zf = np.exp(-1j * phi * np.array([1.0, 0.0, -1.0]))
    return (zp[:, None] * ry) * zf[None, :]


def full_basis(params: MeasurementParams) -> MeasurementBasis:
    """Intrinsic basis followed by the zyz orientation rotation."""
    u = _intrinsic_states(params.alpha, params.beta, params.gamma)
    r = rotation_zyz(params.psi, params.theta_r, params.phi_r)
    return MeasurementBasis(r @ u, params)


def spin_basis(polar: float, azimuth: float) -> MeasurementBasis:
    """Eigenbasis of k . S for the direction with given polar/azimuth angles."""
    return full_basis(MeasurementParams(psi=azimuth, theta_r=polar))


def type_ii_basis(alpha: float, phi: float) -> MeasurementBasis:
    """Collinear basis cos(a)|+-1> +- sin(a)|-+1>, |0>, rotated about z."""
    return full_basis(MeasurementParams(alpha=alpha, psi=phi))


def type_iii_basis(alpha: float, gamma: float, phi: float) -> MeasurementBasis:
    """Y-shaped basis (beta = pi/4) rotated about z."""
    return full_basis(MeasurementParams(alpha=alpha, beta=_QUARTER_PI, gamma=gamma, psi=phi))


def spin_diagram(basis: MeasurementBasis) -> SpinDiagram:
    u = basis.states
    vecs = np.real(np.einsum("im,aij,jm->ma", u.conj(), _SPIN_VEC, u))
    total = float(np.sum(vecs * vecs))
    return SpinDiagram(vecs, total)


def axis_parity(axis) -> np.ndarray:
    """Parity operator e^{i pi (n.S + 1)} for a unit axis n."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    h = axis[0] * SPIN_X + axis[1] * SPIN_Y + axis[2] * SPIN_Z
    w, v = hermitian_eig(h)
    phases = np.exp(1j * math.pi * (w + 1))
    return (v * phases) @ dagger(v)


def _match_projectors(mapped: np.ndarray, projs: np.ndarray, tol: float):
    """Permutation taking each mapped projector to an original one, or None."""
    perm = []
    for m in range(3):
        hit = None
        for k in range(3):
            if np.abs(mapped[m] - projs[k]).max() < tol:
                hit = k
                break
        if hit is None or hit in perm:
            return None
        perm.append(hit)
    return perm


def classify(
    basis: MeasurementBasis,
    tol: float = CLASSIFY_TOL,
    parity_axis=(0.0, 0.0, 1.0),
) -> MeasurementType:
    """Label a basis I (spin), II (collinear), III (Y-type) or IV (general).

    The most specific matching label wins: spin measurements are collinear,
    and collinear bases that are also Y-symmetric still report II.
    parity_preserving states whether the projector set is invariant under
    conjugation by the parity operator of the supplied axis.
    """
    diag = spin_diagram(basis)
    vecs = diag.vectors
    lengths = np.linalg.norm(vecs, axis=1)
    projs = basis.projectors

    zero_diagram = bool(np.all(lengths < tol))
    crosses = [
        np.linalg.norm(np.cross(vecs[i], vecs[j]))
        for i in range(3)
        for j in range(i + 1, 3)
    ]
    collinear = bool(max(crosses) < tol)

    if collinear and not zero_diagram and _is_spin_pattern(lengths, tol):
        label = "I"
    elif collinear:
        label = "II"
    elif _has_y_symmetry(vecs, lengths, projs, tol):
        label = "III"
    else:
        label = "IV"

    pz = axis_parity(parity_axis)
    mapped = np.einsum("ij,mjk,kl->mil", pz, projs, dagger(pz))
    parity_preserving = _match_projectors(mapped, projs, 10 * tol) is not None

    return MeasurementType(label, parity_preserving, zero_diagram)


def _is_spin_pattern(lengths: np.ndarray, tol: float) -> bool:
    srt = np.sort(lengths)
    return bool(srt[0] < tol and np.all(np.abs(srt[1:] - 1.0) < tol))


def _has_y_symmetry(vecs, lengths, projs, tol: float) -> bool:
    # Y-type: some axis parity swaps two projectors and fixes the third.
    # The fixed state's <S> must lie along the axis, so only the three
    # diagram directions are candidates.
    for k in range(3):
        if lengths[k] < tol:
            continue
        p = axis_parity(vecs[k] / lengths[k])
        mapped = np.einsum("ij,mjk,kl->mil", p, projs, dagger(p))
        perm = _match_projectors(mapped, projs, 10 * tol)
        if perm is None or perm[k] != k:
            continue
        others = [m for m in range(3) if m != k]
        if perm[others[0]] == others[1] and perm[others[1]] == others[0]:
            return True
    return False


def diagram_record(basis: MeasurementBasis) -> dict:
    """JSON-ready record of a basis diagram and its classification."""
    diag = spin_diagram(basis)
    mtype = classify(basis)
    p = basis.params
    record = {
        "params": None
        if p is None
        else {
            "alpha": p.alpha,
            "beta": p.beta,
            "gamma": p.gamma,
            "psi": p.psi,
            "theta_r": p.theta_r,
            "phi_r": p.phi_r,
        },
        "vectors": diag.vectors.tolist(),
        "L_squared": diag.total_length_sq,
        "type": mtype.label,
        "parity_preserving": mtype.parity_preserving,
        "zero_diagram": mtype.zero_diagram,
    }
    return record
