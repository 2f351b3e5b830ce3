"""Benchmark states, spin chains and closed-form reference curves.

The central benchmark is the separable two-qutrit mixture of aligned
spin-1 coherent states

    rho_theta = 1/2 (|theta theta><theta theta| + |-theta -theta><-theta -theta|),

with |theta> = e^{-i theta Sy}|1> and overlap <-theta|theta> = cos^2 theta.
It is classically correlated only at theta = 0 and pi/2. Closed-form curves
for its discord D and geometric discord I2 (both normalized so a Bell pair
gives 1) are provided together with the optimal measurement angle
tan(alpha) = tan^2(theta/2) and the small/large angle asymptotes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .linalg import DensityMatrix, DimensionError, kron, ptrace
from .spins import coherent_state, spin_operators

THETA_C = math.acos(3.0 ** -0.25)


# --- benchmark states -------------------------------------------------------


@dataclass(frozen=True)
class AlignedMixtureState:
    """rho_theta together with its mixing angle."""

    theta: float
    rho: DensityMatrix


def aligned_mixture(theta: float) -> AlignedMixtureState:
    """Equal mixture of |theta,theta> and |-theta,-theta> (two qutrits)."""
    plus = coherent_state(1, theta)
    minus = coherent_state(1, -theta)
    pp = kron(plus, plus)
    mm = kron(minus, minus)
    mat = 0.5 * (np.outer(pp, pp.conj()) + np.outer(mm, mm.conj()))
    return AlignedMixtureState(theta, DensityMatrix(mat, (3, 3)))


def fixed_parity_state(n: int, theta: float, sign: int) -> np.ndarray:
    """Definite-parity combination (|theta>^n +- |-theta>^n), normalized.

    Raises for sign=-1 as theta -> 0 where the two branches coincide and
    the norm underflows.
    """
    if n < 1:
        raise ValueError("need at least one site")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    plus = coherent_state(1, theta)
    minus = coherent_state(1, -theta)
    vp = plus
    vm = minus
    for _ in range(n - 1):
        vp = kron(vp, plus)
        vm = kron(vm, minus)
    psi = vp + sign * vm
    norm = np.linalg.norm(psi)
    if norm < 1e-8:
        raise ValueError("state norm underflow: branches coincide")
    return psi / norm


def reduce_pair(psi: np.ndarray, i: int, j: int) -> DensityMatrix:
    """Two-site reduced state of an n-qutrit pure state (site i slow)."""
    psi = np.asarray(psi, dtype=complex)
    n = int(round(math.log(psi.size, 3)))
    if 3**n != psi.size:
        raise DimensionError(f"state length {psi.size} is not a power of 3")
    if not (0 <= i < n and 0 <= j < n and i != j):
        raise ValueError(f"invalid site pair ({i}, {j}) for n={n}")
    t = psi.reshape((3,) * n)
    rest = [k for k in range(n) if k not in (i, j)]
    t = np.moveaxis(t, (i, j), (0, 1))
    m = t.reshape(9, -1)
    red = m @ m.conj().T
    red = red / np.real(np.trace(red))
    return DensityMatrix(red, (3, 3))


def bell_anchor() -> DensityMatrix:
    """Maximally entangled (|1,1> + |-1,-1>)/sqrt(2) of two qutrits."""
    psi = np.zeros(9, dtype=complex)
    psi[0] = psi[8] = 1.0 / math.sqrt(2.0)
    return DensityMatrix(np.outer(psi, psi.conj()), (3, 3))


# --- XYZ spin chains --------------------------------------------------------


@dataclass(frozen=True)
class XYZChainSpec:
    """Fields and couplings of H = sum_i b_i Sz_i - sum_ij J^mu_ij S_mu^i S_mu^j.

    couplings maps 'x' / 'y' / 'z' (optionally 'xy' for Sx^i Sy^j cross
    terms, which preserve parity too) to lists of (i, j, J) triples.
    """

    n: int
    s: float = 1.0
    fields: tuple = ()
    couplings: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("chain needs at least one site")
        b = tuple(float(x) for x in self.fields) or (0.0,) * self.n
        if len(b) != self.n:
            raise ValueError(f"expected {self.n} field entries, got {len(b)}")
        object.__setattr__(self, "fields", b)
        allowed = {"x", "y", "z", "xy"}
        cleaned = {}
        for key, entries in dict(self.couplings).items():
            if key not in allowed:
                raise ValueError(f"unknown coupling axis {key!r}")
            triples = []
            for i, j, val in entries:
                i, j = int(i), int(j)
                if not (0 <= i < self.n and 0 <= j < self.n) or i == j:
                    raise ValueError(f"bad coupling sites ({i}, {j})")
                triples.append((i, j, float(val)))
            cleaned[key] = tuple(triples)
        object.__setattr__(self, "couplings", cleaned)

    @classmethod
    def uniform_chain(cls, n, jx, jy, jz, b=0.0, s=1.0, periodic=False):
        """Nearest-neighbour chain with uniform couplings and field."""
        bonds = [(i, i + 1) for i in range(n - 1)]
        if periodic and n > 2:
            bonds.append((n - 1, 0))
        couplings = {
            "x": [(i, j, jx) for i, j in bonds],
            "y": [(i, j, jy) for i, j in bonds],
            "z": [(i, j, jz) for i, j in bonds],
        }
        return cls(n=n, s=s, fields=(b,) * n, couplings=couplings)

    def anisotropy(self):
        """chi = (Jy - Jz)/(Jx - Jz) when couplings are uniform, else None."""

        def uniform(axis):
            vals = {v for _, _, v in self.couplings.get(axis, ())}
            if len(vals) > 1:
                return None
            return vals.pop() if vals else 0.0

        jx, jy, jz = uniform("x"), uniform("y"), uniform("z")
        if None in (jx, jy, jz) or jx == jz:
            return None
        return (jy - jz) / (jx - jz)


def _site_operator(op: np.ndarray, site: int, n: int, d: int) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for k in range(n):
        out = kron(out, op if k == site else np.eye(d))
    return out


def xyz_hamiltonian(spec: XYZChainSpec) -> np.ndarray:
    """Dense Hamiltonian of the chain; commutes with the composite parity."""
    triple = spin_operators(spec.s)
    ops = {"x": triple.sx, "y": triple.sy, "z": triple.sz}
    d = triple.sz.shape[0]
    dim = d**spec.n
    h = np.zeros((dim, dim), dtype=complex)
    for site, b in enumerate(spec.fields):
        if b != 0.0:
            h += b * _site_operator(ops["z"], site, spec.n, d)
    for axis, entries in spec.couplings.items():
        if axis == "xy":
            left, right = ops["x"], ops["y"]
        else:
            left = right = ops[axis]
        for i, j, val in entries:
            h -= val * (
                _site_operator(left, i, spec.n, d)
                @ _site_operator(right, j, spec.n, d)
            )
    return (h + h.conj().T) / 2


class GroundState(NamedTuple):
    energy: float
    vector: np.ndarray
    degenerate: bool


def ground_state(h: np.ndarray, gap_tol: float = 1e-10) -> GroundState:
    """Lowest eigenpair; degenerate=True suspends any parity claim."""
    w, v = np.linalg.eigh(h)
    degenerate = bool(len(w) > 1 and (w[1] - w[0]) < gap_tol)
    return GroundState(float(w[0]), v[:, 0], degenerate)


def thermal_state(h: np.ndarray, beta: float, dims=None) -> DensityMatrix:
    """Gibbs state e^{-beta H}/Z; dims defaults to splitting off the last qutrit."""
    w, v = np.linalg.eigh(h)
    weights = np.exp(-beta * (w - w.min()))
    weights /= weights.sum()
    mat = (v * weights) @ v.conj().T
    d = mat.shape[0]
    if dims is None:
        if d % 3 != 0:
            raise DimensionError("cannot infer dims: dimension not divisible by 3")
        dims = (d // 3, 3)
    return DensityMatrix(mat, dims)


# --- closed-form reference curves -------------------------------------------


def h_nu(x: float, nu: float) -> float:
    """Entropy kernel -x log2 x - (nu - x) log2(nu - x) on [0, nu]."""

    def term(y):
        return -y * math.log2(y) if y > 0 else 0.0

    if x < -1e-12 or x > nu + 1e-12:
        raise ValueError(f"argument {x} outside [0, {nu}]")
    x = min(max(x, 0.0), nu)
    return term(x) + term(nu - x)


def q_theta(theta: float) -> float:
    return 0.5 * math.sin(theta) ** 2


def p_theta(theta: float) -> float:
    inner = (
        115.0 / 8.0
        - math.cos(2 * theta)
        + 1.5 * math.cos(4 * theta)
        + math.cos(6 * theta)
        + 0.125 * math.cos(8 * theta)
    )
    return 0.25 - math.sqrt(inner) / 16.0


def alpha_star(theta: float) -> float:
    """Optimal measurement angle tan(alpha) = tan^2(theta/2)."""
    return math.atan(math.tan(theta / 2.0) ** 2)


def d_closed(theta: float) -> float:
    """Discord of rho_theta at its minimizing measurement, in bits."""
    q = q_theta(theta)
    return 2 * h_nu(p_theta(theta), 0.5) - 1 - h_nu(2 * q * (1 - q), 1.0) + h_nu(q, 1.0)


def i2_closed(theta: float) -> float:
    """Geometric discord of rho_theta (normalized); kinked at THETA_C.

    Below the critical angle the collinear (type II) family wins, above it
    the Y-shaped (type III) family does.
    """
    if theta < THETA_C:
        return 0.125 * math.sin(theta) ** 4 * (3 + math.cos(2 * theta)) ** 2
    return (
        math.cos(theta) ** 4
        * (11 + 4 * math.cos(2 * theta) + math.cos(4 * theta))
        / 16.0
    )


def d_asymptote_small(theta: float) -> float:
    return theta * theta


def i2_asymptote_small(theta: float) -> float:
    return 2.0 * theta**4


def d_asymptote_large(theta: float) -> float:
    eps = math.pi / 2 - theta
    return (0.5 - math.log2(math.e) / 4 - math.log2(eps)) * eps**4


def i2_asymptote_large(theta: float) -> float:
    return 0.5 * (math.pi / 2 - theta) ** 4


# --- state file IO (shared with the CLI) ------------------------------------


def save_state(path, rho: DensityMatrix) -> None:
    """Write a state as JSON: dims plus row-major [re, im] matrix entries."""
    flat = rho.matrix.reshape(-1)
    payload = {
        "dims": [rho.dims[0], rho.dims[1]],
        "matrix": [[float(z.real), float(z.imag)] for z in flat],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_state(path) -> DensityMatrix:
    with open(path) as fh:
        payload = json.load(fh)
    try:
        da, db = (int(x) for x in payload["dims"])
        entries = payload["matrix"]
        flat = np.array([complex(re, im) for re, im in entries])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed state file: {exc}") from exc
    d = da * db
    if flat.size != d * d:
        raise DimensionError(
            f"matrix has {flat.size} entries, expected {d * d} for dims {(da, db)}"
        )
    return DensityMatrix(flat.reshape(d, d), (da, db))
