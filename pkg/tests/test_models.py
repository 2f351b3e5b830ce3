import json
import math

import numpy as np
import pytest

from qutrit_discord.linalg import DensityMatrix, DimensionError, kron
from qutrit_discord.models import (
    THETA_C,
    XYZChainSpec,
    aligned_mixture,
    alpha_star,
    bell_anchor,
    d_asymptote_large,
    d_asymptote_small,
    d_closed,
    fixed_parity_state,
    ground_state,
    h_nu,
    i2_asymptote_large,
    i2_asymptote_small,
    i2_closed,
    load_state,
    p_theta,
    q_theta,
    reduce_pair,
    save_state,
    thermal_state,
    xyz_hamiltonian,
)
from qutrit_discord.spins import coherent_state, composite_parity


def test_theta_c_value():
    assert THETA_C == math.acos(3.0 ** -0.25)
    assert THETA_C == pytest.approx(0.7077359956475598, abs=1e-15)


def test_aligned_mixture_structure():
    theta = 0.3 * math.pi
    state = aligned_mixture(theta)
    assert state.theta == theta
    m = state.rho.matrix
    assert np.trace(m).real == pytest.approx(1.0, abs=1e-14)
    assert np.abs(m.imag).max() < 1e-14
    # equal mixture of two product states: exactly two nonzero eigenvalues
    w = np.linalg.eigvalsh(m)
    assert (w > 1e-12).sum() == 2
    overlap = math.cos(theta) ** 2
    expected = np.sort([0.0] * 7 + [(1 - overlap**2) / 2, (1 + overlap**2) / 2])
    np.testing.assert_allclose(w, expected, atol=1e-12)


def test_aligned_mixture_parity_invariant():
    parity = composite_parity((1.0, 1.0)).matrix
    for theta in (0.1, 0.7, 1.4):
        m = aligned_mixture(theta).rho.matrix
        assert np.abs(parity @ m - m @ parity).max() < 1e-13


def test_h_nu():
    assert h_nu(0.25, 1.0) == pytest.approx(0.8112781244591328, abs=1e-14)
    assert h_nu(0.0, 1.0) == 0.0
    assert h_nu(0.1, 0.5) == pytest.approx(h_nu(0.4, 0.5), abs=1e-14)
    assert h_nu(0.25, 0.5) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError):
        h_nu(0.6, 0.5)
    with pytest.raises(ValueError):
        h_nu(-0.1, 0.5)
    # tiny excursions from roundoff are clamped, not rejected
    assert h_nu(-1e-13, 0.5) == pytest.approx(-0.5 * math.log2(0.5), abs=1e-10)


def test_mixture_probability_curves():
    assert q_theta(math.pi / 4) == pytest.approx(0.25, abs=1e-14)
    assert q_theta(0.0) == 0.0
    assert p_theta(math.pi / 4) == pytest.approx(0.02465304528350068, abs=1e-14)
    assert p_theta(0.0) == pytest.approx(0.0, abs=1e-14)


def test_alpha_star_anchors():
    assert alpha_star(0.0) == 0.0
    assert alpha_star(math.pi / 2) == pytest.approx(math.pi / 4, abs=1e-14)
    assert alpha_star(math.pi / 3) == pytest.approx(math.atan(1.0 / 3.0), abs=1e-14)


def test_closed_forms_frozen():
    # regression literals; the optimizer cross-check lives in the
    # acceptance suite
    assert d_closed(math.pi / 4) == pytest.approx(0.14028605706362696, abs=1e-12)
    assert i2_closed(math.pi / 4) == pytest.approx(5.0 / 32.0, abs=1e-14)
    assert d_closed(0.35 * math.pi) == pytest.approx(0.05304571686573534, abs=1e-12)


def test_closed_forms_vanish_at_ends():
    for fn in (d_closed, i2_closed):
        assert abs(fn(0.0)) < 1e-12
        assert abs(fn(math.pi / 2)) < 1e-12


def test_i2_branches_meet_at_transition():
    eps = 1e-9
    below = i2_closed(THETA_C - eps)
    above = i2_closed(THETA_C + eps)
    assert below == pytest.approx(2.0 / 9.0, abs=1e-7)
    assert abs(below - above) < 1e-7
    assert i2_closed(THETA_C - 1e-15) == pytest.approx(2.0 / 9.0, abs=1e-12)


def test_asymptotes():
    th = 0.01
    assert d_closed(th) / d_asymptote_small(th) == pytest.approx(1.0, abs=0.1)
    assert i2_closed(th) / i2_asymptote_small(th) == pytest.approx(1.0, abs=0.1)
    th = math.pi / 2 - 0.01
    assert d_closed(th) / d_asymptote_large(th) == pytest.approx(1.0, abs=0.1)
    assert i2_closed(th) / i2_asymptote_large(th) == pytest.approx(1.0, abs=0.1)
    assert d_asymptote_small(0.0) == 0.0


def test_bell_anchor_state():
    bell = bell_anchor()
    m = bell.matrix
    assert np.trace(m).real == pytest.approx(1.0)
    assert np.trace(m @ m).real == pytest.approx(1.0, abs=1e-14)
    assert m[0, 0].real == pytest.approx(0.5)
    assert m[0, 8].real == pytest.approx(0.5)


@pytest.mark.parametrize("n,sign", [(1, 1), (2, 1), (2, -1), (4, 1), (4, -1)])
def test_fixed_parity_state_is_parity_eigenstate(n, sign):
    theta = 0.3 * math.pi
    psi = fixed_parity_state(n, theta, sign)
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)
    parity = composite_parity((1.0,) * n).matrix
    np.testing.assert_allclose(parity @ psi, sign * psi, atol=1e-12)


def test_fixed_parity_state_validation():
    with pytest.raises(ValueError):
        fixed_parity_state(0, 0.3, 1)
    with pytest.raises(ValueError):
        fixed_parity_state(2, 0.3, 2)
    # the odd branch dies as the two components coincide
    with pytest.raises(ValueError):
        fixed_parity_state(2, 1e-9, -1)
    fixed_parity_state(2, 1e-9, 1)


def test_reduce_pair_product_state():
    a = coherent_state(1, 0.4)
    b = coherent_state(1, 1.1)
    c = coherent_state(1, -0.9)
    psi = kron(kron(a, b), c)
    red = reduce_pair(psi, 0, 2)
    target = np.outer(kron(a, c), kron(a, c).conj())
    np.testing.assert_allclose(red.matrix, target, atol=1e-13)
    # swapped site order transposes the factors
    red10 = reduce_pair(psi, 1, 0)
    target10 = np.outer(kron(b, a), kron(b, a).conj())
    np.testing.assert_allclose(red10.matrix, target10, atol=1e-13)


def test_reduce_pair_two_sites_is_projector():
    psi = fixed_parity_state(2, 0.35 * math.pi, 1)
    red = reduce_pair(psi, 0, 1)
    np.testing.assert_allclose(red.matrix, np.outer(psi, psi.conj()), atol=1e-13)


def test_reduce_pair_validation():
    psi = fixed_parity_state(3, 0.3, 1)
    with pytest.raises(ValueError):
        reduce_pair(psi, 0, 0)
    with pytest.raises(ValueError):
        reduce_pair(psi, 0, 3)
    with pytest.raises(DimensionError):
        reduce_pair(np.ones(8), 0, 1)


def test_chain_spec_validation():
    with pytest.raises(ValueError):
        XYZChainSpec(n=0)
    with pytest.raises(ValueError):
        XYZChainSpec(n=3, fields=(1.0, 2.0))
    with pytest.raises(ValueError):
        XYZChainSpec(n=2, couplings={"w": [(0, 1, 1.0)]})
    with pytest.raises(ValueError):
        XYZChainSpec(n=2, couplings={"x": [(0, 0, 1.0)]})
    with pytest.raises(ValueError):
        XYZChainSpec(n=2, couplings={"x": [(0, 2, 1.0)]})
    spec = XYZChainSpec(n=2)
    assert spec.fields == (0.0, 0.0)


def test_uniform_chain_bonds():
    spec = XYZChainSpec.uniform_chain(4, 1.0, 0.5, 0.25, b=0.3)
    assert len(spec.couplings["x"]) == 3
    assert spec.fields == (0.3,) * 4
    ring = XYZChainSpec.uniform_chain(4, 1.0, 0.5, 0.25, periodic=True)
    assert len(ring.couplings["x"]) == 4
    assert spec.anisotropy() == pytest.approx((0.5 - 0.25) / (1.0 - 0.25))
    assert XYZChainSpec.uniform_chain(3, 1.0, 0.5, 1.0).anisotropy() is None


def test_xyz_hamiltonian_against_direct_kron():
    # independent 2-site construction: H = b(Sz x 1 + 1 x Sz) - jx Sx x Sx ...
    from qutrit_discord.spins import spin_operators

    trip = spin_operators(1.0)
    eye = np.eye(3)
    jx, jy, jz, b = 0.8, -0.3, 0.5, 0.7
    direct = (
        b * (kron(trip.sz, eye) + kron(eye, trip.sz))
        - jx * kron(trip.sx, trip.sx)
        - jy * kron(trip.sy, trip.sy)
        - jz * kron(trip.sz, trip.sz)
    )
    spec = XYZChainSpec.uniform_chain(2, jx, jy, jz, b=b)
    np.testing.assert_allclose(xyz_hamiltonian(spec), direct, atol=1e-13)


def test_xyz_hamiltonian_parity_commutes():
    spec = XYZChainSpec.uniform_chain(3, 1.0, 0.4, -0.2, b=0.9)
    h = xyz_hamiltonian(spec)
    assert np.abs(h - h.conj().T).max() < 1e-13
    parity = composite_parity((1.0,) * 3).matrix
    assert np.abs(parity @ h - h @ parity).max() < 1e-12
    # the cross xy coupling preserves parity as well
    crossed = XYZChainSpec(n=2, couplings={"xy": [(0, 1, 0.6)]})
    hc = xyz_hamiltonian(crossed)
    p2 = composite_parity((1.0, 1.0)).matrix
    assert np.abs(p2 @ hc - hc @ p2).max() < 1e-12


def test_ground_state_matches_eigh():
    spec = XYZChainSpec.uniform_chain(2, 1.0, 0.4, -0.2, b=0.3)
    h = xyz_hamiltonian(spec)
    gs = ground_state(h)
    w, v = np.linalg.eigh(h)
    assert gs.energy == pytest.approx(w[0], abs=1e-12)
    residual = h @ gs.vector - gs.energy * gs.vector
    assert np.linalg.norm(residual) < 1e-10
    assert not gs.degenerate
    assert ground_state(np.eye(4, dtype=complex)).degenerate


def test_thermal_state_limits():
    spec = XYZChainSpec.uniform_chain(2, 1.0, 0.4, -0.2, b=0.3)
    h = xyz_hamiltonian(spec)
    hot = thermal_state(h, 0.0)
    np.testing.assert_allclose(hot.matrix, np.eye(9) / 9.0, atol=1e-13)
    assert hot.dims == (3, 3)
    cold = thermal_state(h, 1e4)
    gs = ground_state(h)
    np.testing.assert_allclose(
        cold.matrix, np.outer(gs.vector, gs.vector.conj()), atol=1e-8
    )
    with pytest.raises(DimensionError):
        thermal_state(np.eye(4, dtype=complex), 1.0)
    q = thermal_state(np.eye(4, dtype=complex), 1.0, dims=(2, 2))
    assert q.dims == (2, 2)


def test_state_io_roundtrip(tmp_path):
    path = tmp_path / "state.json"
    rho = aligned_mixture(0.27 * math.pi).rho
    save_state(path, rho)
    back = load_state(path)
    assert back.dims == rho.dims
    np.testing.assert_allclose(back.matrix, rho.matrix, atol=0)


def test_load_state_rejects_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"matrix": [[1.0, 0.0]]}))
    with pytest.raises(ValueError):
        load_state(path)
    path.write_text(json.dumps({"dims": [3, 3], "matrix": [[1.0, 0.0]] * 5}))
    with pytest.raises(DimensionError):
        load_state(path)
    # a well-formed file holding a non-state is rejected by validation
    payload = {"dims": [1, 2], "matrix": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}
    path.write_text(json.dumps(payload))
    with pytest.raises(ValueError):
        load_state(path)
