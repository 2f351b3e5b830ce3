import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qutrit_discord.linalg import commutator, dagger, kron
from qutrit_discord.spins import (
    ParityOperator,
    coherent_state,
    composite_parity,
    parity_z,
    rotation,
    spin_dim,
    spin_operators,
)

SPINS = (0.5, 1.0, 1.5, 2.0)


@pytest.mark.parametrize("s", SPINS)
def test_commutation_relations(s):
    ops = spin_operators(s)
    pairs = (
        (ops.sx, ops.sy, ops.sz),
        (ops.sy, ops.sz, ops.sx),
        (ops.sz, ops.sx, ops.sy),
    )
    for a, b, c in pairs:
        np.testing.assert_allclose(commutator(a, b), 1j * c, atol=1e-12)


@pytest.mark.parametrize("s", SPINS)
def test_casimir(s):
    ops = spin_operators(s)
    total = ops.sx @ ops.sx + ops.sy @ ops.sy + ops.sz @ ops.sz
    np.testing.assert_allclose(total, s * (s + 1) * np.eye(spin_dim(s)), atol=1e-12)


def test_sz_is_diagonal_descending():
    ops = spin_operators(1.0)
    np.testing.assert_allclose(ops.sz, np.diag([1.0, 0.0, -1.0]), atol=1e-15)
    ops = spin_operators(1.5)
    np.testing.assert_allclose(np.diag(ops.sz), [1.5, 0.5, -0.5, -1.5], atol=1e-15)


def test_spin_dim_and_validation():
    assert spin_dim(1.0) == 3
    assert spin_dim(0.5) == 2
    with pytest.raises(ValueError):
        spin_operators(0.3)
    with pytest.raises(ValueError):
        spin_operators(-1.0)


@pytest.mark.parametrize("axis", ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
def test_rotation_is_unitary(axis):
    r = rotation(1.0, axis, 0.7)
    np.testing.assert_allclose(r @ dagger(r), np.eye(3), atol=1e-12)


def test_rotation_about_z_is_phases():
    r = rotation(1.0, (0, 0, 1), 0.9)
    expect = np.diag(np.exp(-1j * 0.9 * np.array([1.0, 0.0, -1.0])))
    np.testing.assert_allclose(r, expect, atol=1e-12)


def test_rotation_composes():
    a = rotation(1.0, (0, 1, 0), 0.4)
    b = rotation(1.0, (0, 1, 0), 0.3)
    np.testing.assert_allclose(a @ b, rotation(1.0, (0, 1, 0), 0.7), atol=1e-12)


def test_rotation_rejects_bad_axis():
    with pytest.raises(ValueError):
        rotation(1.0, (1, 1, 0), 0.5)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, math.pi / 2))
def test_coherent_state_components(theta):
    # e^{-i theta S_y} |s, s> for s = 1
    psi = coherent_state(1.0, theta)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    expect = np.array([c * c, math.sqrt(2) * s * c, s * s])
    np.testing.assert_allclose(psi, expect, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, math.pi / 2))
def test_coherent_overlap_is_cos_squared(theta):
    plus = coherent_state(1.0, theta)
    minus = coherent_state(1.0, -theta)
    overlap = np.vdot(minus, plus).real
    assert overlap == pytest.approx(math.cos(theta) ** 2, abs=1e-12)


def test_parity_z_spin1():
    p = parity_z(1.0).matrix
    np.testing.assert_allclose(p, np.diag([1.0, -1.0, 1.0]), atol=1e-15)


def test_parity_flips_coherent_state():
    theta = 0.63
    p = parity_z(1.0).matrix
    np.testing.assert_allclose(
        p @ coherent_state(1.0, theta), coherent_state(1.0, -theta), atol=1e-12
    )


def test_composite_parity_is_product():
    p1 = parity_z(1.0).matrix
    p2 = composite_parity([1.0, 1.0]).matrix
    np.testing.assert_allclose(p2, kron(p1, p1), atol=1e-15)
    assert p2.shape == (9, 9)


def test_parity_operator_validation():
    with pytest.raises(ValueError):
        ParityOperator(np.array([[0.0, 1.0], [1.0, 0.0]]))  # not diagonal
    with pytest.raises(ValueError):
        ParityOperator(np.diag([1.0, 0.5]))  # eigenvalue not +-1
