import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qutrit_discord.linalg import (
    DensityMatrix,
    DimensionError,
    commutator,
    dagger,
    frobenius,
    hermitian_eig,
    is_hermitian,
    kron,
    matrix_func,
    partial_trace,
    ptrace,
)

RNG = np.random.default_rng(7)


def random_hermitian(d, rng=RNG):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def random_density(da, db, rng=RNG):
    d = da * db
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, (da, db))


def test_dagger_and_frobenius():
    m = np.array([[1.0, 2j], [0.0, -1.0]])
    np.testing.assert_allclose(dagger(m), np.array([[1.0, 0.0], [-2j, -1.0]]))
    assert frobenius(m) == pytest.approx(np.sqrt(1 + 4 + 1))


def test_is_hermitian():
    h = random_hermitian(4)
    assert is_hermitian(h)
    assert not is_hermitian(h + 1e-6 * 1j * np.eye(4))


def test_hermitian_eig_matches_reconstruction():
    h = random_hermitian(6)
    eig = hermitian_eig(h)
    assert np.all(np.diff(eig.eigenvalues) >= 0)
    rebuilt = (eig.eigenvectors * eig.eigenvalues) @ dagger(eig.eigenvectors)
    np.testing.assert_allclose(rebuilt, h, atol=1e-12)


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_kron_and_commutator():
    a = random_hermitian(2)
    b = random_hermitian(3)
    np.testing.assert_allclose(kron(a, b), np.kron(a, b))
    c = commutator(a, a)
    np.testing.assert_allclose(c, np.zeros_like(c), atol=1e-14)
    # commutator of Hermitians is anti-Hermitian
    ab = commutator(kron(a, np.eye(3)), kron(np.eye(2), b))
    np.testing.assert_allclose(ab, np.zeros_like(ab), atol=1e-13)


def test_ptrace_factorizes_products():
    a = random_hermitian(2)
    b = random_hermitian(3)
    m = kron(a, b)
    np.testing.assert_allclose(ptrace(m, (2, 3), "A"), np.trace(b) * a, atol=1e-12)
    np.testing.assert_allclose(ptrace(m, (2, 3), "B"), np.trace(a) * b, atol=1e-12)


def test_ptrace_preserves_trace():
    rho = random_density(3, 3)
    for keep in ("A", "B"):
        red = ptrace(rho.matrix, (3, 3), keep)
        assert np.trace(red).real == pytest.approx(1.0, abs=1e-12)


def test_ptrace_works_on_non_states():
    # needed for the stationarity operators, which trace a commutator
    m = RNG.standard_normal((9, 9)) + 1j * RNG.standard_normal((9, 9))
    red = ptrace(m, (3, 3), "B")
    expect = sum(m[3 * i : 3 * i + 3, 3 * i : 3 * i + 3] for i in range(3))
    np.testing.assert_allclose(red, expect, atol=1e-13)


def test_matrix_func_exponential():
    h = random_hermitian(4)
    w, v = np.linalg.eigh(h)
    direct = (v * np.exp(w)) @ dagger(v)
    np.testing.assert_allclose(matrix_func(h, np.exp), direct, atol=1e-11)


def test_matrix_func_rejects_non_finite():
    proj = np.diag([1.0, 0.0])
    with pytest.raises(ValueError):
        matrix_func(proj, lambda x: float("inf") if x == 0 else 1.0 / x)


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(4) / 4, (2, 3))  # dims mismatch
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(4) / 2, (2, 2))  # trace 2
    bad = np.diag([1.5, -0.5, 0.0, 0.0])
    with pytest.raises(ValueError):
        DensityMatrix(bad, (2, 2))  # negative eigenvalue
    nh = np.eye(4) / 4 + 0j
    nh[0, 1] = 0.3
    with pytest.raises(ValueError):
        DensityMatrix(nh, (2, 2))  # not Hermitian


def test_density_matrix_is_read_only():
    rho = random_density(2, 3)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 0.0
    assert rho.d == 6
    assert 1.0 / 6.0 - 1e-12 <= rho.purity() <= 1.0 + 1e-12


def test_partial_trace_returns_states():
    rho = random_density(2, 3)
    ra = partial_trace(rho, "A")
    rb = partial_trace(rho, "B")
    assert ra.dims == (2, 1) and rb.dims == (1, 3)
    assert ra.matrix.shape == (2, 2) and rb.matrix.shape == (3, 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_partial_trace_of_product_is_factor(seed):
    rng = np.random.default_rng(seed)
    a = random_density(2, 1, rng).matrix
    b = random_density(1, 3, rng).matrix
    rho = DensityMatrix(kron(a, b), (2, 3))
    np.testing.assert_allclose(partial_trace(rho, "A").matrix, a, atol=1e-12)
    np.testing.assert_allclose(partial_trace(rho, "B").matrix, b, atol=1e-12)


def test_dimension_error_is_value_error():
    assert issubclass(DimensionError, ValueError)
    with pytest.raises(DimensionError):
        ptrace(np.eye(5), (2, 3), "A")
