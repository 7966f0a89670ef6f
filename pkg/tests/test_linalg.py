import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from dissipchain.errors import DimensionMismatch, NotHermitian, NotPSD
from dissipchain.linalg import expm, hermitian_eig, kernel_basis, kron, matexp_apply, psd_sqrt

SM = np.array([[0, 0], [1, 0]], dtype=complex)


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a + a.conj().T


def test_kron_identity():
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_sigma_minus_identity():
    expected = np.zeros((4, 4))
    expected[2, 0] = expected[3, 1] = 1
    np.testing.assert_array_equal(kron(SM, np.eye(2)), expected)


def test_kron_dims_and_entries(rng):
    a = rng.normal(size=(2, 3))
    b = rng.normal(size=(4, 5))
    out = kron(a, b)
    assert out.shape == (8, 15)
    assert out[1 * 4 + 3, 2 * 5 + 1] == a[1, 2] * b[3, 1]
    np.testing.assert_array_equal(out, np.kron(a, b))


small = arrays(np.float64, (2, 2), elements=st.integers(-5, 5).map(float))


@given(small, small, small)
def test_kron_associative(a, b, c):
    np.testing.assert_array_equal(kron(kron(a, b), c), kron(a, kron(b, c)))


def test_eig_diagonal():
    w, _ = hermitian_eig(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(w, [1, 2, 3], atol=1e-15)


def test_eig_pauli_x():
    w, _ = hermitian_eig([[0, 1], [1, 0]])
    np.testing.assert_allclose(w, [-1, 1], atol=1e-15)


@pytest.mark.parametrize("n", [8, 20, 64])
def test_eig_random_reconstruction(rng, n):
    h = random_hermitian(rng, n)
    w, q = hermitian_eig(h)
    scale = max(1.0, np.linalg.norm(h))
    assert np.all(np.diff(w) >= 0)
    assert np.linalg.norm(q @ np.diag(w) @ q.conj().T - h) <= 1e-10 * scale
    assert np.linalg.norm(q.conj().T @ q - np.eye(n)) <= 1e-10
    np.testing.assert_allclose(w, np.linalg.eigvalsh(h), atol=1e-12 * scale)


@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_eig_trace_sum(n, seed):
    h = random_hermitian(np.random.default_rng(seed), n)
    w, _ = hermitian_eig(h)
    tr = np.trace(h).real
    assert abs(w.sum() - tr) <= 1e-10 * max(1.0, abs(tr), np.linalg.norm(h))


def test_eig_degenerate_and_zero():
    w, q = hermitian_eig(np.zeros((3, 3)))
    np.testing.assert_array_equal(w, 0)
    np.testing.assert_array_equal(q, np.eye(3))


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig([[0, 1], [0, 0]])


def test_eig_rejects_rectangular():
    with pytest.raises(DimensionMismatch):
        hermitian_eig(np.zeros((2, 3)))


def test_psd_sqrt_examples():
    np.testing.assert_allclose(psd_sqrt(np.eye(4)), np.eye(4), atol=1e-15)
    np.testing.assert_allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)
    psi = np.array([1, 1j, -1, 0.5]) / np.linalg.norm([1, 1j, -1, 0.5])
    proj = np.outer(psi, psi.conj())
    np.testing.assert_allclose(psd_sqrt(proj), proj, atol=1e-8)


def test_psd_sqrt_squares_back(rng):
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    h = a @ a.conj().T
    s = psd_sqrt(h)
    assert np.linalg.norm(s @ s - h) <= 1e-8 * max(1, np.linalg.norm(h))
    assert np.linalg.norm(s - s.conj().T) == pytest.approx(0, abs=1e-12)


def test_psd_sqrt_clamps_and_rejects():
    s = psd_sqrt(np.diag([1.0, -1e-9]))
    np.testing.assert_allclose(s, np.diag([1.0, 0.0]), atol=1e-15)
    with pytest.raises(NotPSD):
        psd_sqrt(np.diag([1.0, -1e-6]))


def test_kernel_examples():
    assert kernel_basis(np.eye(3)) == []
    basis = kernel_basis(np.zeros((3, 3)))
    assert len(basis) == 3
    gram = np.array([[np.vdot(u, v) for v in basis] for u in basis])
    np.testing.assert_allclose(gram, np.eye(3), atol=1e-14)
    (v,) = kernel_basis(np.diag([0.0, 1.0, 2.0]))
    np.testing.assert_allclose(np.abs(v), [1, 0, 0], atol=1e-14)


def test_kernel_vectors_satisfy_residual(rng):
    # rank-3 matrix of size 6
    m = rng.normal(size=(6, 3)) @ rng.normal(size=(3, 6))
    basis = kernel_basis(m, 1e-9)
    assert len(basis) == 3
    for v in basis:
        assert np.linalg.norm(m @ v) <= 10 * 1e-9 * np.linalg.norm(m)


def test_expm_examples():
    v = np.array([1.0, 2.0])
    np.testing.assert_array_equal(matexp_apply(np.zeros((2, 2)), v, 3.0), v)
    np.testing.assert_allclose(matexp_apply([[-1.0]], [2.0], 1.0), [2 * np.exp(-1)], rtol=1e-15)
    nil = np.array([[0.0, 1.0], [0.0, 0.0]])
    np.testing.assert_allclose(matexp_apply(nil, v, 1.0), (np.eye(2) + nil) @ v, rtol=1e-15)


@pytest.mark.parametrize("scale", [0.1, 10.0, 1000.0])
def test_expm_against_eigendecomposition(rng, scale):
    h = random_hermitian(rng, 6)
    h *= scale / np.abs(h).sum(axis=0).max()
    w, q = np.linalg.eigh(h)
    exact = q @ np.diag(np.exp(1j * w)) @ q.conj().T
    v = rng.normal(size=6) + 0j
    got = matexp_apply(1j * h, v, 1.0)
    assert np.linalg.norm(got - exact @ v) <= 1e-12 * np.linalg.norm(v) * max(1.0, scale / 100)


def test_expm_decaying_generator_stays_accurate(rng):
    # stable diagonalizable generator with norm*t around 1e3
    p = rng.normal(size=(5, 5))
    d = -np.linspace(0.1, 50.0, 5)
    m = p @ np.diag(d) @ np.linalg.inv(p)
    exact = p @ np.diag(np.exp(d * 20.0)) @ np.linalg.inv(p)
    assert np.abs(expm(m, 20.0) - exact).max() <= 1e-10 * np.abs(exact).max() + 1e-14


@given(st.floats(0, 1), st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_expm_semigroup(t1, t2, seed):
    r = np.random.default_rng(seed)
    m = r.normal(size=(4, 4)) + 1j * r.normal(size=(4, 4))
    m *= 50.0 / np.abs(m).sum(axis=0).max() / 2.0
    v = r.normal(size=4) + 0j
    direct = matexp_apply(m, v, t1 + t2)
    stepped = matexp_apply(m, matexp_apply(m, v, t1), t2)
    assert np.linalg.norm(direct - stepped) <= 1e-9 * max(np.linalg.norm(direct), 1e-300)


def test_matexp_apply_errors():
    with pytest.raises(DimensionMismatch):
        matexp_apply(np.eye(2), np.ones(3), 1.0)
    with pytest.raises(ValueError):
        matexp_apply(np.eye(2), np.ones(2), -1.0)
