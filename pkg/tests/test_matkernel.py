import numpy as np
import pytest

from poracbell import matkernel
from poracbell.matkernel import (
    SpectralReport,
    conj_entries,
    dagger,
    hermitian_eigenvalues,
    kron,
    matmul,
    randomized_positivity_probe,
    trace_product,
)


def random_hermitian(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


@pytest.mark.parametrize("dim", [1, 2, 3, 5, 8, 16, 33])
def test_jacobi_matches_lapack(dim):
    rng = np.random.default_rng(dim)
    h = random_hermitian(dim, rng)
    report = hermitian_eigenvalues(h)
    np.testing.assert_allclose(report.eigenvalues, np.linalg.eigvalsh(h), atol=1e-9)
    assert report.max_offdiag_residual <= matkernel.DEFAULT_TOL


def test_jacobi_eigenvalues_sorted_and_readonly():
    rng = np.random.default_rng(11)
    report = hermitian_eigenvalues(random_hermitian(12, rng))
    assert np.all(np.diff(report.eigenvalues) >= 0)
    with pytest.raises(ValueError):
        report.eigenvalues[0] = 0.0


def test_jacobi_degenerate_spectrum():
    # projector onto a 3-dimensional subspace of C^6, eigenvalues {0, 1}
    rng = np.random.default_rng(5)
    basis, _ = np.linalg.qr(rng.normal(size=(6, 3)) + 1j * rng.normal(size=(6, 3)))
    proj = basis @ basis.conj().T
    report = hermitian_eigenvalues(proj)
    np.testing.assert_allclose(report.eigenvalues, [0, 0, 0, 1, 1, 1], atol=1e-10)


def test_jacobi_already_diagonal():
    report = hermitian_eigenvalues(np.diag([3.0, -1.0, 2.0]).astype(complex))
    np.testing.assert_allclose(report.eigenvalues, [-1.0, 2.0, 3.0])
    assert report.max_offdiag_residual == 0.0


def test_jacobi_rejects_non_hermitian():
    bad = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    with pytest.raises(ValueError, match="Hermitian"):
        hermitian_eigenvalues(bad)


def test_jacobi_rejects_non_square():
    with pytest.raises(ValueError, match="square"):
        hermitian_eigenvalues(np.zeros((2, 3)))


def test_jacobi_sweep_cap(monkeypatch):
    monkeypatch.setattr(matkernel, "MAX_JACOBI_SWEEPS", 0)
    rng = np.random.default_rng(2)
    with pytest.raises(RuntimeError, match="converge"):
        hermitian_eigenvalues(random_hermitian(6, rng))


def test_one_by_one_shortcut():
    report = hermitian_eigenvalues(np.array([[4.5 + 0j]]))
    assert isinstance(report, SpectralReport)
    assert report.eigenvalues.tolist() == [4.5]


def test_kron_and_dagger_against_numpy():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    np.testing.assert_allclose(kron(a, b), np.kron(a, b))
    np.testing.assert_allclose(dagger(a), a.conj().T)
    np.testing.assert_allclose(conj_entries(b), b.conj())


def test_matmul_checks_shapes():
    with pytest.raises(ValueError, match="mismatch"):
        matmul(np.eye(2), np.eye(3))


def test_trace_product_matches_direct():
    rng = np.random.default_rng(9)
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    b = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    assert trace_product(a, b) == pytest.approx(np.trace(a @ b))
    with pytest.raises(ValueError):
        trace_product(a, np.eye(4))


def test_positivity_probe_sign():
    psd = np.diag([0.5, 0.3, 0.2, 0.0]).astype(complex)
    assert randomized_positivity_probe(psd) >= -1e-12
    indefinite = np.diag([-1.0, 0.1, 0.1, 0.1]).astype(complex)
    assert randomized_positivity_probe(indefinite, probes=200, seed=3) < 0


def test_positivity_probe_deterministic():
    rng = np.random.default_rng(21)
    h = random_hermitian(8, rng)
    assert randomized_positivity_probe(h) == randomized_positivity_probe(h)
