"""Dense complex matrix primitives shared by every other module.

All operators live as square ``complex128`` numpy arrays. The eigensolver is
a cyclic Jacobi rotation scheme: every spectrum this package needs is small
and well conditioned, and the sweep loop doubles as the package's showcase
numba kernel (see ``_kernels``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

DEFAULT_TOL = 1e-10
MAX_JACOBI_SWEEPS = 60


@dataclass(frozen=True)
class SpectralReport:
    """Eigenvalues in ascending order plus the final off-diagonal residual."""

    eigenvalues: np.ndarray
    max_offdiag_residual: float


def _as_square(a, name: str = "matrix") -> np.ndarray:
    m = np.ascontiguousarray(np.asarray(a, dtype=np.complex128))
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square 2-D array, got shape {m.shape}")
    return m


def kron(a, b) -> np.ndarray:
    """Kronecker product of two square complex matrices."""
    return np.kron(_as_square(a, "a"), _as_square(b, "b"))


def matmul(a, b) -> np.ndarray:
    """Matrix product with an explicit dimension check."""
    ma = _as_square(a, "a")
    mb = _as_square(b, "b")
    if ma.shape != mb.shape:
        raise ValueError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    return ma @ mb


def dagger(a) -> np.ndarray:
    """Conjugate transpose."""
    return np.ascontiguousarray(_as_square(a).conj().T)


def conj_entries(a) -> np.ndarray:
    """Entrywise complex conjugate (no transpose)."""
    return np.conj(_as_square(a))


def trace_product(a, b) -> complex:
    """Tr[a @ b] computed without forming the product."""
    ma = _as_square(a, "a")
    mb = _as_square(b, "b")
    if ma.shape != mb.shape:
        raise ValueError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    return complex(np.einsum("ij,ji->", ma, mb))


def hermitian_eigenvalues(a, tol: float = DEFAULT_TOL) -> SpectralReport:
    """Full spectrum of a Hermitian matrix via cyclic Jacobi rotations.

    Raises ValueError when the input fails the Hermiticity gate (max entry of
    ``a - dagger(a)`` above ``tol``) and RuntimeError when the sweep cap is
    reached before the off-diagonal residual drops below ``tol``.
    """
    m = _as_square(a)
    if m.shape[0] == 1:
        ev = np.array([m[0, 0].real])
        ev.setflags(write=False)
        return SpectralReport(eigenvalues=ev, max_offdiag_residual=0.0)
    defect = float(np.max(np.abs(m - m.conj().T)))
    if defect > tol:
        raise ValueError(f"input is not Hermitian within tol={tol:g} (defect {defect:.3e})")
    work = np.ascontiguousarray((m + m.conj().T) / 2.0)
    evals, residual = _kernels.jacobi_eigvalsh(work, float(tol), MAX_JACOBI_SWEEPS)
    if residual > tol:
        raise RuntimeError(
            f"Jacobi sweep did not converge: residual {residual:.3e} > tol {tol:g} "
            f"after {MAX_JACOBI_SWEEPS} sweeps"
        )
    evals = np.asarray(evals, dtype=np.float64)
    evals.setflags(write=False)
    return SpectralReport(eigenvalues=evals, max_offdiag_residual=float(residual))


def randomized_positivity_probe(rho, probes: int = 100, seed: int = 7) -> float:
    """Minimum of Re<v|rho|v> over random unit vectors.

    Cheap positivity evidence for matrices too large for a full spectrum.
    """
    m = _as_square(rho)
    d = m.shape[0]
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(probes, d)) + 1j * rng.normal(size=(probes, d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    vals = np.einsum("pi,ij,pj->p", v.conj(), m, v).real
    return float(vals.min())
