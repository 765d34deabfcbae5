"""Shared states and the local filtering operation.

The entangled resource for n bits lives on two registers of dimension
2**(n//2). Noise replaces the entangled projector with a flat mixture on
Bob's side conditioned on Alice's first basis state; the local filters are
diagonal and squeeze that first basis state on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Q_MIN = 1e-6
_NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class NoisyState:
    n: int
    m: int
    q: float
    rho: np.ndarray


@dataclass(frozen=True)
class FilterPair:
    dim: int
    xi: float
    delta: float
    f_a: np.ndarray
    f_b: np.ndarray
    superunit: bool


@dataclass(frozen=True)
class FilteredState:
    rho: np.ndarray
    norm: float


def _freeze(m: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(m)
    out.setflags(write=False)
    return out


def _check_n(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    return int(n)


def _check_q(q) -> None:
    arr = np.asarray(q, dtype=np.float64)
    if not np.all((arr >= Q_MIN) & (arr <= 1.0)):
        raise ValueError(f"q must lie in [{Q_MIN:g}, 1], got {q!r}")


def _check_xi(xi) -> None:
    arr = np.asarray(xi, dtype=np.float64)
    if not np.all((arr > 0.0) & (arr <= 1.0)):
        raise ValueError(f"xi must lie in (0, 1], got {xi!r}")


def is_superunit(q, xi):
    """True where the Bob-side filter strength xi/sqrt(q) exceeds one."""
    return np.asarray(xi) > np.sqrt(np.asarray(q))


def max_entangled(m: int) -> np.ndarray:
    """Maximally entangled vector on two 2**m dimensional registers."""
    if not isinstance(m, (int, np.integer)) or isinstance(m, bool) or m < 1:
        raise ValueError(f"m must be an integer >= 1, got {m!r}")
    d = 2**m
    v = np.zeros(d * d, dtype=np.complex128)
    v[:: d + 1] = 1.0 / np.sqrt(d)
    return _freeze(v)


def mixed_state(n: int, q: float) -> NoisyState:
    """Entangled projector with weight q plus flat one-sided noise with weight 1-q."""
    n = _check_n(n)
    _check_q(q)
    m = n // 2
    d = 2**m
    v = max_entangled(m)
    rho = q * np.outer(v, v.conj())
    # noise term |0><0| (x) I/d occupies the first d diagonal slots
    noise_diag = np.zeros(d * d, dtype=np.float64)
    noise_diag[:d] = 1.0 / d
    rho[np.diag_indices(d * d)] += (1.0 - q) * noise_diag
    return NoisyState(n=n, m=m, q=float(q), rho=_freeze(rho))


def make_filters(n: int, q: float, xi: float) -> FilterPair:
    """Diagonal filter pair; Bob's strength delta = xi/sqrt(q) flags superunit filters."""
    n = _check_n(n)
    _check_q(q)
    _check_xi(xi)
    d = 2 ** (n // 2)
    delta = float(xi) / np.sqrt(float(q))
    f_a = np.eye(d, dtype=np.complex128)
    f_a[0, 0] = xi
    f_b = np.eye(d, dtype=np.complex128)
    f_b[0, 0] = delta
    return FilterPair(
        dim=d,
        xi=float(xi),
        delta=float(delta),
        f_a=_freeze(f_a),
        f_b=_freeze(f_b),
        superunit=bool(xi > np.sqrt(q)),
    )


def apply_filters(state: NoisyState, filters: FilterPair) -> FilteredState:
    """Conjugate the state by F_A (x) F_B and renormalize."""
    d = 2**state.m
    if filters.dim != d:
        raise ValueError(f"filter dim {filters.dim} does not match state register dim {d}")
    k = np.kron(np.diag(filters.f_a), np.diag(filters.f_b))
    scaled = state.rho * np.outer(k, k.conj())
    norm = float(np.trace(scaled).real)
    if norm <= _NORM_FLOOR:
        raise ValueError(f"filter wiped the state: norm {norm:.3e}")
    return FilteredState(rho=_freeze(scaled / norm), norm=norm)


def filtered_norm(n: int, q, xi):
    """Normalization constant of the filtered state, before dividing it out."""
    n = _check_n(n)
    _check_q(q)
    _check_xi(xi)
    m = n // 2
    q = np.asarray(q, dtype=np.float64)
    xi = np.asarray(xi, dtype=np.float64)
    val = (q + (1.0 - q) * xi**2) * (1.0 - 2.0**-m) + xi**4 / (q * 2**m)
    return float(val) if val.ndim == 0 else val


def filtered_state_closed_form(n: int, q: float, xi: float) -> FilteredState:
    """Assemble the filtered state directly from its closed-form entries.

    Independent route from apply_filters: the entangled block keeps weight q,
    the corner picks up xi**4/q worth of squeezed noise, and the block that
    couples the entangled vector to the corner carries sqrt(q)*(xi**2 - sqrt(q)).
    """
    n = _check_n(n)
    _check_q(q)
    _check_xi(xi)
    m = n // 2
    d = 2**m
    rho = np.zeros((d * d, d * d), dtype=np.complex128)
    diag_pairs = np.arange(d) * (d + 1)

    rho[np.ix_(diag_pairs, diag_pairs)] += q
    cross = np.sqrt(q) * (xi**2 - np.sqrt(q))
    rho[diag_pairs, 0] += cross
    rho[0, diag_pairs] += cross
    noise_slots = np.arange(1, d)
    rho[noise_slots, noise_slots] += (1.0 - q) * xi**2
    rho[0, 0] += (1.0 - q) * xi**4 / q + (xi**2 - np.sqrt(q)) ** 2

    norm = filtered_norm(n, q, xi)
    rho /= d * norm
    return FilteredState(rho=_freeze(rho), norm=float(norm))


def filter_gain_factor(state: NoisyState, filters: FilterPair) -> float:
    """Entanglement gain ratio of the filtering operation.

    Product of the filter determinant moduli over the success probability
    of the filtering (the same constant that normalizes the filtered state).
    """
    d = 2**state.m
    if filters.dim != d:
        raise ValueError(f"filter dim {filters.dim} does not match state register dim {d}")
    dets = abs(np.linalg.det(filters.f_a)) * abs(np.linalg.det(filters.f_b))
    weight = np.kron(filters.f_a @ filters.f_a.conj().T, filters.f_b @ filters.f_b.conj().T)
    denom = float(np.einsum("ij,ji->", weight, state.rho).real)
    if denom <= _NORM_FLOOR:
        raise ValueError(f"degenerate filtering: success weight {denom:.3e}")
    return float(dets / denom)
