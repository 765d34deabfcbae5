"""Bell functional values, bounds, and classification.

The functional pairs every Alice observable with every Bob observable,
signed by the input bit for Bob's position. Two independent evaluation
routes exist: a brute-force trace sum over all observable pairs, and the
closed form for the filtered noisy state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .observables import AliceSet, ObservableSet, alice_observables, bob_observables, input_sign_matrix
from .states import apply_filters, make_filters, mixed_state, filtered_norm, _check_n, _check_q, _check_xi

IMAG_TOL = 1e-10

NONLOCAL = "nonlocal"
CONTEXTUAL_ONLY = "contextual_only"
CLASSICAL = "classical"


def local_bound(n: int) -> int:
    """Largest functional value reachable with shared randomness alone."""
    n = _check_n(n)
    return n * math.comb(n - 1, (n - 1) // 2)


def pnc_bound(n: int) -> int:
    """Largest functional value for preparation-noncontextual models."""
    n = _check_n(n)
    return 2 ** (n - 1)


def optimal_value(n: int) -> float:
    """Quantum maximum of the functional."""
    n = _check_n(n)
    return 2 ** (n - 1) * math.sqrt(n)


def success_probability(bell_value: float, n: int) -> float:
    """Average single-bit guessing probability implied by a functional value."""
    n = _check_n(n)
    return 0.5 + bell_value / (2**n * n)


def classify(n: int, bell_value: float) -> str:
    """Strict classification; values equal to a bound do not violate it."""
    n = _check_n(n)
    if bell_value > local_bound(n):
        return NONLOCAL
    if bell_value > pnc_bound(n):
        return CONTEXTUAL_ONLY
    return CLASSICAL


@dataclass(frozen=True)
class BellReport:
    n: int
    quantum_value: float
    local_bound: int
    pnc_bound: int
    optimal_value: float
    success_probability: float
    classification: str

    def __post_init__(self):
        if not math.isfinite(self.quantum_value):
            raise ValueError(f"quantum value is not finite: {self.quantum_value!r}")
        if self.quantum_value > self.optimal_value + 1e-8:
            raise ValueError(
                f"quantum value {self.quantum_value} exceeds the quantum maximum "
                f"{self.optimal_value}"
            )
        if self.pnc_bound > self.local_bound:
            raise ValueError("noncontextual bound cannot exceed the local bound")


def build_report(n: int, quantum_value: float) -> BellReport:
    """Assemble bounds, classification, and success probability for a value."""
    n = _check_n(n)
    return BellReport(
        n=n,
        quantum_value=float(quantum_value),
        local_bound=local_bound(n),
        pnc_bound=pnc_bound(n),
        optimal_value=optimal_value(n),
        success_probability=success_probability(float(quantum_value), n),
        classification=classify(n, float(quantum_value)),
    )


def bell_value_brute(rho, alice: AliceSet, bob: ObservableSet) -> float:
    """Evaluate the functional term by term as signed expectation values.

    Every Tr[rho (A x B)] must be real within IMAG_TOL; a larger imaginary
    part means the inputs are inconsistent and raises.
    """
    mat = np.ascontiguousarray(np.asarray(getattr(rho, "rho", rho), dtype=np.complex128))
    d_a, d_b = alice.dim, bob.dim
    if mat.shape != (d_a * d_b, d_a * d_b):
        raise ValueError(
            f"state dim {mat.shape} does not match observables {(d_a * d_b, d_a * d_b)}"
        )
    trace = float(np.trace(mat).real)
    if abs(trace - 1.0) > 1e-8:
        raise ValueError(f"state trace must be 1, got {trace!r}")
    rho4 = mat.reshape(d_a, d_b, d_a, d_b)
    a_stack = np.ascontiguousarray(np.stack(alice.observables))
    b_stack = np.ascontiguousarray(np.stack(bob.observables))
    correlators = _kernels.bell_correlators(rho4, a_stack, b_stack)
    worst_imag = float(np.max(np.abs(correlators.imag)))
    if worst_imag > IMAG_TOL:
        raise ValueError(f"correlator has imaginary part {worst_imag:.3e} > {IMAG_TOL:g}")
    signs = input_sign_matrix(alice.inputs)
    return float(np.sum(signs * correlators.real))


def brute_force_value(n: int, q: float, xi: float | None = None) -> float:
    """Pipeline convenience: build everything and evaluate the brute-force route.

    With xi=None the unfiltered noisy state is evaluated.
    """
    n = _check_n(n)
    bob = bob_observables(n)
    alice = alice_observables(n, bob)
    state = mixed_state(n, q)
    if xi is None:
        return bell_value_brute(state, alice, bob)
    filtered = apply_filters(state, make_filters(n, q, xi))
    return bell_value_brute(filtered, alice, bob)


def bell_value_closed(n: int, q, xi):
    """Closed-form value of the functional on the filtered noisy state.

    Accepts scalar or array q and xi (broadcast together). Bob's filter
    strength is tied to xi/sqrt(q) throughout.
    """
    n = _check_n(n)
    _check_q(q)
    _check_xi(xi)
    q = np.asarray(q, dtype=np.float64)
    xi = np.asarray(xi, dtype=np.float64)
    m = n // 2
    norm = (q + (1.0 - q) * xi**2) * (1.0 - 2.0**-m) + xi**4 / (q * 2**m)
    q_xi_delta = xi**2 * np.sqrt(q)
    shared = q_xi_delta / 2 ** (m - 1) + q * (1.0 - 2.0 ** (1 - m))
    if n % 2 == 0:
        val = (2 ** (n - 1) * math.sqrt(n) / norm) * shared
    else:
        xi2_delta2 = xi**4 / q
        lead = (2 * m * 4**m / (norm * math.sqrt(n))) * shared
        tail = (4**m / (math.sqrt(n) * norm)) * (
            (xi2_delta2 - (1.0 - q) * xi**2) / 2**m + q * (1.0 - 2.0**-m)
        )
        val = lead + tail
    return float(val) if val.ndim == 0 else val


def unfiltered_value(n: int, q: float) -> float:
    """Functional value on the noisy state before filtering: q times the maximum."""
    n = _check_n(n)
    _check_q(q)
    return optimal_value(n) * float(q)


__all__ = [
    "IMAG_TOL",
    "NONLOCAL",
    "CONTEXTUAL_ONLY",
    "CLASSICAL",
    "BellReport",
    "bell_value_brute",
    "bell_value_closed",
    "brute_force_value",
    "build_report",
    "classify",
    "local_bound",
    "optimal_value",
    "pnc_bound",
    "success_probability",
    "unfiltered_value",
    "filtered_norm",
]
