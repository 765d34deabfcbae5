"""Measurement families for the n-bit parity-oblivious random access game.

Bob holds n mutually anti-commuting involutions built recursively from the
Pauli matrices; Alice holds one observable per input pair, assembled from the
entrywise conjugates of Bob's operators so that expectation values against
the shared maximally entangled state come out right.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
for _p in (PAULI_X, PAULI_Y, PAULI_Z):
    _p.setflags(write=False)


@dataclass(frozen=True)
class ObservableSet:
    """Bob's n anti-commuting observables, each of dimension 2**(n//2)."""

    n: int
    dim: int
    observables: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class AliceSet:
    """Alice's observables, one per enumerated input string."""

    n: int
    dim: int
    inputs: tuple[str, ...]
    observables: tuple[np.ndarray, ...]


def _freeze(m: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(m)
    out.setflags(write=False)
    return out


def _check_n(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValueError(f"n must be an integer, got {n!r}")
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    return int(n)


def enumerate_inputs(n: int) -> tuple[str, ...]:
    """The 2**(n-1) input strings: first bit 0, remaining bits in counting order."""
    n = _check_n(n)
    return tuple("0" + format(i, f"0{n - 1}b") for i in range(2 ** (n - 1)))


def bob_observables(n: int) -> ObservableSet:
    """Build Bob's anti-commuting family by the two-step Pauli recursion."""
    n = _check_n(n)
    if n == 2:
        obs = [PAULI_X.copy(), PAULI_Y.copy()]
    elif n == 3:
        obs = [PAULI_X.copy(), PAULI_Y.copy(), PAULI_Z.copy()]
    elif n % 2 == 0:
        prev = bob_observables(n - 1).observables
        eye = np.eye(prev[0].shape[0], dtype=np.complex128)
        obs = [np.kron(PAULI_X, b) for b in prev] + [np.kron(PAULI_Y, eye)]
    else:
        prev = bob_observables(n - 2).observables
        eye = np.eye(prev[0].shape[0], dtype=np.complex128)
        obs = [np.kron(PAULI_X, b) for b in prev] + [
            np.kron(PAULI_Y, eye),
            np.kron(PAULI_Z, eye),
        ]
    dim = obs[0].shape[0]
    return ObservableSet(n=n, dim=dim, observables=tuple(_freeze(o) for o in obs))


def input_sign_matrix(inputs: tuple[str, ...]) -> np.ndarray:
    """Matrix of (-1)**bit signs, one row per input string, one column per position."""
    bits = np.array([[int(c) for c in s] for s in inputs], dtype=np.int64)
    return (1 - 2 * bits).astype(np.float64)


def alice_observables(n: int, bob: ObservableSet | None = None) -> AliceSet:
    """Alice's observable for each input: signed sum of conjugated Bob operators over sqrt(n)."""
    n = _check_n(n)
    if bob is None:
        bob = bob_observables(n)
    if bob.n != n:
        raise ValueError(f"observable set is for n={bob.n}, requested n={n}")
    inputs = enumerate_inputs(n)
    signs = input_sign_matrix(inputs)
    conj_stack = np.stack([np.conj(b) for b in bob.observables])
    stack = np.einsum("iy,yab->iab", signs, conj_stack) / np.sqrt(n)
    return AliceSet(
        n=n,
        dim=bob.dim,
        inputs=inputs,
        observables=tuple(_freeze(stack[i]) for i in range(stack.shape[0])),
    )


def _observable_list(obs) -> list[np.ndarray]:
    if isinstance(obs, (ObservableSet, AliceSet)):
        return [np.asarray(o, dtype=np.complex128) for o in obs.observables]
    return [np.asarray(o, dtype=np.complex128) for o in obs]


def check_anticommuting(obs, tol: float = 1e-12) -> tuple[bool, float]:
    """True when every distinct pair anti-commutes; also returns the worst defect."""
    mats = _observable_list(obs)
    worst = 0.0
    for a in range(len(mats) - 1):
        for b in range(a + 1, len(mats)):
            anti = mats[a] @ mats[b] + mats[b] @ mats[a]
            worst = max(worst, float(np.max(np.abs(anti))))
    return worst <= tol, worst


def observable_defects(obs) -> dict[str, float]:
    """Max deviation from the structural contract: anti-commuting Hermitian traceless involutions."""
    mats = _observable_list(obs)
    eye = np.eye(mats[0].shape[0])
    _, anti = check_anticommuting(obs, tol=0.0)
    return {
        "anticommutator": anti,
        "involution": max(float(np.max(np.abs(m @ m - eye))) for m in mats),
        "hermiticity": max(float(np.max(np.abs(m - m.conj().T))) for m in mats),
        "trace": max(abs(complex(np.trace(m))) for m in mats),
    }


def signed_input_sums(alice: AliceSet) -> np.ndarray:
    """For each bit position y, the sum of Alice observables signed by (-1)**x_y.

    Stacks the n resulting operators; each should equal
    ``2**(n-1)/sqrt(n)`` times the conjugated Bob observable for that position.
    """
    signs = input_sign_matrix(alice.inputs)
    stack = np.stack(alice.observables)
    return np.einsum("iy,iab->yab", signs, stack)


def check_parity_oblivious(alice: AliceSet, tol: float = 1e-10) -> tuple[bool, str, float]:
    """Verify no parity of the input string leaks from Alice's marginal statistics.

    For every parity string s of weight two or more, the steered preparations
    must satisfy a zero operator sum once both outcomes of each measurement
    are counted: summing (-1)**(s.x) A(x) over all 2**n input strings, where
    the complement of an enumerated input carries the negated observable.
    Returns (passed, worst parity string, worst violation).
    """
    n = alice.n
    total = 2**n
    xs = np.arange(total)
    msb = (xs >> (n - 1)) & 1
    comp = (~xs) & (total - 1)
    idx = np.where(msb == 0, xs, comp)
    outcome_sign = np.where(msb == 0, 1.0, -1.0)

    bit_cols = np.arange(n - 1, -1, -1)
    x_bits = ((xs[:, None] >> bit_cols[None, :]) & 1).astype(np.int64)
    weights = x_bits.sum(axis=1)
    parity_strings = xs[weights >= 2]
    s_bits = x_bits[parity_strings]

    parity = (s_bits @ x_bits.T) % 2
    coef = (1 - 2 * parity) * outcome_sign[None, :]

    flat = np.stack([np.asarray(o).reshape(-1) for o in alice.observables])
    gathered = flat[idx]
    sums = coef @ np.ascontiguousarray(gathered.real) + 1j * (
        coef @ np.ascontiguousarray(gathered.imag)
    )
    per_string = np.abs(sums).max(axis=1)
    worst_at = int(np.argmax(per_string))
    worst = float(per_string[worst_at])
    worst_string = format(int(parity_strings[worst_at]), f"0{n}b")
    return worst <= tol, worst_string, worst
