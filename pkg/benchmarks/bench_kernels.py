"""Benchmark the two kernel paths against each other.

Times the Jacobi eigensolver and the correlator contraction in both builds:
the numba @njit one and the pure numpy fallback. Run it twice to see the
effect of the on-disk jit cache, or with PORACBELL_NO_NUMBA=1 to confirm the
fallback is what you would be living with.

Usage: python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from poracbell import _kernels
from poracbell.observables import alice_observables, bob_observables
from poracbell.states import apply_filters, make_filters, mixed_state

JACOBI_DIMS = (8, 16, 32, 64)
CORRELATOR_NS = (4, 6, 8)


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def hermitian(dim, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return np.ascontiguousarray((a + a.conj().T) / 2)


def correlator_inputs(n):
    state = apply_filters(mixed_state(n, 0.7), make_filters(n, 0.7, 0.5))
    bob = bob_observables(n)
    alice = alice_observables(n, bob)
    d = bob.dim
    rho4 = np.ascontiguousarray(state.rho.reshape(d, d, d, d))
    a_stack = np.ascontiguousarray(np.stack(alice.observables))
    b_stack = np.ascontiguousarray(np.stack(bob.observables))
    return rho4, a_stack, b_stack


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    paths = [("numpy", _kernels.jacobi_eigvalsh_numpy, _kernels.bell_correlators_numpy)]
    if _kernels.USE_NUMBA:
        paths.append(("numba", _kernels.jacobi_eigvalsh_numba, _kernels.bell_correlators_numba))
    else:
        print("numba path inactive (not installed or disabled), timing numpy only")

    print(f"{'kernel':<28}" + "".join(f"{name:>12}" for name, _, _ in paths))

    for dim in JACOBI_DIMS:
        h = hermitian(dim, dim)
        row = []
        reference = None
        for _, jacobi, _ in paths:
            eigs, _ = jacobi(h, 1e-12, 60)  # warmup doubles as correctness probe
            if reference is None:
                reference = eigs
            elif not np.allclose(eigs, reference, atol=1e-10):
                raise SystemExit(f"jacobi paths disagree at dim {dim}")
            row.append(best_of(lambda: jacobi(h, 1e-12, 60), args.repeats))
        print(f"{f'jacobi dim={dim}':<28}" + "".join(f"{t * 1e3:>10.3f}ms" for t in row))

    for n in CORRELATOR_NS:
        rho4, a_stack, b_stack = correlator_inputs(n)
        row = []
        reference = None
        for _, _, correlators in paths:
            out = correlators(rho4, a_stack, b_stack)
            if reference is None:
                reference = out
            elif not np.allclose(out, reference, atol=1e-10):
                raise SystemExit(f"correlator paths disagree at n {n}")
            row.append(best_of(lambda: correlators(rho4, a_stack, b_stack), args.repeats))
        print(f"{f'correlators n={n}':<28}" + "".join(f"{t * 1e3:>10.3f}ms" for t in row))


if __name__ == "__main__":
    main()
