"""Hot numeric kernels: cyclic Jacobi eigensolver and Bell correlator contraction.

Each kernel exists twice: a numba ``@njit`` build and a pure-numpy fallback.
The active path is chosen at import time. Setting the environment variable
``PORACBELL_NO_NUMBA=1`` (or any value other than ``0``/empty) forces the
numpy path even when numba is installed; a missing numba falls back silently.
``benchmarks/bench_kernels.py`` times both paths side by side.
"""

from __future__ import annotations

import math
import os

import numpy as np


def _want_numba() -> bool:
    flag = os.environ.get("PORACBELL_NO_NUMBA", "")
    if flag.strip() not in ("", "0"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _jacobi_eigvalsh_impl(a, tol, max_sweeps):
    # Cyclic-by-row Jacobi for a Hermitian matrix. Each pivot (p, q) is
    # annihilated by a unitary plane rotation: the pivot's phase is stripped
    # first so the remaining 2x2 problem is real symmetric. Written against
    # the numpy subset numba supports so the same source compiles both ways.
    h = a.copy()
    d = h.shape[0]
    sweeps = 0
    while sweeps < max_sweeps:
        off = 0.0
        for p in range(d - 1):
            for q in range(p + 1, d):
                mag = abs(h[p, q])
                if mag > off:
                    off = mag
        if off <= tol:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                r = abs(h[p, q])
                if r < 1e-300:
                    continue
                phase = h[p, q] / r
                theta = 0.5 * math.atan2(2.0 * r, h[p, p].real - h[q, q].real)
                c = math.cos(theta)
                s = math.sin(theta)
                colp = h[:, p].copy()
                colq = h[:, q].copy()
                h[:, p] = c * colp + s * np.conj(phase) * colq
                h[:, q] = -s * colp + c * np.conj(phase) * colq
                rowp = h[p, :].copy()
                rowq = h[q, :].copy()
                h[p, :] = c * rowp + s * phase * rowq
                h[q, :] = -s * rowp + c * phase * rowq
        sweeps += 1
    residual = 0.0
    for p in range(d - 1):
        for q in range(p + 1, d):
            mag = abs(h[p, q])
            if mag > residual:
                residual = mag
    diag = np.empty(d, dtype=np.float64)
    for k in range(d):
        diag[k] = h[k, k].real
    return np.sort(diag), residual


def _bell_correlators_numpy(rho4, alice, bob):
    # correlators[i, y] = Tr[rho (A_i x B_y)] with rho reshaped to
    # (dA, dB, dA, dB); contracting Alice first keeps the cost at
    # O(nA * dA^2 * dB^2) instead of forming any Kronecker product.
    partial = np.einsum("abcd,ica->ibd", rho4, alice)
    return np.einsum("ibd,ydb->iy", partial, bob)


def _bell_correlators_impl(rho4, alice, bob):
    n_a = alice.shape[0]
    d_a = alice.shape[1]
    n_b = bob.shape[0]
    d_b = bob.shape[1]
    out = np.empty((n_a, n_b), dtype=np.complex128)
    tmp = np.empty((d_b, d_b), dtype=np.complex128)
    for i in range(n_a):
        for b in range(d_b):
            for dd in range(d_b):
                acc = 0.0 + 0.0j
                for a in range(d_a):
                    for c in range(d_a):
                        acc += rho4[a, b, c, dd] * alice[i, c, a]
                tmp[b, dd] = acc
        for y in range(n_b):
            accy = 0.0 + 0.0j
            for b in range(d_b):
                for dd in range(d_b):
                    accy += tmp[b, dd] * bob[y, dd, b]
            out[i, y] = accy
    return out


jacobi_eigvalsh_numpy = _jacobi_eigvalsh_impl
bell_correlators_numpy = _bell_correlators_numpy

USE_NUMBA = _want_numba()

if USE_NUMBA:
    from numba import njit

    jacobi_eigvalsh_numba = njit(cache=True)(_jacobi_eigvalsh_impl)
    bell_correlators_numba = njit(cache=True)(_bell_correlators_impl)
    jacobi_eigvalsh = jacobi_eigvalsh_numba
    bell_correlators = bell_correlators_numba
else:
    jacobi_eigvalsh_numba = None
    bell_correlators_numba = None
    jacobi_eigvalsh = jacobi_eigvalsh_numpy
    bell_correlators = bell_correlators_numpy
