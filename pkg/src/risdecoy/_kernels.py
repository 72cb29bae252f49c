"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The backend is chosen at import time: numba is used when importable unless the
environment variable ``RISDECOY_DISABLE_NUMBA`` is set to a non-empty value.
Both paths implement identical math; ``benchmarks/bench_kernels.py`` compares
them.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

_DISABLED = bool(os.environ.get("RISDECOY_DISABLE_NUMBA", ""))

# the default TBB probe warns on older system TBBs; omp is always bundled
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

if not _DISABLED:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            from numba import njit, prange
        _HAVE_NUMBA = True
    except ImportError:
        _HAVE_NUMBA = False
else:
    _HAVE_NUMBA = False

BACKEND = "numba" if _HAVE_NUMBA else "numpy"


def _pocs_loop_numpy(w, U, Vh, gamma, imax, eps_null):
    def unit_phase(z):
        out = np.ones_like(z)
        nz = np.abs(z) > 0.0
        out[nz] = z[nz] / np.abs(z[nz])
        return out

    Uh = U.conj().T
    x = unit_phase(w)
    res = float(np.linalg.norm(Vh @ x) ** 2)
    if res <= eps_null:
        e = np.empty(0)
        return x, 0, res, e, e, e, True
    res_proj = np.empty(imax)
    res_iter = np.empty(imax)
    gain_tr = np.empty(imax)
    it = 0
    conv = False
    for t in range(imax):
        u = (1.0 - gamma) * x + gamma * w
        u = unit_phase(u)
        u = u - U @ (Uh @ u)
        res_proj[t] = np.linalg.norm(Vh @ u) ** 2
        x = unit_phase(u)
        res = float(np.linalg.norm(Vh @ x) ** 2)
        res_iter[t] = res
        gain_tr[t] = abs(np.vdot(w, x))
        it = t + 1
        if res <= eps_null:
            conv = True
            break
    return x, it, res, res_proj[:it], res_iter[:it], gain_tr[:it], conv


def _spectrum_numpy(R_stack, A):
    S = np.abs(np.einsum("ng,tnm,mg->tg", A.conj(), R_stack, A, optimize=True)) ** 2
    return S


def _spectrum_argmax_numpy(R_stack, A, chunk=64):
    nt = R_stack.shape[0]
    idx = np.empty(nt, np.int64)
    peak = np.empty(nt)
    for c in range(0, nt, chunk):
        S = _spectrum_numpy(R_stack[c:c + chunk], A)
        idx[c:c + chunk] = S.argmax(axis=1)
        peak[c:c + chunk] = S.max(axis=1)
    return idx, peak


if _HAVE_NUMBA:

    @njit(cache=True)
    def _pocs_loop_nb(w, U, Vh, gamma, imax, eps_null):  # pragma: no cover - jitted
        M = w.shape[0]
        K = Vh.shape[0]
        Uh = np.conj(U.T)
        x = np.empty(M, np.complex128)
        for m in range(M):
            a = np.abs(w[m])
            x[m] = w[m] / a if a > 0.0 else 1.0 + 0.0j
        res = 0.0
        for k in range(K):
            acc = 0.0 + 0.0j
            for m in range(M):
                acc += Vh[k, m] * x[m]
            res += np.abs(acc) ** 2
        if res <= eps_null:
            e = np.empty(0)
            return x, 0, res, e, e, e, True
        res_proj = np.empty(imax)
        res_iter = np.empty(imax)
        gain_tr = np.empty(imax)
        it = 0
        conv = False
        for t in range(imax):
            u = (1.0 - gamma) * x + gamma * w
            for m in range(M):
                a = np.abs(u[m])
                u[m] = u[m] / a if a > 0.0 else 1.0 + 0.0j
            u = u - U @ (Uh @ u)
            rp = 0.0
            for k in range(K):
                acc = 0.0 + 0.0j
                for m in range(M):
                    acc += Vh[k, m] * u[m]
                rp += np.abs(acc) ** 2
            res_proj[t] = rp
            for m in range(M):
                a = np.abs(u[m])
                u[m] = u[m] / a if a > 0.0 else 1.0 + 0.0j
            x = u
            r = 0.0
            for k in range(K):
                acc = 0.0 + 0.0j
                for m in range(M):
                    acc += Vh[k, m] * x[m]
                r += np.abs(acc) ** 2
            res_iter[t] = r
            g = 0.0 + 0.0j
            for m in range(M):
                g += np.conj(w[m]) * x[m]
            gain_tr[t] = np.abs(g)
            it = t + 1
            res = r
            if r <= eps_null:
                conv = True
                break
        return x, it, res, res_proj[:it], res_iter[:it], gain_tr[:it], conv

    @njit(cache=True, parallel=True)
    def _spectrum_nb(R_stack, A):  # pragma: no cover - jitted
        nt = R_stack.shape[0]
        N = A.shape[0]
        G = A.shape[1]
        S = np.empty((nt, G))
        for t in prange(nt):
            for g in range(G):
                acc = 0.0 + 0.0j
                for n in range(N):
                    rn = 0.0 + 0.0j
                    for m in range(N):
                        rn += R_stack[t, n, m] * A[m, g]
                    acc += np.conj(A[n, g]) * rn
                S[t, g] = np.abs(acc) ** 2
        return S

    @njit(cache=True, parallel=True)
    def _spectrum_argmax_nb(R_stack, A):  # pragma: no cover - jitted
        nt = R_stack.shape[0]
        N = A.shape[0]
        G = A.shape[1]
        idx = np.empty(nt, np.int64)
        peak = np.empty(nt)
        for t in prange(nt):
            best = -1.0
            bi = 0
            for g in range(G):
                acc = 0.0 + 0.0j
                for n in range(N):
                    rn = 0.0 + 0.0j
                    for m in range(N):
                        rn += R_stack[t, n, m] * A[m, g]
                    acc += np.conj(A[n, g]) * rn
                v = np.abs(acc) ** 2
                if v > best:
                    best = v
                    bi = g
            idx[t] = bi
            peak[t] = best
        return idx, peak


def pocs_loop(w, U, Vh, gamma, imax, eps_null):
    """Run the relaxed alternating-projection loop.

    Parameters
    ----------
    w : (M,) complex decoy kernel vector.
    U : (M, K) orthonormal basis of the nulling span.
    Vh : (K, M) conjugate-transposed nulling kernels (physical residual rows).
    gamma : relaxation factor in (0, 1).
    imax : maximum iterations.
    eps_null : stop once ``||Vh x||^2 <= eps_null``.

    Returns
    -------
    x, iterations, residual, trace_after_projection, trace_residual,
    trace_gain, converged
    """
    w = np.ascontiguousarray(w, np.complex128)
    U = np.ascontiguousarray(U, np.complex128)
    Vh = np.ascontiguousarray(Vh, np.complex128)
    if _HAVE_NUMBA:
        return _pocs_loop_nb(w, U, Vh, float(gamma), int(imax), float(eps_null))
    return _pocs_loop_numpy(w, U, Vh, float(gamma), int(imax), float(eps_null))


def spectrum_batch(R_stack, A):
    """Quadratic-form spectrum |a^H R a|^2 for a stack of covariances."""
    R_stack = np.ascontiguousarray(R_stack, np.complex128)
    A = np.ascontiguousarray(A, np.complex128)
    if _HAVE_NUMBA:
        return _spectrum_nb(R_stack, A)
    return _spectrum_numpy(R_stack, A)


def spectrum_argmax_batch(R_stack, A):
    """Per-covariance argmax index and peak of the spectrum (low memory)."""
    R_stack = np.ascontiguousarray(R_stack, np.complex128)
    A = np.ascontiguousarray(A, np.complex128)
    if _HAVE_NUMBA:
        return _spectrum_argmax_nb(R_stack, A)
    return _spectrum_argmax_numpy(R_stack, A)
