"""Hot contraction kernels on raw 4x4 complex matrices (two-qubit factors).

All operators here live on the four-party space ordered (A0, A, B, B0) with
qubit factors. A 4x4 matrix M on a two-party block uses row-major composite
indices, M[(i, j), (k, l)] = M4[i, j, k, l] after reshape(2, 2, 2, 2).

The contraction realized by every kernel is the partial-trace sandwich

    eff(rho; mA, mB) = Tr_AB[(I_A0 x rho_AB x I_B0)(mA_A0A x mB_BB0)]

written out in indices as

    eff[(x,w),(y,z)] = sum_{a,b,p,q} rho[(a,b),(p,q)] mA[(x,p),(y,a)] mB[(q,w),(b,z)]

The three update kernels return the Hermitian operators G, FA, FB with
Tr[G rho] = Tr[FA mA] = Tr[FB mB] = Tr[W eff(rho; mA, mB)], used by the
coordinate-ascent optimizer.

Two interchangeable implementations are provided: einsum (numpy) and
explicit loops (numba, roughly 10x faster per call at this size). Selection
follows backend.resolve_backend; get_kernels("numpy"/"numba") returns a
specific table for cross-checks and benchmarks.
"""

from __future__ import annotations

from typing import Callable, Dict

import numpy as np

from .backend import resolve_backend

KernelTable = Dict[str, Callable]


def _r4(m: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(m, dtype=np.complex128).reshape(2, 2, 2, 2)


def effective_element_numpy(rho: np.ndarray, ma: np.ndarray, mb: np.ndarray) -> np.ndarray:
    out = np.einsum("abpq,xpya,qwbz->xwyz", _r4(rho), _r4(ma), _r4(mb))
    return out.reshape(4, 4)


def state_update_numpy(w: np.ndarray, ma: np.ndarray, mb: np.ndarray) -> np.ndarray:
    out = np.einsum("xwyz,ypxa,qzbw->pqab", _r4(w), _r4(ma), _r4(mb))
    return out.reshape(4, 4)


def meas_a_update_numpy(w: np.ndarray, rho: np.ndarray, mb: np.ndarray) -> np.ndarray:
    out = np.einsum("xwyz,abpq,qzbw->xayp", _r4(w), _r4(rho), _r4(mb))
    return out.reshape(4, 4)


def meas_b_update_numpy(w: np.ndarray, rho: np.ndarray, ma: np.ndarray) -> np.ndarray:
    out = np.einsum("xwyz,abpq,ypxa->bwqz", _r4(w), _r4(rho), _r4(ma))
    return out.reshape(4, 4)


_NUMPY_TABLE: KernelTable = {
    "effective_element": effective_element_numpy,
    "state_update": state_update_numpy,
    "meas_a_update": meas_a_update_numpy,
    "meas_b_update": meas_b_update_numpy,
}

_NUMBA_TABLE: KernelTable = {}


def _build_numba_table() -> KernelTable:
    from numba import njit

    @njit(cache=True)
    def effective_element_numba(rho, ma, mb):  # pragma: no cover - jitted
        out = np.zeros((4, 4), dtype=np.complex128)
        for x in range(2):
            for w in range(2):
                for y in range(2):
                    for z in range(2):
                        acc = 0.0 + 0.0j
                        for a in range(2):
                            for b in range(2):
                                for p in range(2):
                                    for q in range(2):
                                        acc += (
                                            rho[a * 2 + b, p * 2 + q]
                                            * ma[x * 2 + p, y * 2 + a]
                                            * mb[q * 2 + w, b * 2 + z]
                                        )
                        out[x * 2 + w, y * 2 + z] = acc
        return out

    @njit(cache=True)
    def state_update_numba(w_op, ma, mb):  # pragma: no cover - jitted
        out = np.zeros((4, 4), dtype=np.complex128)
        for p in range(2):
            for q in range(2):
                for a in range(2):
                    for b in range(2):
                        acc = 0.0 + 0.0j
                        for x in range(2):
                            for w in range(2):
                                for y in range(2):
                                    for z in range(2):
                                        acc += (
                                            w_op[x * 2 + w, y * 2 + z]
                                            * ma[y * 2 + p, x * 2 + a]
                                            * mb[q * 2 + z, b * 2 + w]
                                        )
                        out[p * 2 + q, a * 2 + b] = acc
        return out

    @njit(cache=True)
    def meas_a_update_numba(w_op, rho, mb):  # pragma: no cover - jitted
        out = np.zeros((4, 4), dtype=np.complex128)
        for x in range(2):
            for a in range(2):
                for y in range(2):
                    for p in range(2):
                        acc = 0.0 + 0.0j
                        for w in range(2):
                            for z in range(2):
                                for b in range(2):
                                    for q in range(2):
                                        acc += (
                                            w_op[x * 2 + w, y * 2 + z]
                                            * rho[a * 2 + b, p * 2 + q]
                                            * mb[q * 2 + z, b * 2 + w]
                                        )
                        out[x * 2 + a, y * 2 + p] = acc
        return out

    @njit(cache=True)
    def meas_b_update_numba(w_op, rho, ma):  # pragma: no cover - jitted
        out = np.zeros((4, 4), dtype=np.complex128)
        for b in range(2):
            for w in range(2):
                for q in range(2):
                    for z in range(2):
                        acc = 0.0 + 0.0j
                        for x in range(2):
                            for y in range(2):
                                for a in range(2):
                                    for p in range(2):
                                        acc += (
                                            w_op[x * 2 + w, y * 2 + z]
                                            * rho[a * 2 + b, p * 2 + q]
                                            * ma[y * 2 + p, x * 2 + a]
                                        )
                        out[b * 2 + w, q * 2 + z] = acc
        return out

    def _c(m):
        return np.ascontiguousarray(m, dtype=np.complex128)

    return {
        "effective_element": lambda rho, ma, mb: effective_element_numba(_c(rho), _c(ma), _c(mb)),
        "state_update": lambda w, ma, mb: state_update_numba(_c(w), _c(ma), _c(mb)),
        "meas_a_update": lambda w, rho, mb: meas_a_update_numba(_c(w), _c(rho), _c(mb)),
        "meas_b_update": lambda w, rho, ma: meas_b_update_numba(_c(w), _c(rho), _c(ma)),
    }


def get_kernels(name: str | None = None) -> KernelTable:
    """Kernel table for a backend name ('numpy', 'numba', 'auto' or None)."""
    concrete = resolve_backend(name)
    if concrete == "numpy":
        return _NUMPY_TABLE
    if not _NUMBA_TABLE:
        _NUMBA_TABLE.update(_build_numba_table())
    return _NUMBA_TABLE


_ACTIVE = get_kernels()

effective_element_kernel = _ACTIVE["effective_element"]
state_update_kernel = _ACTIVE["state_update"]
meas_a_update_kernel = _ACTIVE["meas_a_update"]
meas_b_update_kernel = _ACTIVE["meas_b_update"]

ACTIVE_BACKEND = resolve_backend()
