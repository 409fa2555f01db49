"""Numba kernels over 2^L amplitude arrays.

Each kernel is compiled twice: a serial nogil build that sweep worker threads
may call concurrently, and a prange build over amplitude blocks that is only
launched from the main thread on large states.
"""

import threading

import numba as nb
import numpy as np

PARALLEL_MIN_DIM = 1 << 12


@nb.njit(cache=True, nogil=True)
def _parity(v):
    p = 0
    while v:
        p ^= 1
        v &= v - 1
    return p


def _accumulate_string(psi, out, x, z, factor):
    # j -> j ^ x is a bijection, so no two iterations write the same slot
    for j in nb.prange(psi.shape[0]):
        sign = 1.0 - 2.0 * _parity(j & z)
        out[j ^ x] += factor * sign * psi[j]
    return out


def _apply_single_qubit(psi, bit, u00, u01, u10, u11):
    stride = 1 << bit
    half = psi.shape[0] >> 1
    for k in nb.prange(half):
        low = k & (stride - 1)
        i0 = ((k >> bit) << (bit + 1)) | low
        i1 = i0 | stride
        a0 = psi[i0]
        a1 = psi[i1]
        psi[i0] = u00 * a0 + u01 * a1
        psi[i1] = u10 * a0 + u11 * a1
    return psi


def _apply_zz_phase(psi, mask, even_phase, odd_phase):
    for j in nb.prange(psi.shape[0]):
        if _parity(j & mask):
            psi[j] *= odd_phase
        else:
            psi[j] *= even_phase
    return psi


def _flip_overlap(psi, mask):
    real = 0.0
    imag = 0.0
    for j in nb.prange(psi.shape[0]):
        term = np.conj(psi[j]) * psi[j ^ mask]
        real += term.real
        imag += term.imag
    return real + 1j * imag


def _compile(func):
    return (
        nb.njit(cache=True, nogil=True)(func),
        nb.njit(parallel=True)(func),
    )


_ACCUMULATE = _compile(_accumulate_string)
_SINGLE_QUBIT = _compile(_apply_single_qubit)
_ZZ_PHASE = _compile(_apply_zz_phase)
_FLIP_OVERLAP = _compile(_flip_overlap)


def use_parallel(dim: int) -> bool:
    """Large state on the main thread; worker threads always get the serial build"""
    return dim >= PARALLEL_MIN_DIM and threading.current_thread() is threading.main_thread()


def _pick(builds, dim: int):
    return builds[1] if use_parallel(dim) else builds[0]


def accumulate_string(psi, out, x, z, factor):
    """out[j ^ x] += factor * (-1)^{|z & j|} * psi[j]"""
    return _pick(_ACCUMULATE, psi.shape[0])(psi, out, x, z, factor)


def apply_single_qubit(psi, bit, u00, u01, u10, u11):
    """In-place 2x2 unitary on the qubit stored at ``bit``"""
    return _pick(_SINGLE_QUBIT, psi.shape[0])(psi, bit, u00, u01, u10, u11)


def apply_zz_phase(psi, mask, even_phase, odd_phase):
    """Diagonal two-qubit ZZ rotation: the phase depends on the parity of the two bits"""
    return _pick(_ZZ_PHASE, psi.shape[0])(psi, mask, even_phase, odd_phase)


def flip_overlap(psi, mask):
    """sum_j conj(psi[j]) psi[j ^ mask]"""
    return _pick(_FLIP_OVERLAP, psi.shape[0])(psi, mask)
