"""Local single-qubit unitary layer and the global spin-flip symmetry"""

import math

import numpy as np

from ..engine import StateVector
from ..engine.kernels import apply_single_qubit, flip_overlap
from .spec import LocalUnitaryParams


def rz_matrix(phi: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * phi), 0.0], [0.0, np.exp(0.5j * phi)]], dtype=np.complex128
    )


def rx_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(0.5 * theta), math.sin(0.5 * theta)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def ry_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(0.5 * theta), math.sin(0.5 * theta)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def site_unitary(alpha: float, theta: float, beta: float) -> np.ndarray:
    """R_z(alpha) R_x(theta) R_z(beta)"""
    return rz_matrix(alpha) @ rx_matrix(theta) @ rz_matrix(beta)


def apply_site_matrix(amplitudes: np.ndarray, size: int, site: int, u: np.ndarray) -> np.ndarray:
    """In place; site i lives at bit L-1-i"""
    return apply_single_qubit(
        amplitudes, size - 1 - site, u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    )


def apply_lu(psi: StateVector, params: LocalUnitaryParams) -> StateVector:
    amplitudes = psi.amplitudes.copy()
    for site, triple in enumerate(params.site_triples(psi.size)):
        apply_site_matrix(amplitudes, psi.size, site, site_unitary(*triple))
    return StateVector(amplitudes, normalized=False)


def apply_uniform(psi: StateVector, u: np.ndarray) -> StateVector:
    amplitudes = psi.amplitudes.copy()
    for site in range(psi.size):
        apply_site_matrix(amplitudes, psi.size, site, u)
    return StateVector(amplitudes, normalized=False)


def symmetry_expectation(psi: StateVector) -> float:
    """<psi| prod_i (-X_i) |psi>"""
    full = (1 << psi.size) - 1
    value = flip_overlap(psi.amplitudes, full)
    return float(((-1) ** psi.size) * value.real)
