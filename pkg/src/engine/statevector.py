"""State vectors, matrix-free Pauli-sum application, fidelities and expectation values"""

import logging
from typing import Optional, Sequence

import numpy as np

from ..algebra import PauliSum
from ..utils.errors import UsageError
from .kernels import accumulate_string

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-9

_Y_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


class StateVector:
    """
    2^L complex amplitudes in the computational basis. Index bit L-1-i holds site i,
    so ``from_bitstring("1010")`` sets site 0 to 1.
    """

    __slots__ = ("size", "amplitudes")

    def __init__(self, amplitudes: np.ndarray, size: Optional[int] = None, normalized: bool = True):
        amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128).reshape(-1)
        dim = amplitudes.shape[0]
        inferred = dim.bit_length() - 1
        if dim < 2 or (1 << inferred) != dim:
            raise UsageError(f"Amplitude count {dim} is not a power of two >= 2")
        if size is not None and size != inferred:
            raise UsageError(f"Size {size} does not match {dim} amplitudes")
        if normalized:
            drift = abs(np.linalg.norm(amplitudes) - 1.0)
            if drift > NORM_TOLERANCE:
                raise UsageError(f"State is not normalized (norm drift {drift:.3e})")
        self.size = inferred
        self.amplitudes = amplitudes

    @classmethod
    def basis_state(cls, size: int, index: int) -> "StateVector":
        dim = 1 << size
        if not 0 <= index < dim:
            raise UsageError(f"Basis index {index} outside [0, {dim})")
        amplitudes = np.zeros(dim, dtype=np.complex128)
        amplitudes[index] = 1.0
        return cls(amplitudes)

    @classmethod
    def from_bitstring(cls, bits: str) -> "StateVector":
        if not bits or set(bits) - {"0", "1"}:
            raise UsageError(f"Invalid bitstring {bits!r}")
        return cls.basis_state(len(bits), int(bits, 2))

    @classmethod
    def superposition(cls, bitstrings: Sequence[str], weights: Optional[Sequence[complex]] = None) -> "StateVector":
        size = len(bitstrings[0])
        amplitudes = np.zeros(1 << size, dtype=np.complex128)
        weights = weights if weights is not None else [1.0] * len(bitstrings)
        for bits, w in zip(bitstrings, weights):
            amplitudes[int(bits, 2)] += w
        return cls(amplitudes / np.linalg.norm(amplitudes))

    @classmethod
    def product(cls, single_site: Sequence[Sequence[complex]]) -> "StateVector":
        """Tensor product of one 2-vector per site, site 0 first"""
        amplitudes = np.ones(1, dtype=np.complex128)
        for vec in single_site:
            amplitudes = np.kron(amplitudes, np.asarray(vec, dtype=np.complex128))
        return cls(amplitudes / np.linalg.norm(amplitudes))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        norm = self.norm()
        if norm == 0.0:
            raise UsageError("Cannot normalize the zero vector")
        return StateVector(self.amplitudes / norm)

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), normalized=False)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __repr__(self) -> str:
        return f"StateVector(L={self.size}, norm={self.norm():.12f})"


def _check_sizes(a: int, b: int):
    if a != b:
        raise UsageError(f"Size mismatch: {a} vs {b}")


def apply(H: PauliSum, psi: StateVector) -> StateVector:
    """H psi computed string by string with bitmask index maps (not normalized)"""
    _check_sizes(H.size, psi.size)
    out = np.zeros_like(psi.amplitudes)
    for string, coef in H.items():
        factor = coef * _Y_PHASES[string.y_count % 4]
        accumulate_string(psi.amplitudes, out, string.x, string.z, factor)
    return StateVector(out, normalized=False)


def overlap(psi: StateVector, phi: StateVector) -> complex:
    _check_sizes(psi.size, phi.size)
    return complex(np.vdot(psi.amplitudes, phi.amplitudes))


def fidelity(psi: StateVector, phi: StateVector) -> float:
    """|<psi|phi>|^2, clipped to [0, 1]"""
    value = abs(overlap(psi, phi)) ** 2
    return float(min(max(value, 0.0), 1.0))


def subspace_weight(psi: StateVector, basis: np.ndarray) -> float:
    """
    Projection weight of psi onto the span of orthonormal columns of ``basis``.
    Reduces to ``fidelity`` for a single column.
    """
    if basis.shape[0] != psi.dim:
        raise UsageError(f"Basis has {basis.shape[0]} rows, state has {psi.dim} amplitudes")
    coefficients = basis.conj().T @ psi.amplitudes
    value = float(np.sum(np.abs(coefficients) ** 2))
    return min(max(value, 0.0), 1.0)


def expectation(H: PauliSum, psi: StateVector, imag_tol: float = 1e-10) -> float:
    """<psi|H|psi> for self-adjoint H"""
    if not H.is_self_adjoint():
        raise UsageError("Expectation requires a self-adjoint operator")
    value = complex(np.vdot(psi.amplitudes, apply(H, psi).amplitudes))
    if abs(value.imag) > imag_tol * max(1.0, abs(value.real)):
        logger.warning(f"Expectation has imaginary residue {value.imag:.3e}")
    return value.real
