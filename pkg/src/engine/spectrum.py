"""Ground states and low-lying spectra: dense below the crossover, Lanczos above"""

import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Optional

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from ..algebra import DEFAULT_DENSE_LIMIT, PauliSum, to_dense
from ..utils.errors import ConvergenceError, RangeError, UsageError
from .statevector import StateVector

logger = logging.getLogger(__name__)

DEGENERACY_TOL = 1e-9
RESIDUAL_TOL = 1e-8
LANCZOS_MAX_ITER = 20000


@dataclass
class SpectrumResult:
    """k lowest eigenpairs, eigenvectors stored as columns"""

    energies: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    degeneracy_tol: float = DEGENERACY_TOL

    @property
    def gaps(self) -> np.ndarray:
        return self.energies - self.energies[0]

    @property
    def degenerate(self) -> np.ndarray:
        """True where a level lies within the tolerance of a neighbour"""
        diffs = np.diff(self.energies) <= self.degeneracy_tol
        flags = np.zeros(len(self.energies), dtype=bool)
        flags[:-1] |= diffs
        flags[1:] |= diffs
        return flags

    @property
    def ground_degeneracy(self) -> int:
        return int(np.sum(self.energies - self.energies[0] <= self.degeneracy_tol))

    def state(self, index: int = 0) -> StateVector:
        return StateVector(self.vectors[:, index])

    def ground_space(self) -> np.ndarray:
        return self.vectors[:, : self.ground_degeneracy]


class GroundState(NamedTuple):
    energy: float
    state: StateVector
    degeneracy: int


def _residuals(matrix_apply, energies: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    out = []
    for i, e in enumerate(energies):
        v = vectors[:, i]
        out.append(float(np.linalg.norm(matrix_apply(v) - e * v)))
    return np.asarray(out)


def low_spectrum(
    H: PauliSum,
    k: int,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
    degeneracy_tol: float = DEGENERACY_TOL,
    max_iter: int = LANCZOS_MAX_ITER,
    seed: Optional[int] = None,
) -> SpectrumResult:
    """
    k lowest eigenpairs of a self-adjoint PauliSum.

    Uses dense diagonalization for L <= dense_limit and implicitly restarted
    Lanczos (ARPACK) on a matrix-free operator otherwise.

    Raises:
        RangeError: k outside [1, 2^L]
        ConvergenceError: Lanczos did not converge or residuals exceed 1e-8
    """
    if not H.is_self_adjoint():
        raise UsageError("Spectrum requires a self-adjoint operator")
    dim = 1 << H.size
    if not 1 <= k <= dim:
        raise RangeError(f"k={k} outside [1, {dim}]")

    sparse_h = H.to_sparse()
    if H.size <= dense_limit or k >= dim - 1:
        energies, vectors = np.linalg.eigh(to_dense(H, limit=max(dense_limit, H.size)))
        energies, vectors = energies[:k], vectors[:, :k]
        residuals = _residuals(sparse_h.dot, energies, vectors)
    else:
        operator = LinearOperator((dim, dim), matvec=sparse_h.dot, dtype=np.complex128)
        rng = np.random.default_rng(dim if seed is None else seed)
        v0 = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        try:
            energies, vectors = eigsh(
                operator, k=k, which="SA", v0=v0, tol=1e-12, maxiter=max_iter
            )
        except ArpackNoConvergence as e:
            residual = None
            if len(e.eigenvalues):
                residual = float(np.max(_residuals(sparse_h.dot, e.eigenvalues, e.eigenvectors)))
            raise ConvergenceError(
                f"Lanczos did not converge for L={H.size}, k={k}", residual
            )
        order = np.argsort(energies)
        energies, vectors = energies[order], vectors[:, order]
        residuals = _residuals(sparse_h.dot, energies, vectors)
        worst = float(np.max(residuals))
        if worst > RESIDUAL_TOL:
            raise ConvergenceError(f"Lanczos residual above {RESIDUAL_TOL}", worst)
        logger.debug(f"Lanczos L={H.size} k={k}: max residual {worst:.2e}")

    return SpectrumResult(
        energies=np.asarray(energies, dtype=float),
        vectors=np.asarray(vectors, dtype=np.complex128),
        residuals=residuals,
        degeneracy_tol=degeneracy_tol,
    )


def resolve_ground_space(
    H: PauliSum,
    k: int = 3,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
    degeneracy_tol: float = DEGENERACY_TOL,
) -> SpectrumResult:
    """Low spectrum with k doubled until the highest solved level lies above the ground space"""
    dim = 1 << H.size
    k = min(dim, k)
    while True:
        spectrum = low_spectrum(H, k, dense_limit, degeneracy_tol)
        if spectrum.ground_degeneracy < k or k == dim:
            return spectrum
        k = min(dim, 2 * k)


def ground_state(
    H: PauliSum, dense_limit: int = DEFAULT_DENSE_LIMIT, degeneracy_tol: float = DEGENERACY_TOL
) -> GroundState:
    """Lowest eigenpair plus the number of levels degenerate with it"""
    spectrum = resolve_ground_space(H, 3, dense_limit, degeneracy_tol)
    degeneracy = spectrum.ground_degeneracy
    if degeneracy > 1:
        logger.info(f"Ground space of L={H.size} Hamiltonian is {degeneracy}-fold degenerate")
    return GroundState(float(spectrum.energies[0]), spectrum.state(0), degeneracy)



def minimal_gap(spectra: List[SpectrumResult]) -> float:
    """Smallest first gap over a series of spectra, e.g. along a sweep"""
    return float(min(s.energies[1] - s.energies[0] for s in spectra))
