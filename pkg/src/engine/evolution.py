"""Adaptive Runge-Kutta integration of i dpsi/dt = H(t) psi"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.integrate import solve_ivp

from ..algebra import PauliSum
from ..utils.errors import RangeError, StiffIntegrationError, UsageError
from .statevector import StateVector

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-8
DEFAULT_SAMPLES = 201
RENORMALIZE_DRIFT = 1e-9
DRIFT_WARNING = 1e-6


@dataclass(frozen=True)
class DrivenTerm:
    """amplitude(t) * operator"""

    amplitude: Callable[[float], float]
    operator: PauliSum
    name: str = ""


class DrivenHamiltonian:
    """
    H(t) = sum_k a_k(t) O_k with static operators. Each operator is converted to
    CSR once, so a matvec costs one sparse product per term.
    """

    def __init__(self, terms: Sequence[DrivenTerm]):
        if not terms:
            raise UsageError("DrivenHamiltonian needs at least one term")
        sizes = {term.operator.size for term in terms}
        if len(sizes) != 1:
            raise UsageError(f"Terms have mixed sizes {sorted(sizes)}")
        self.size = sizes.pop()
        self.terms = list(terms)
        self._matrices: Optional[List[sparse.csr_matrix]] = None

    @classmethod
    def constant(cls, H: PauliSum) -> "DrivenHamiltonian":
        return cls([DrivenTerm(lambda t: 1.0, H, "H")])

    @property
    def matrices(self) -> List[sparse.csr_matrix]:
        if self._matrices is None:
            self._matrices = [term.operator.to_sparse() for term in self.terms]
        return self._matrices

    def amplitudes(self, t: float) -> Dict[str, float]:
        return {term.name or f"term{k}": term.amplitude(t) for k, term in enumerate(self.terms)}

    def at(self, t: float) -> PauliSum:
        total = PauliSum.zero(self.size)
        for term in self.terms:
            a = term.amplitude(t)
            if a != 0.0:
                total = total + a * term.operator
        return total

    def matvec(self, t: float, psi: np.ndarray) -> np.ndarray:
        out = np.zeros_like(psi)
        for term, matrix in zip(self.terms, self.matrices):
            a = term.amplitude(t)
            if a != 0.0:
                out += a * matrix.dot(psi)
        return out


@dataclass
class Trajectory:
    """Sampled states of one integration; rows of ``states`` follow ``times``"""

    times: np.ndarray
    states: np.ndarray
    norm_drift: np.ndarray
    renormalized: bool = False
    evaluations: int = 0
    columns: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def final(self) -> StateVector:
        return StateVector(self.states[-1])

    def state(self, index: int) -> StateVector:
        return StateVector(self.states[index])

    def __len__(self) -> int:
        return len(self.times)

    def to_frame(self) -> pd.DataFrame:
        data = {"t": self.times}
        data.update(self.columns)
        data["norm_drift"] = self.norm_drift
        return pd.DataFrame(data)


def evolve(
    hamiltonian: DrivenHamiltonian,
    psi0: StateVector,
    t0: float,
    t1: float,
    tol: float = DEFAULT_TOLERANCE,
    sample_times: Optional[Sequence[float]] = None,
    samples: int = DEFAULT_SAMPLES,
) -> Trajectory:
    """
    Integrate the Schroedinger equation with the Dormand-Prince 5(4) pair.

    Args:
        hamiltonian: time-dependent Hamiltonian provider
        psi0: initial state at t0
        tol: local relative error tolerance; the absolute tolerance is
            tol / sqrt(2^L) so the error in the norm does not grow with L
        sample_times: explicit output times within [t0, t1]; defaults to
            ``samples`` uniform points including both ends

    Returns:
        Trajectory with states renormalized if the norm drifted above 1e-9

    Raises:
        StiffIntegrationError: step size underflow or other integrator failure
    """
    if not t1 > t0:
        raise RangeError(f"Need t1 > t0, got [{t0}, {t1}]")
    if not tol > 0:
        raise RangeError(f"Tolerance must be positive, got {tol}")
    if hamiltonian.size != psi0.size:
        raise UsageError(f"Size mismatch: H={hamiltonian.size}, psi={psi0.size}")

    if sample_times is None:
        sample_times = np.linspace(t0, t1, samples)
    sample_times = np.asarray(sample_times, dtype=float)
    if sample_times.min() < t0 or sample_times.max() > t1:
        raise RangeError(f"Sample times outside [{t0}, {t1}]")

    def rhs(t, y):
        return -1j * hamiltonian.matvec(t, y)

    solution = solve_ivp(
        rhs,
        (t0, t1),
        psi0.amplitudes.copy(),
        method="RK45",
        t_eval=sample_times,
        rtol=tol,
        atol=tol / np.sqrt(psi0.dim),
    )
    if solution.status < 0:
        raise StiffIntegrationError(f"Integration failed on [{t0}, {t1}]: {solution.message}")

    states = np.ascontiguousarray(solution.y.T)
    norms = np.linalg.norm(states, axis=1)
    drift = np.abs(norms - 1.0)
    renormalized = bool(np.max(drift) > RENORMALIZE_DRIFT)
    if renormalized:
        if np.max(drift) > DRIFT_WARNING:
            logger.warning(f"Renormalizing trajectory, max norm drift {np.max(drift):.2e}")
        else:
            logger.debug(f"Renormalizing trajectory, max norm drift {np.max(drift):.2e}")
        states = states / norms[:, None]

    return Trajectory(
        times=solution.t,
        states=states,
        norm_drift=drift,
        renormalized=renormalized,
        evaluations=int(solution.nfev),
    )
