"""Pauli-basis state tomography by linear inversion with positivity repair"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..algebra import PauliSum, to_dense
from ..algebra.pauli import masked_parity
from ..engine import StateVector
from ..protocols.local_unitary import apply_site_matrix
from ..utils.errors import CapabilityError, UsageError
from .circuit import Circuit, simulate_circuit
from .sampling import HADAMARD, make_rng, sample_distribution

logger = logging.getLogger(__name__)

MAX_TOMOGRAPHY_SITES = 4

_S_DAG = np.array([[1.0, 0.0], [0.0, -1.0j]], dtype=np.complex128)
_READOUT = {"X": HADAMARD, "Y": HADAMARD @ _S_DAG}


@dataclass
class TomographyResult:
    density: np.ndarray
    raw_density: np.ndarray
    expectations: Dict[str, float]
    fidelity: Optional[float]
    settings: int
    shots_per_setting: Optional[int]

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.density).min())


def measurement_settings(size: int) -> List[Tuple[str, ...]]:
    return list(itertools.product("XYZ", repeat=size))


def _setting_distribution(psi: StateVector, setting: Sequence[str]) -> np.ndarray:
    amplitudes = psi.amplitudes.copy()
    for site, letter in enumerate(setting):
        if letter in _READOUT:
            apply_site_matrix(amplitudes, psi.size, site, _READOUT[letter])
    probs = np.abs(amplitudes) ** 2
    return probs / probs.sum()


def _signs(size: int, mask: int) -> np.ndarray:
    return 1.0 - 2.0 * masked_parity(np.arange(1 << size, dtype=np.int64), mask)


def pauli_expectations(distributions: Dict[Tuple[str, ...], np.ndarray], size: int) -> Dict[str, float]:
    """
    All 4^L Pauli expectations. A string with identities is averaged over every
    setting that agrees with it on the non-identity sites.
    """
    expectations = {}
    for label in itertools.product("IXYZ", repeat=size):
        active = [i for i, letter in enumerate(label) if letter != "I"]
        mask = 0
        for i in active:
            mask |= 1 << (size - 1 - i)
        signs = _signs(size, mask)
        values = [
            float(np.dot(probs, signs))
            for setting, probs in distributions.items()
            if all(setting[i] == label[i] for i in active)
        ]
        expectations["".join(label)] = float(np.mean(values))
    return expectations


def linear_inversion(expectations: Dict[str, float], size: int) -> np.ndarray:
    """rho = 2^-L sum_P <P> P"""
    rho = PauliSum.from_terms(size, expectations.items())
    return to_dense(rho, limit=MAX_TOMOGRAPHY_SITES) / (1 << size)


def project_to_physical(rho: np.ndarray) -> np.ndarray:
    """
    Closest unit-trace PSD matrix in the 2-norm.

    Eigenvalues are taken in descending order. The most negative ones are
    zeroed one at a time and their sum is spread evenly over the remaining
    ones, until what remains is nonnegative.
    """
    hermitian = 0.5 * (rho + rho.conj().T)
    trace = float(np.real(np.trace(hermitian)))
    if trace <= 0:
        raise UsageError("Reconstructed density matrix has non-positive trace")
    values, vectors = np.linalg.eigh(hermitian / trace)
    values, vectors = values[::-1].copy(), vectors[:, ::-1]

    kept = len(values)
    deficit = 0.0
    while kept > 0 and values[kept - 1] + deficit / kept < 0:
        deficit += values[kept - 1]
        values[kept - 1] = 0.0
        kept -= 1
    if kept == 0:
        raise UsageError("Reconstructed density matrix has no positive spectrum")
    values[:kept] += deficit / kept
    return (vectors * values) @ vectors.conj().T


def tomography(
    prep: Circuit,
    shots_per_setting: Optional[int] = 400,
    seed: int = 0,
    initial: Optional[StateVector] = None,
    target: Optional[StateVector] = None,
) -> TomographyResult:
    """
    Reconstruct the state prepared by ``prep`` from all 3^L Pauli settings.

    ``shots_per_setting=None`` uses exact outcome distributions. Each setting
    draws from its own Philox stream seeded by (seed, setting index).

    Raises:
        CapabilityError: L > 4
    """
    size = prep.size
    if size > MAX_TOMOGRAPHY_SITES:
        raise CapabilityError(f"Tomography supports L <= {MAX_TOMOGRAPHY_SITES}, got {size}")
    if shots_per_setting is not None and shots_per_setting < 1:
        raise UsageError(f"shots_per_setting must be >= 1, got {shots_per_setting}")

    psi = simulate_circuit(prep, initial)
    distributions = {}
    for index, setting in enumerate(measurement_settings(size)):
        probs = _setting_distribution(psi, setting)
        if shots_per_setting is not None:
            rng = make_rng(np.random.SeedSequence([seed, index]))
            counts = sample_distribution(probs, size, shots_per_setting, rng)
            probs = np.zeros(1 << size)
            for bits, n in counts.items():
                probs[int(bits, 2)] = n / shots_per_setting
        distributions[setting] = probs

    expectations = pauli_expectations(distributions, size)
    raw = linear_inversion(expectations, size)
    rho = project_to_physical(raw)

    fidelity = None
    if target is not None:
        fidelity = float(np.real(np.vdot(target.amplitudes, rho @ target.amplitudes)))
    logger.info(
        f"Tomography L={size}, {len(distributions)} settings, "
        f"shots/setting={shots_per_setting}, fidelity={fidelity}"
    )
    return TomographyResult(
        density=rho,
        raw_density=raw,
        expectations=expectations,
        fidelity=fidelity,
        settings=len(distributions),
        shots_per_setting=shots_per_setting,
    )
