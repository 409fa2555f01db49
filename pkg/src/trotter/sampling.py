"""Shot sampling in the Z and X bases and energy estimation from counts"""

import json
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Mapping, NamedTuple, Optional, Tuple, Union

import numpy as np

from ..engine import StateVector
from ..protocols.local_unitary import apply_uniform
from ..schedules import BoundaryCondition, bonds
from ..utils.errors import UsageError

logger = logging.getLogger(__name__)

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)


class MeasurementBasis(str, Enum):
    Z = "Z"
    X = "X"


@dataclass(frozen=True)
class ShotRecord:
    basis: MeasurementBasis
    counts: Mapping[str, int]
    shots: int
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "basis", MeasurementBasis(self.basis))
        object.__setattr__(self, "counts", dict(sorted(self.counts.items())))
        if self.shots < 1:
            raise UsageError(f"shots must be >= 1, got {self.shots}")
        if sum(self.counts.values()) != self.shots:
            raise UsageError(f"Counts sum to {sum(self.counts.values())}, expected {self.shots}")
        lengths = {len(bits) for bits in self.counts}
        if len(lengths) > 1:
            raise UsageError(f"Bitstrings of mixed lengths {sorted(lengths)}")

    @property
    def size(self) -> int:
        return len(next(iter(self.counts)))

    def frequency(self, bits: str) -> float:
        return self.counts.get(bits, 0) / self.shots

    def to_json(self) -> Dict[str, Any]:
        return {
            "basis": self.basis.value,
            "shots": self.shots,
            "seed": self.seed,
            "counts": dict(self.counts),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "ShotRecord":
        return cls(data["basis"], data["counts"], int(data["shots"]), data.get("seed"))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def rotate_to_basis(psi: StateVector, basis: MeasurementBasis) -> StateVector:
    """X-basis readout: Hadamard per site, so |+> -> |0> and |-> -> |1>"""
    if MeasurementBasis(basis) is MeasurementBasis.X:
        return apply_uniform(psi, HADAMARD)
    return psi


def exact_distribution(psi: StateVector, basis: MeasurementBasis = MeasurementBasis.Z) -> np.ndarray:
    probs = rotate_to_basis(psi, basis).probabilities()
    return probs / probs.sum()


def make_rng(seed: Union[int, np.random.SeedSequence]) -> np.random.Generator:
    """Counter-based Philox stream"""
    return np.random.Generator(np.random.Philox(seed))


def sample_distribution(
    probs: np.ndarray, size: int, shots: int, rng: np.random.Generator
) -> Dict[str, int]:
    draws = rng.multinomial(shots, probs)
    return {format(int(i), f"0{size}b"): int(draws[i]) for i in np.flatnonzero(draws)}


def sample(psi: StateVector, basis: MeasurementBasis, shots: int, seed: int) -> ShotRecord:
    """Seeded draw of ``shots`` bitstrings from |amplitude|^2 in the given basis"""
    if shots < 1:
        raise UsageError(f"shots must be >= 1, got {shots}")
    probs = exact_distribution(psi, basis)
    counts = sample_distribution(probs, psi.size, shots, make_rng(seed))
    return ShotRecord(MeasurementBasis(basis), counts, shots, seed)


class EnergyEstimate(NamedTuple):
    energy: float
    stderr: float
    zz: float
    x: float


def _spins(indices: np.ndarray, size: int) -> np.ndarray:
    """+1 for bit 0, -1 for bit 1; column i is site i"""
    shifts = size - 1 - np.arange(size)
    bits = (indices[:, None] >> shifts[None, :]) & 1
    return 1 - 2 * bits


def _weighted_stats(values: np.ndarray, weights: np.ndarray, shots: Optional[int]) -> Tuple[float, float]:
    mean = float(np.dot(weights, values))
    if shots is None or shots < 2:
        return mean, 0.0
    variance = float(np.dot(weights, (values - mean) ** 2)) * shots / (shots - 1)
    return mean, variance / shots


def _record_arrays(record: ShotRecord) -> Tuple[np.ndarray, np.ndarray]:
    indices = np.array([int(bits, 2) for bits in record.counts], dtype=np.int64)
    weights = np.array(list(record.counts.values()), dtype=float) / record.shots
    return indices, weights


def _energy(
    size: int,
    z_data: Tuple[np.ndarray, np.ndarray, Optional[int]],
    x_data: Tuple[np.ndarray, np.ndarray, Optional[int]],
    h_xf: float,
    J_f: float,
    boundary: BoundaryCondition,
) -> EnergyEstimate:
    bond_list = bonds(size, boundary)
    z_idx, z_w, z_shots = z_data
    spins = _spins(z_idx, size)
    zz_per_shot = np.zeros(len(z_idx))
    for bond in bond_list:
        zz_per_shot += bond.sign * spins[:, bond.left] * spins[:, bond.right]
    zz_mean, zz_var = _weighted_stats(zz_per_shot, z_w, z_shots)

    x_idx, x_w, x_shots = x_data
    x_per_shot = _spins(x_idx, size).sum(axis=1).astype(float)
    x_mean, x_var = _weighted_stats(x_per_shot, x_w, x_shots)

    energy = J_f * zz_mean + h_xf * x_mean
    stderr = float(np.sqrt(J_f ** 2 * zz_var + h_xf ** 2 * x_var))
    return EnergyEstimate(energy, stderr, J_f * zz_mean, h_xf * x_mean)


def estimate_energy(
    rec_z: ShotRecord,
    rec_x: ShotRecord,
    h_xf: float,
    J_f: float = 1.0,
    boundary: BoundaryCondition = BoundaryCondition.AUTO,
) -> EnergyEstimate:
    """
    <H_0(tau)> = J_f sum <ZZ> + h_xf sum <X> from Z- and X-basis shots.

    The standard error propagates the per-shot variance of each bond and site
    sum, so correlations between bonds of the same shot are included.
    """
    if rec_z.basis is not MeasurementBasis.Z or rec_x.basis is not MeasurementBasis.X:
        raise UsageError(f"Expected Z and X records, got {rec_z.basis.value} and {rec_x.basis.value}")
    if rec_z.size != rec_x.size:
        raise UsageError(f"Record sizes differ: {rec_z.size} vs {rec_x.size}")
    z_idx, z_w = _record_arrays(rec_z)
    x_idx, x_w = _record_arrays(rec_x)
    return _energy(
        rec_z.size, (z_idx, z_w, rec_z.shots), (x_idx, x_w, rec_x.shots), h_xf, J_f, boundary
    )


def estimate_energy_exact(
    psi: StateVector,
    h_xf: float,
    J_f: float = 1.0,
    boundary: BoundaryCondition = BoundaryCondition.AUTO,
) -> EnergyEstimate:
    """Same estimator on exact distributions (infinite-shot limit)"""
    indices = np.arange(psi.dim, dtype=np.int64)
    return _energy(
        psi.size,
        (indices, exact_distribution(psi, MeasurementBasis.Z), None),
        (indices, exact_distribution(psi, MeasurementBasis.X), None),
        h_xf,
        J_f,
        boundary,
    )
