"""Protocol execution: evolution, fidelity tracking and final-state analysis"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..engine import (
    StateVector,
    Trajectory,
    evolve,
    expectation,
    resolve_ground_space,
    subspace_weight,
)
from ..schedules import BoundaryCondition, ModelSchedules
from .hamiltonian import bare_hamiltonian, driven_hamiltonian
from .local_unitary import apply_lu, symmetry_expectation
from .spec import ProtocolKind, ProtocolSpec

logger = logging.getLogger(__name__)

TARGET_DEGENERACY_GAP = 1e-10


@dataclass(frozen=True)
class TargetState:
    """Ground space of H_0(tau); more than one column when the gap is below 1e-10"""

    energy: float
    basis: np.ndarray
    gap: float

    @property
    def degeneracy(self) -> int:
        return self.basis.shape[1]

    def weight(self, psi: StateVector) -> float:
        return subspace_weight(psi, self.basis)


@lru_cache(maxsize=32)
def _target(size: int, h_xf: float, J_f: float, boundary: BoundaryCondition) -> TargetState:
    H = ModelSchedules(h_xf=h_xf, J_f=J_f).target_hamiltonian(size, boundary)
    spectrum = resolve_ground_space(H, 4, degeneracy_tol=TARGET_DEGENERACY_GAP)
    energies = spectrum.energies
    gap = float(energies[1] - energies[0]) if len(energies) > 1 else float("inf")
    basis = spectrum.ground_space()
    basis.setflags(write=False)
    if basis.shape[1] > 1:
        logger.info(f"Target ground space at L={size}, h_xf={h_xf} is {basis.shape[1]}-fold")
    return TargetState(float(spectrum.energies[0]), basis, gap)


def target_state(spec: ProtocolSpec) -> TargetState:
    """Ground space of the final Hamiltonian (independent of h_zi)"""
    return _target(spec.size, float(spec.h_xf), float(spec.J_f), spec.resolved_boundary)


def initial_state(spec: ProtocolSpec) -> StateVector:
    return StateVector.from_bitstring(spec.initial_bitstring)


@dataclass
class RunResult:
    spec: ProtocolSpec
    lambda_f: float
    times: np.ndarray
    fidelity_instantaneous: Optional[np.ndarray]
    fidelity_target: np.ndarray
    energies: np.ndarray
    final_state: StateVector
    final_energy: float
    ground_energy: float
    pre_lu_fidelity: Optional[float]
    final_fidelity: float
    symmetry: float
    trajectory: Trajectory = field(repr=False, default=None)

    @property
    def energy_ratio(self) -> float:
        return self.final_energy / self.ground_energy

    def peak_target_time(self) -> float:
        return float(self.times[int(np.argmax(self.fidelity_target))])

    def to_frame(self) -> pd.DataFrame:
        data = {
            "t": self.times,
            "F_instantaneous": (
                self.fidelity_instantaneous
                if self.fidelity_instantaneous is not None
                else np.full(len(self.times), np.nan)
            ),
            "F_target": self.fidelity_target,
            "norm_drift": self.trajectory.norm_drift,
            "energy": self.energies,
        }
        return pd.DataFrame(data)

    def summary(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "lambda_f": self.lambda_f,
            "F_final": self.final_fidelity,
            "F_pre_lu": self.pre_lu_fidelity,
            "E": self.final_energy,
            "E_ground": self.ground_energy,
            "E_ratio": self.energy_ratio,
            "symmetry": self.symmetry,
            "renormalized": bool(self.trajectory.renormalized),
            "max_norm_drift": float(np.max(self.trajectory.norm_drift)),
        }


def final_state(spec: ProtocolSpec) -> Tuple[StateVector, StateVector]:
    """(state at tau before the local unitary, state after it)"""
    trajectory = evolve(
        driven_hamiltonian(spec),
        initial_state(spec),
        0.0,
        spec.tau,
        tol=spec.tolerance,
        sample_times=[spec.tau],
    )
    pre = trajectory.final
    if spec.kind is ProtocolKind.LCDLU:
        return pre, apply_lu(pre, spec.lu)
    return pre, pre


def final_fidelity(spec: ProtocolSpec) -> float:
    """Target fidelity of the final state, after the local unitary for lcdlu"""
    _, post = final_state(spec)
    return target_state(spec).weight(post)


def run(spec: ProtocolSpec, track_instantaneous: bool = True) -> RunResult:
    """
    Execute one protocol from the ground state of H(0).

    Records at every sample time the fidelity to the instantaneous ground space of
    H_0 (optional, one eigensolve per sample), the fidelity to the target ground
    space and <H_0(t)>. For lcdlu the local unitary acts after t = tau.
    """
    logger.info(
        f"Running {spec.kind.value} L={spec.size} h_xf={spec.h_xf} "
        f"tau={spec.tau} lambda_f={spec.lambda_f}"
    )
    trajectory = evolve(
        driven_hamiltonian(spec),
        initial_state(spec),
        0.0,
        spec.tau,
        tol=spec.tolerance,
        samples=spec.samples,
    )
    target = target_state(spec)

    f_target = np.empty(len(trajectory))
    f_inst = np.empty(len(trajectory)) if track_instantaneous else None
    energies = np.empty(len(trajectory))
    for i, t in enumerate(trajectory.times):
        psi = trajectory.state(i)
        f_target[i] = target.weight(psi)
        H0 = bare_hamiltonian(spec, t)
        energies[i] = expectation(H0, psi)
        if track_instantaneous:
            spectrum = resolve_ground_space(H0, 4)
            f_inst[i] = subspace_weight(psi, spectrum.ground_space())

    pre = trajectory.final
    post = apply_lu(pre, spec.lu) if spec.kind is ProtocolKind.LCDLU else pre
    final_H = spec.model.target_hamiltonian(spec.size, spec.boundary)
    final_energy = expectation(final_H, post)

    result = RunResult(
        spec=spec,
        lambda_f=spec.lambda_f,
        times=trajectory.times,
        fidelity_instantaneous=f_inst,
        fidelity_target=f_target,
        energies=energies,
        final_state=post,
        final_energy=final_energy,
        ground_energy=target.energy,
        pre_lu_fidelity=target.weight(pre) if spec.kind is ProtocolKind.LCDLU else None,
        final_fidelity=target.weight(post),
        symmetry=symmetry_expectation(post),
        trajectory=trajectory,
    )
    logger.info(
        f"{spec.kind.value} L={spec.size}: F_final={result.final_fidelity:.6f}, "
        f"E/E_grd={result.energy_ratio:.6f}"
    )
    return result


def run_many(
    specs: Sequence[ProtocolSpec], jobs: int = 1, track_instantaneous: bool = False
) -> List[RunResult]:
    """Independent runs on a bounded thread pool; results follow the input order"""
    if jobs <= 1:
        return [run(spec, track_instantaneous) for spec in specs]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = {
            index: pool.submit(run, spec, track_instantaneous)
            for index, spec in enumerate(specs)
        }
        return [futures[index].result() for index in range(len(specs))]
