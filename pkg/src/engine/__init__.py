"""Dense state-vector engine"""

from .statevector import (
    StateVector,
    apply,
    overlap,
    fidelity,
    subspace_weight,
    expectation,
    NORM_TOLERANCE,
)
from .spectrum import (
    SpectrumResult,
    GroundState,
    low_spectrum,
    resolve_ground_space,
    ground_state,
    minimal_gap,
    DEGENERACY_TOL,
)
from .evolution import (
    DrivenTerm,
    DrivenHamiltonian,
    Trajectory,
    evolve,
    DEFAULT_TOLERANCE,
    DEFAULT_SAMPLES,
)

__all__ = [
    "StateVector",
    "apply",
    "overlap",
    "fidelity",
    "subspace_weight",
    "expectation",
    "NORM_TOLERANCE",
    "SpectrumResult",
    "GroundState",
    "low_spectrum",
    "resolve_ground_space",
    "ground_state",
    "minimal_gap",
    "DEGENERACY_TOL",
    "DrivenTerm",
    "DrivenHamiltonian",
    "Trajectory",
    "evolve",
    "DEFAULT_TOLERANCE",
    "DEFAULT_SAMPLES",
]
