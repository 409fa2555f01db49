"""Protocol construction, execution, optimization and scaling experiments"""

from .spec import ProtocolKind, ProtocolSpec, LocalUnitaryParams, wrap_angle
from .hamiltonian import Fields, fields, build_hamiltonian, bare_hamiltonian, driven_hamiltonian
from .local_unitary import apply_lu, site_unitary, symmetry_expectation
from .frame import frame_angle, rotating_frame_h, frame_hamiltonian, to_lab_frame
from .runner import (
    RunResult,
    TargetState,
    target_state,
    initial_state,
    final_state,
    final_fidelity,
    run,
    run_many,
)
from .optimize import (
    LambdaOptimum,
    LUOptimum,
    LUMode,
    default_bracket,
    optimize_lambda_f,
    optimize_lu,
    resolve_lambda_f,
)
from .scaling import (
    ScalingFit,
    ScalingReport,
    fit_exponential,
    scan_lambda_f,
    scan_h_xf,
    find_maxima,
    oscillation_period,
    scaling_experiment,
)

__all__ = [
    "ProtocolKind",
    "ProtocolSpec",
    "LocalUnitaryParams",
    "wrap_angle",
    "Fields",
    "fields",
    "build_hamiltonian",
    "bare_hamiltonian",
    "driven_hamiltonian",
    "apply_lu",
    "site_unitary",
    "symmetry_expectation",
    "frame_angle",
    "rotating_frame_h",
    "frame_hamiltonian",
    "to_lab_frame",
    "RunResult",
    "TargetState",
    "target_state",
    "initial_state",
    "final_state",
    "final_fidelity",
    "run",
    "run_many",
    "LambdaOptimum",
    "LUOptimum",
    "LUMode",
    "default_bracket",
    "optimize_lambda_f",
    "optimize_lu",
    "resolve_lambda_f",
    "ScalingFit",
    "ScalingReport",
    "fit_exponential",
    "scan_lambda_f",
    "scan_h_xf",
    "find_maxima",
    "oscillation_period",
    "scaling_experiment",
]
