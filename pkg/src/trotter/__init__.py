"""Digitized protocols: Trotter circuits, shot sampling, tomography and export"""

from .circuit import GateKind, Gate, Circuit, synthesize, simulate_circuit
from .sampling import (
    MeasurementBasis,
    ShotRecord,
    EnergyEstimate,
    exact_distribution,
    sample,
    estimate_energy,
    estimate_energy_exact,
)
from .tomography import TomographyResult, tomography, measurement_settings, project_to_physical
from .qasm import export_circuit, parse_qasm, parse_json

__all__ = [
    "GateKind",
    "Gate",
    "Circuit",
    "synthesize",
    "simulate_circuit",
    "MeasurementBasis",
    "ShotRecord",
    "EnergyEstimate",
    "exact_distribution",
    "sample",
    "estimate_energy",
    "estimate_energy_exact",
    "TomographyResult",
    "tomography",
    "measurement_settings",
    "project_to_physical",
    "export_circuit",
    "parse_qasm",
    "parse_json",
]
