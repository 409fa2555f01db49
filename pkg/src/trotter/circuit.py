"""First-order Trotter circuit synthesis and ideal circuit simulation"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..engine import StateVector
from ..engine.kernels import apply_zz_phase
from ..protocols import ProtocolKind, ProtocolSpec, fields
from ..protocols.local_unitary import apply_site_matrix, rx_matrix, ry_matrix, rz_matrix
from ..schedules import bonds
from ..utils.errors import UsageError

logger = logging.getLogger(__name__)

ANGLE_PRUNE = 1e-15


class GateKind(str, Enum):
    RZ = "RZ"
    RX = "RX"
    RY = "RY"
    RZZ = "RZZ"


@dataclass(frozen=True)
class Gate:
    """Rotation exp(-i angle P / 2) on one site, or on two sites for RZZ"""

    kind: GateKind
    sites: Tuple[int, ...]
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))
        expected = 2 if self.kind is GateKind.RZZ else 1
        if len(self.sites) != expected:
            raise UsageError(f"{self.kind.value} acts on {expected} site(s), got {self.sites}")
        if expected == 2 and self.sites[0] == self.sites[1]:
            raise UsageError(f"RZZ needs two distinct sites, got {self.sites}")
        if any(s < 0 for s in self.sites):
            raise UsageError(f"Negative site in {self.sites}")

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "sites": list(self.sites), "angle": self.angle}


@dataclass
class Circuit:
    size: int
    gates: List[Gate] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.size < 1:
            raise UsageError(f"Circuit size must be >= 1, got {self.size}")
        for gate in self.gates:
            self._check_gate(gate)
        steps = self.metadata.get("trotter_steps")
        if steps is not None and steps < 1:
            raise UsageError(f"trotter_steps must be >= 1, got {steps}")

    def _check_gate(self, gate: Gate):
        for site in gate.sites:
            if site >= self.size:
                raise UsageError(f"Gate site {site} outside [0, {self.size})")

    def append(self, gate: Gate):
        self._check_gate(gate)
        self.gates.append(gate)

    def add_rotation(self, kind: GateKind, sites: Tuple[int, ...], angle: float):
        """Append unless the angle is negligible"""
        if abs(angle) >= ANGLE_PRUNE:
            self.append(Gate(kind, sites, angle))

    def counts(self) -> Counter:
        return Counter(gate.kind.value for gate in self.gates)

    def __len__(self) -> int:
        return len(self.gates)


def synthesize(spec: ProtocolSpec, trotter_steps: Optional[int] = None) -> Circuit:
    """
    First-order Trotter circuit of the protocol.

    Each step of length dt = tau / T evaluates the couplings at its midpoint and
    emits the layers RZ(2 h_z dt), RX(2 h_x dt), RY(2 h_y dt) per site and
    RZZ(2 sign J dt) per bond. lcdlu appends its local unitary as RZ(beta),
    RX(theta), RZ(alpha) per site.
    """
    steps = trotter_steps if trotter_steps is not None else spec.trotter_steps
    if steps < 1:
        raise UsageError(f"trotter_steps must be >= 1, got {steps}")
    dt = spec.tau / steps
    bond_list = bonds(spec.size, spec.boundary)
    circuit = Circuit(
        spec.size,
        metadata={
            "trotter_steps": steps,
            "spec_hash": spec.digest(),
            "initial": spec.initial_bitstring,
        },
    )
    for k in range(steps):
        f = fields(spec, (k + 0.5) * dt)
        for site in range(spec.size):
            circuit.add_rotation(GateKind.RZ, (site,), 2.0 * f.h_z * dt)
        for site in range(spec.size):
            circuit.add_rotation(GateKind.RX, (site,), 2.0 * f.h_x * dt)
        for site in range(spec.size):
            circuit.add_rotation(GateKind.RY, (site,), 2.0 * f.h_y * dt)
        for bond in bond_list:
            circuit.add_rotation(GateKind.RZZ, (bond.left, bond.right), 2.0 * bond.sign * f.J * dt)

    if spec.kind is ProtocolKind.LCDLU:
        for site, (alpha, theta, beta) in enumerate(spec.lu.site_triples(spec.size)):
            circuit.add_rotation(GateKind.RZ, (site,), beta)
            circuit.add_rotation(GateKind.RX, (site,), theta)
            circuit.add_rotation(GateKind.RZ, (site,), alpha)

    logger.debug(f"Synthesized {len(circuit)} gates for L={spec.size}, T={steps}: {dict(circuit.counts())}")
    return circuit


_SINGLE = {GateKind.RZ: rz_matrix, GateKind.RX: rx_matrix, GateKind.RY: ry_matrix}


def simulate_circuit(circuit: Circuit, psi0: Optional[StateVector] = None) -> StateVector:
    """
    Apply the gates in order. Without ``psi0`` the circuit starts from the
    basis state recorded in its metadata, or |0...0>.
    """
    if psi0 is None:
        psi0 = StateVector.from_bitstring(circuit.metadata.get("initial", "0" * circuit.size))
    if psi0.size != circuit.size:
        raise UsageError(f"Size mismatch: circuit={circuit.size}, state={psi0.size}")
    amplitudes = psi0.amplitudes.copy()
    L = circuit.size
    for gate in circuit.gates:
        circuit._check_gate(gate)
        if gate.kind is GateKind.RZZ:
            a, b = gate.sites
            mask = (1 << (L - 1 - a)) | (1 << (L - 1 - b))
            half = 0.5 * gate.angle
            apply_zz_phase(amplitudes, mask, complex(math.cos(half), -math.sin(half)),
                           complex(math.cos(half), math.sin(half)))
        else:
            apply_site_matrix(amplitudes, L, gate.sites[0], _SINGLE[gate.kind](gate.angle))
    return StateVector(amplitudes, normalized=False)
