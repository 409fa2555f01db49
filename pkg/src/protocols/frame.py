"""Rotating frame that removes the uniform sigma^y drive of the LCD protocol"""

import logging
import math

from ..algebra import PauliSum
from ..engine import DrivenHamiltonian, DrivenTerm, StateVector
from ..schedules import SweepFunction, alpha_integral, bond_sum, bonds
from ..utils.errors import UsageError
from .hamiltonian import fields, ising_operators
from .local_unitary import apply_uniform, ry_matrix
from .spec import ProtocolSpec

logger = logging.getLogger(__name__)


def frame_angle(spec: ProtocolSpec, t: float) -> float:
    """theta_y(t) = 2 lambda_f * integral_0^t dlambda/dt alpha dt'"""
    lam = SweepFunction(spec.tau).value(t)
    return 2.0 * spec.lambda_f * alpha_integral(lam, spec.model)


class _BondOperators:
    def __init__(self, spec: ProtocolSpec):
        bond_list = bonds(spec.size, spec.boundary)
        self.zz = ising_operators(spec.size, spec.boundary).zz_bonds
        self.xx = bond_sum(spec.size, bond_list, "X", "X")
        self.zx = bond_sum(spec.size, bond_list, "Z", "X", symmetrize=True)


def _frame_amplitudes(spec: ProtocolSpec, t: float):
    f = fields(spec, t)
    theta = frame_angle(spec, t)
    c, s = math.cos(theta), math.sin(theta)
    return {
        "z": f.h_z * c + f.h_x * s,
        "x": f.h_x * c - f.h_z * s,
        "zz": f.J * c * c,
        "xx": f.J * s * s,
        "zx": -f.J * c * s,
    }


def _check_kind(spec: ProtocolSpec):
    if not spec.kind.driven:
        raise UsageError(f"Rotating frame applies to lcd protocols, got {spec.kind.value}")


def rotating_frame_h(spec: ProtocolSpec, t: float) -> PauliSum:
    """
    U^dag H U - i U^dag dU/dt with U = exp(-i theta_y sum Y / 2).

    The frame's angular velocity equals the sigma^y amplitude, so the Y terms
    cancel and the result is built from Z, X, ZZ, XX and ZX + XZ only.
    """
    _check_kind(spec)
    ops = ising_operators(spec.size, spec.boundary)
    bond_ops = _BondOperators(spec)
    a = _frame_amplitudes(spec, t)
    return (
        a["z"] * ops.z_field
        + a["x"] * ops.x_field
        + a["zz"] * bond_ops.zz
        + a["xx"] * bond_ops.xx
        + a["zx"] * bond_ops.zx
    )


def frame_hamiltonian(spec: ProtocolSpec) -> DrivenHamiltonian:
    _check_kind(spec)
    ops = ising_operators(spec.size, spec.boundary)
    bond_ops = _BondOperators(spec)
    return DrivenHamiltonian([
        DrivenTerm(lambda t: _frame_amplitudes(spec, t)["z"], ops.z_field, "z"),
        DrivenTerm(lambda t: _frame_amplitudes(spec, t)["x"], ops.x_field, "x"),
        DrivenTerm(lambda t: _frame_amplitudes(spec, t)["zz"], bond_ops.zz, "zz"),
        DrivenTerm(lambda t: _frame_amplitudes(spec, t)["xx"], bond_ops.xx, "xx"),
        DrivenTerm(lambda t: _frame_amplitudes(spec, t)["zx"], bond_ops.zx, "zx"),
    ])


def to_lab_frame(phi: StateVector, theta: float) -> StateVector:
    """psi = exp(-i theta sum Y / 2) phi"""
    return apply_uniform(phi, ry_matrix(theta))
