"""Time-dependent Hamiltonians of the four protocols"""

import logging
from functools import lru_cache
from typing import List, NamedTuple

from ..algebra import PauliSum
from ..engine import DrivenHamiltonian, DrivenTerm
from ..schedules import BoundaryCondition, IsingOperators, SweepFunction, alpha_first_order
from .spec import ProtocolKind, ProtocolSpec

logger = logging.getLogger(__name__)


class Fields(NamedTuple):
    """Uniform amplitudes of sum Z, sum X, sum Y and the ZZ bonds"""

    h_z: float
    h_x: float
    h_y: float
    J: float


@lru_cache(maxsize=64)
def ising_operators(size: int, boundary: BoundaryCondition) -> IsingOperators:
    return IsingOperators.build(size, boundary)


def fields(spec: ProtocolSpec, t: float) -> Fields:
    """Coupling amplitudes at time t"""
    model = spec.model
    if spec.kind is ProtocolKind.LINEAR:
        sweep = SweepFunction(spec.tau)
        s = sweep.clip(t) / spec.tau
        return Fields(model.h_z(s), model.h_x(s), 0.0, model.J(s))

    lam, rate = SweepFunction(spec.tau)(t)
    h_y = 0.0
    if spec.kind.driven and spec.lambda_f != 0.0:
        h_y = spec.lambda_f * rate * alpha_first_order(lam, model)
    return Fields(model.h_z(lam), model.h_x(lam), h_y, model.J(lam))


def sweep_parameter(spec: ProtocolSpec, t: float) -> float:
    """Interpolation parameter of H_0 at t: lambda(t), or t/tau for the linear ramp"""
    sweep = SweepFunction(spec.tau)
    if spec.kind is ProtocolKind.LINEAR:
        return sweep.clip(t) / spec.tau
    return sweep.value(t)


def build_hamiltonian(spec: ProtocolSpec, t: float) -> PauliSum:
    """
    H(t) of the protocol: the interpolated Ising model plus, for lcd and lcdlu,
    the drive lambda_f * dlambda/dt * alpha * sum Y.
    """
    ops = ising_operators(spec.size, spec.boundary)
    f = fields(spec, t)
    H = f.h_z * ops.z_field + f.h_x * ops.x_field + f.J * ops.zz_bonds
    if f.h_y != 0.0:
        H = H + f.h_y * ops.y_field
    return H


def bare_hamiltonian(spec: ProtocolSpec, t: float) -> PauliSum:
    """H_0 at the protocol's sweep parameter, without the drive"""
    return spec.model.hamiltonian(sweep_parameter(spec, t), spec.size, spec.boundary)


def driven_hamiltonian(spec: ProtocolSpec) -> DrivenHamiltonian:
    ops = ising_operators(spec.size, spec.boundary)
    terms: List[DrivenTerm] = [
        DrivenTerm(lambda t: fields(spec, t).h_z, ops.z_field, "h_z"),
        DrivenTerm(lambda t: fields(spec, t).h_x, ops.x_field, "h_x"),
        DrivenTerm(lambda t: fields(spec, t).J, ops.zz_bonds, "J"),
    ]
    if spec.kind.driven and spec.lambda_f != 0.0:
        terms.append(DrivenTerm(lambda t: fields(spec, t).h_y, ops.y_field, "h_y"))
    return DrivenHamiltonian(terms)
