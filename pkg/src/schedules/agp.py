"""Variational gauge potentials, the first-order LCD amplitude and the lambda_f law"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import integrate

from ..algebra import PauliSum, commutator, field_sum, hs_inner, to_dense
from ..utils.errors import (
    NoDriveError,
    QuadratureError,
    SingularAnsatzError,
    SingularityError,
    UsageError,
)
from .model import BoundaryCondition, ModelSchedules, SweepFunction, bond_sum, bonds

logger = logging.getLogger(__name__)

QUAD_TOLERANCE = 1e-10


def alpha_first_order(lam: float, model: ModelSchedules) -> float:
    """
    Closed-form amplitude of the single-site sigma^y gauge potential.

    alpha = 1/2 (-h_z' h_x + h_x' h_z) / (h_z^2 + h_x^2 + 2 J^2)
    """
    h_z, h_x, J = model.h_z(lam), model.h_x(lam), model.J(lam)
    denominator = h_z * h_z + h_x * h_x + 2.0 * J * J
    if denominator == 0.0:
        raise SingularityError(f"All couplings vanish at lambda={lam}")
    numerator = -model.dh_z(lam) * h_x + model.dh_x(lam) * h_z
    return 0.5 * numerator / denominator


def alpha_integral(lam: float, model: ModelSchedules) -> float:
    """
    Closed form of the integral of alpha from 0 to ``lam``.

    For the linear interpolation the numerator is the constant h_zi h_xf and the
    denominator a quadratic a l^2 + b l + c, so the antiderivative is an arctangent.
    """
    numerator = model.h_zi * model.h_xf
    if numerator == 0.0:
        return 0.0
    a = model.h_zi ** 2 + model.h_xf ** 2 + 2.0 * model.J_f ** 2
    b = -2.0 * model.h_zi ** 2
    c = model.h_zi ** 2
    root = math.sqrt(4.0 * a * c - b * b)
    primitive = (2.0 / root) * (
        math.atan((2.0 * a * lam + b) / root) - math.atan(b / root)
    )
    return 0.5 * numerator * primitive


def _quad(func, lower: float, upper: float) -> float:
    result = integrate.quad(
        func, lower, upper, epsabs=QUAD_TOLERANCE, epsrel=QUAD_TOLERANCE, limit=200,
        full_output=1,
    )
    value, abserr = result[0], result[1]
    if len(result) > 3 and abserr > 100 * QUAD_TOLERANCE:
        raise QuadratureError(f"Quadrature failed: {result[3]} (error {abserr:.2e})")
    return value


def nu_lambda_f(model: ModelSchedules, tau: float = 1.0, parameterization: str = "time") -> float:
    """
    Oscillation frequency of the final fidelity in lambda_f,
    nu = (1/pi) * integral_0^tau dt lambda'(t) alpha(t).

    Args:
        parameterization: "time" integrates over t, "lambda" over lambda in [0, 1]
    """
    if parameterization == "time":
        sweep = SweepFunction(tau)
        value = _quad(
            lambda t: sweep.rate(t) * alpha_first_order(sweep.value(t), model), 0.0, tau
        )
    elif parameterization == "lambda":
        value = _quad(lambda lam: alpha_first_order(lam, model), 0.0, 1.0)
    else:
        raise UsageError(f"Unknown parameterization: {parameterization}")
    return value / math.pi


def lambda_f_opt(model: ModelSchedules, tau: float = 1.0) -> float:
    """Predicted optimal drive scale 1 / (4 nu)"""
    nu = nu_lambda_f(model, tau)
    if abs(nu) < 1e-15:
        raise NoDriveError(f"nu vanishes for h_xf={model.h_xf}; LCD term has no effect")
    return 1.0 / (4.0 * nu)


# Ansatz bases


@dataclass(frozen=True)
class AGPAnsatz:
    """Self-adjoint basis operators O_k of an approximate gauge potential"""

    basis: Sequence[PauliSum]
    labels: Sequence[str] = ()

    def __post_init__(self):
        if not self.basis:
            raise UsageError("Ansatz basis is empty")
        sizes = {op.size for op in self.basis}
        if len(sizes) != 1:
            raise UsageError(f"Ansatz operators have mixed sizes {sorted(sizes)}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"O{k}" for k in range(len(self.basis))))

    @property
    def size(self) -> int:
        return self.basis[0].size


def single_y_ansatz(size: int) -> AGPAnsatz:
    return AGPAnsatz((field_sum(size, "Y"),), ("Y",))


def two_body_ansatz(
    size: int, boundary: BoundaryCondition = BoundaryCondition.AUTO
) -> AGPAnsatz:
    """sum Y, sum (YZ + ZY), sum (YX + XY) over the model's bonds"""
    bond_list = bonds(size, boundary)
    return AGPAnsatz(
        (
            field_sum(size, "Y"),
            bond_sum(size, bond_list, "Y", "Z", symmetrize=True),
            bond_sum(size, bond_list, "Y", "X", symmetrize=True),
        ),
        ("Y", "YZ+ZY", "YX+XY"),
    )


def commutator_ansatz(H: PauliSum, dH: PauliSum, order: int) -> AGPAnsatz:
    """
    Nested-commutator basis O_k = i [H, [H, ... [H, dH]]] with 2k-1 commutators,
    k = 1..order.
    """
    if order < 1:
        raise UsageError(f"Ansatz order must be >= 1, got {order}")
    basis = []
    nested = dH
    for k in range(1, order + 1):
        nested = commutator(H, nested)
        basis.append(1j * nested)
        nested = commutator(H, nested)
    return AGPAnsatz(tuple(basis), tuple(f"C{2 * k - 1}" for k in range(1, order + 1)))


@dataclass
class VariationalSolution:
    coefficients: np.ndarray
    gram: np.ndarray
    rhs: np.ndarray
    action: float
    rank: int
    gauge_potential: PauliSum
    labels: List[str] = field(default_factory=list)


def solve_variational(
    H: PauliSum,
    dH: PauliSum,
    ansatz: AGPAnsatz,
    rank_tol: float = 1e-10,
) -> VariationalSolution:
    """
    Minimize the action S = <G, G> with G = dH + i [sum_k beta_k O_k, H].

    S is a positive-semidefinite quadratic in beta, so the minimizer solves the
    normal equations M beta = -b with M_kl = <C_k, C_l>, b_k = <C_k, dH> and
    C_k = i [O_k, H]. A singular M yields the minimum-norm solution.
    """
    if H.size != dH.size or H.size != ansatz.size:
        raise UsageError(f"Size mismatch: H={H.size}, dH={dH.size}, ansatz={ansatz.size}")
    if not H.is_self_adjoint() or not dH.is_self_adjoint():
        raise UsageError("H and dH must be self-adjoint")
    for label, op in zip(ansatz.labels, ansatz.basis):
        if not op.is_self_adjoint():
            raise UsageError(f"Ansatz operator {label} is not self-adjoint")

    n = len(ansatz.basis)
    overlap = np.array(
        [[hs_inner(a, b).real for b in ansatz.basis] for a in ansatz.basis]
    )
    basis_rank = int(np.linalg.matrix_rank(overlap, tol=rank_tol * max(1.0, np.abs(overlap).max())))
    if basis_rank < n:
        raise SingularAnsatzError("Ansatz basis is linearly dependent", basis_rank)

    generators = [(1j * commutator(op, H)).real() for op in ansatz.basis]
    gram = np.array([[hs_inner(a, b).real for b in generators] for a in generators])
    rhs = np.array([hs_inner(c, dH).real for c in generators])

    scale = max(1.0, float(np.abs(gram).max()))
    rank = int(np.linalg.matrix_rank(gram, tol=rank_tol * scale))
    if rank < n:
        logger.warning(f"Singular Gram matrix (rank {rank} of {n}); using minimum-norm solution")
    beta, *_ = np.linalg.lstsq(gram, -rhs, rcond=rank_tol)

    G = dH
    potential = PauliSum.zero(H.size)
    for coef, gen, op in zip(beta, generators, ansatz.basis):
        G = G + float(coef) * gen
        potential = potential + float(coef) * op
    action = hs_inner(G, G).real
    logger.debug(f"Variational solve: beta={beta}, action={action:.6g}")
    return VariationalSolution(
        coefficients=beta,
        gram=gram,
        rhs=rhs,
        action=action,
        rank=rank,
        gauge_potential=potential,
        labels=list(ansatz.labels),
    )


def exact_gauge_potential(
    H: PauliSum, dH: PauliSum, degeneracy_tol: float = 1e-9
) -> np.ndarray:
    """
    Dense exact gauge potential <m|A|n> = -i <m|dH|n> / (e_m - e_n), returned in
    the computational basis. Elements inside degenerate blocks are set to zero.
    """
    energies, vectors = np.linalg.eigh(to_dense(H))
    dH_eig = vectors.conj().T @ to_dense(dH) @ vectors
    gaps = energies[:, None] - energies[None, :]
    mask = np.abs(gaps) > degeneracy_tol
    A_eig = np.zeros_like(dH_eig)
    A_eig[mask] = -1j * dH_eig[mask] / gaps[mask]
    return vectors @ A_eig @ vectors.conj().T


def schedule_table(
    model: ModelSchedules, tau: float = 1.0, lambda_f: float = 1.0, samples: int = 201
) -> pd.DataFrame:
    """Driving amplitudes versus time, one row per sample"""
    sweep = SweepFunction(tau)
    rows = []
    for t in np.linspace(0.0, tau, samples):
        lam, rate = sweep(t)
        alpha = alpha_first_order(lam, model)
        rows.append({
            "t": t,
            "lambda": lam,
            "dlambda_dt": rate,
            "h_z": model.h_z(lam),
            "h_x": model.h_x(lam),
            "J": model.J(lam),
            "alpha": alpha,
            "cd_amplitude": lambda_f * rate * alpha,
        })
    return pd.DataFrame(rows)
