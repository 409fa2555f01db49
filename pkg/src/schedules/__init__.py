"""Schedules, the Ising model builder and variational gauge potentials"""

from .model import (
    BoundaryCondition,
    Bond,
    bonds,
    bond_sum,
    IsingOperators,
    SweepFunction,
    lambda_of_t,
    ModelSchedules,
)
from .agp import (
    alpha_first_order,
    alpha_integral,
    nu_lambda_f,
    lambda_f_opt,
    AGPAnsatz,
    single_y_ansatz,
    two_body_ansatz,
    commutator_ansatz,
    VariationalSolution,
    solve_variational,
    exact_gauge_potential,
    schedule_table,
)

__all__ = [
    "BoundaryCondition",
    "Bond",
    "bonds",
    "bond_sum",
    "IsingOperators",
    "SweepFunction",
    "lambda_of_t",
    "ModelSchedules",
    "alpha_first_order",
    "alpha_integral",
    "nu_lambda_f",
    "lambda_f_opt",
    "AGPAnsatz",
    "single_y_ansatz",
    "two_body_ansatz",
    "commutator_ansatz",
    "VariationalSolution",
    "solve_variational",
    "exact_gauge_potential",
    "schedule_table",
]
