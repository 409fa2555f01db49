"""Tests for sweep schedules, the Ising builder and variational gauge potentials"""

import math

import numpy as np
import pytest

from src.algebra import PauliSum, commutator, to_dense
from src.schedules import (
    AGPAnsatz,
    BoundaryCondition,
    ModelSchedules,
    SweepFunction,
    alpha_first_order,
    alpha_integral,
    bonds,
    commutator_ansatz,
    exact_gauge_potential,
    lambda_f_opt,
    nu_lambda_f,
    schedule_table,
    single_y_ansatz,
    solve_variational,
    two_body_ansatz,
)
from src.utils.errors import (
    NoDriveError,
    RangeError,
    SingularAnsatzError,
    SingularityError,
    UsageError,
)

from oracles import tfim_dense


def test_sweep_endpoints():
    sweep = SweepFunction(tau=2.5)
    assert sweep.value(0.0) == 0.0
    assert sweep.value(2.5) == pytest.approx(1.0, abs=1e-15)
    assert sweep.rate(0.0) == 0.0
    assert sweep.rate(2.5) == pytest.approx(0.0, abs=1e-14)
    assert sweep.value(1.25) == pytest.approx(0.5)


def test_sweep_is_monotone():
    sweep = SweepFunction(tau=1.0)
    values = [sweep.value(t) for t in np.linspace(0.0, 1.0, 401)]
    assert np.all(np.diff(values) >= 0.0)
    assert all(sweep.rate(t) >= 0.0 for t in np.linspace(0.0, 1.0, 101))


def test_sweep_rate_matches_finite_difference():
    sweep = SweepFunction(tau=1.3)
    eps = 1e-6
    for t in (0.2, 0.65, 1.0):
        numeric = (sweep.value(t + eps) - sweep.value(t - eps)) / (2 * eps)
        assert sweep.rate(t) == pytest.approx(numeric, rel=1e-6, abs=1e-9)
        numeric2 = (sweep.rate(t + eps) - sweep.rate(t - eps)) / (2 * eps)
        assert sweep.acceleration(t) == pytest.approx(numeric2, rel=1e-5, abs=1e-6)


def test_sweep_rejects_times_outside_interval():
    sweep = SweepFunction(tau=1.0)
    with pytest.raises(RangeError):
        sweep.value(1.1)
    with pytest.raises(RangeError):
        sweep.rate(-0.1)
    with pytest.raises(UsageError):
        SweepFunction(tau=0.0)


def test_auto_boundary_follows_parity():
    assert BoundaryCondition.AUTO.resolve(4) is BoundaryCondition.PERIODIC
    assert BoundaryCondition.AUTO.resolve(5) is BoundaryCondition.ANTIPERIODIC
    assert [b.sign for b in bonds(5)] == [1.0, 1.0, 1.0, 1.0, -1.0]
    assert len(bonds(5, BoundaryCondition.OPEN)) == 4
    assert len(bonds(2, BoundaryCondition.PERIODIC)) == 1


def test_hamiltonian_matches_kronecker_oracle():
    model = ModelSchedules(h_xf=1.7, h_zi=0.8, J_f=1.1)
    lam = 0.37
    H = model.hamiltonian(lam, 4, BoundaryCondition.PERIODIC)
    expected = tfim_dense(4, model.h_z(lam), model.h_x(lam), model.J(lam), periodic=True)
    np.testing.assert_allclose(to_dense(H), expected, atol=1e-12)
    open_chain = model.hamiltonian(lam, 3, BoundaryCondition.OPEN)
    expected = tfim_dense(3, model.h_z(lam), model.h_x(lam), model.J(lam), periodic=False)
    np.testing.assert_allclose(to_dense(open_chain), expected, atol=1e-12)


def test_derivative_is_linear_slope():
    model = ModelSchedules(h_xf=2.0)
    dH = model.derivative(0.3, 3)
    diff = model.hamiltonian(0.8, 3) - model.hamiltonian(0.3, 3)
    assert diff.allclose(0.5 * dH, atol=1e-12)


def test_closed_form_alpha_matches_variational_single_y(rng):
    size = 4
    ansatz = single_y_ansatz(size)
    for _ in range(50):
        model = ModelSchedules(
            h_xf=float(rng.uniform(0.1, 5.0)),
            h_zi=float(rng.uniform(0.1, 3.0)),
            J_f=float(rng.uniform(0.2, 2.0)),
        )
        lam = float(rng.uniform(0.0, 1.0))
        solution = solve_variational(
            model.hamiltonian(lam, size), model.derivative(lam, size), ansatz
        )
        assert solution.coefficients[0] == pytest.approx(
            alpha_first_order(lam, model), rel=1e-10, abs=1e-12
        )


def test_alpha_at_endpoints():
    model = ModelSchedules(h_xf=2.0, h_zi=1.0, J_f=1.0)
    # lambda = 0: only h_z is nonzero
    assert alpha_first_order(0.0, model) == pytest.approx(0.5 * 2.0 / 1.0)
    # lambda = 1: h_z vanishes
    assert alpha_first_order(1.0, model) == pytest.approx(0.5 * 2.0 / (4.0 + 2.0))


def test_alpha_singular_when_couplings_vanish():
    model = ModelSchedules(h_xf=2.0, h_zi=0.0)
    with pytest.raises(SingularityError):
        alpha_first_order(0.0, model)


def test_nu_parameterizations_agree():
    for h_xf in (0.3, 1.0, 2.0, 7.5):
        model = ModelSchedules(h_xf=h_xf)
        by_time = nu_lambda_f(model, tau=1.0, parameterization="time")
        by_lambda = nu_lambda_f(model, parameterization="lambda")
        assert by_time == pytest.approx(by_lambda, rel=1e-8)
        assert by_lambda == pytest.approx(alpha_integral(1.0, model) / math.pi, rel=1e-9)


def test_nu_independent_of_duration():
    model = ModelSchedules(h_xf=2.0)
    assert nu_lambda_f(model, tau=3.0) == pytest.approx(nu_lambda_f(model, tau=1.0), rel=1e-8)


def test_unknown_parameterization_rejected():
    with pytest.raises(UsageError):
        nu_lambda_f(ModelSchedules(), parameterization="arc")


def test_lambda_f_opt_is_quarter_period():
    model = ModelSchedules(h_xf=2.0)
    assert lambda_f_opt(model) == pytest.approx(1.0 / (4.0 * nu_lambda_f(model)))
    assert lambda_f_opt(model) > 0.0


def test_no_drive_without_transverse_field():
    with pytest.raises(NoDriveError):
        lambda_f_opt(ModelSchedules(h_xf=0.0))
    assert alpha_integral(1.0, ModelSchedules(h_xf=0.0)) == 0.0


def test_exact_gauge_potential_makes_generator_diagonal():
    model = ModelSchedules(h_xf=1.3)
    lam = 0.4
    H = model.hamiltonian(lam, 4)
    dH = model.derivative(lam, 4)
    A = exact_gauge_potential(H, dH)
    dense_h, dense_dh = to_dense(H), to_dense(dH)
    G = dense_dh + 1j * (A @ dense_h - dense_h @ A)
    np.testing.assert_allclose(G @ dense_h - dense_h @ G, 0.0, atol=1e-8)
    np.testing.assert_allclose(A, A.conj().T, atol=1e-10)


def test_richer_ansatz_lowers_action():
    model = ModelSchedules(h_xf=1.5)
    lam = 0.5
    H = model.hamiltonian(lam, 4)
    dH = model.derivative(lam, 4)
    single = solve_variational(H, dH, single_y_ansatz(4))
    double = solve_variational(H, dH, two_body_ansatz(4))
    assert double.action <= single.action + 1e-12
    assert single.gauge_potential.is_self_adjoint()


def test_commutator_ansatz_first_order_spans_single_y():
    model = ModelSchedules(h_xf=1.5)
    H = model.hamiltonian(0.0, 3)
    dH = model.derivative(0.0, 3)
    ansatz = commutator_ansatz(H, dH, order=1)
    assert ansatz.basis[0].is_self_adjoint()
    # At lambda = 0 the first commutator is proportional to sum Y
    first = ansatz.basis[0]
    ratio = first.coefficient("YII")
    assert first.allclose(ratio * single_y_ansatz(3).basis[0], atol=1e-12)


def test_dependent_basis_rejected():
    y = single_y_ansatz(3).basis[0]
    ansatz = AGPAnsatz((y, 2.0 * y))
    model = ModelSchedules()
    with pytest.raises(SingularAnsatzError) as info:
        solve_variational(model.hamiltonian(0.5, 3), model.derivative(0.5, 3), ansatz)
    assert info.value.rank == 1


def test_non_self_adjoint_input_rejected():
    model = ModelSchedules()
    H = model.hamiltonian(0.5, 3)
    with pytest.raises(UsageError):
        solve_variational(1j * H, model.derivative(0.5, 3), single_y_ansatz(3))


def test_zero_hamiltonian_gives_zero_potential():
    size = 3
    zero = PauliSum.zero(size)
    dH = ModelSchedules().derivative(0.0, size)
    solution = solve_variational(zero, dH, single_y_ansatz(size))
    assert solution.rank == 0
    assert not solution.gauge_potential
    assert commutator(zero, dH).allclose(zero)


def test_single_y_gram_matches_coupling_norm():
    size = 4
    model = ModelSchedules(h_xf=1.7, h_zi=0.8, J_f=1.2)
    lam = 0.35
    h_z, h_x, J = model.h_z(lam), model.h_x(lam), model.J(lam)
    solution = solve_variational(
        model.hamiltonian(lam, size), model.derivative(lam, size), single_y_ansatz(size)
    )
    expected = size * (4 * h_z ** 2 + 4 * h_x ** 2 + 8 * J ** 2)
    assert solution.gram[0, 0] == pytest.approx(expected, rel=1e-12)
    # beta = -b / M reproduces the closed-form amplitude
    assert -solution.rhs[0] / solution.gram[0, 0] == pytest.approx(alpha_first_order(lam, model))


def test_uncoupled_chain_is_exact_landau_zener():
    size = 3
    model = ModelSchedules(h_xf=0.7, h_zi=1.0, J_f=0.0)
    lam = 0.3
    H = model.hamiltonian(lam, size)
    dH = model.derivative(lam, size)
    solution = solve_variational(H, dH, single_y_ansatz(size))
    h_z, h_x = model.h_z(lam), model.h_x(lam)
    expected = 0.5 * (-model.dh_z(lam) * h_x + model.dh_x(lam) * h_z) / (h_z ** 2 + h_x ** 2)
    assert solution.coefficients[0] == pytest.approx(expected, rel=1e-12)
    np.testing.assert_allclose(
        to_dense(solution.gauge_potential), exact_gauge_potential(H, dH), atol=1e-10
    )


def test_two_body_ansatz_matches_dense_least_squares():
    size = 6
    model = ModelSchedules(h_xf=0.5)
    lam = 0.5
    H = model.hamiltonian(lam, size)
    dH = model.derivative(lam, size)
    ansatz = two_body_ansatz(size)
    solution = solve_variational(H, dH, ansatz)

    dense_h = to_dense(H)
    columns = []
    for op in ansatz.basis:
        dense_op = to_dense(op)
        columns.append((1j * (dense_op @ dense_h - dense_h @ dense_op)).ravel())
    design = np.stack(columns, axis=1)
    beta, *_ = np.linalg.lstsq(design, -to_dense(dH).ravel(), rcond=None)
    np.testing.assert_allclose(beta.imag, 0.0, atol=1e-10)
    np.testing.assert_allclose(solution.coefficients, beta.real, atol=1e-10)


def test_first_commutator_potential_in_eigenbasis():
    # <m|A|n> = i beta (e_m - e_n) <m|dH|n> for A = beta i[H, dH]
    size = 4
    model = ModelSchedules(h_xf=0.5)
    lam = 0.6
    H = model.hamiltonian(lam, size)
    dH = model.derivative(lam, size)
    solution = solve_variational(H, dH, commutator_ansatz(H, dH, order=1))
    beta = solution.coefficients[0]

    energies, vectors = np.linalg.eigh(to_dense(H))
    A_eig = vectors.conj().T @ to_dense(solution.gauge_potential) @ vectors
    dH_eig = vectors.conj().T @ to_dense(dH) @ vectors
    gaps = energies[:, None] - energies[None, :]
    np.testing.assert_allclose(A_eig, 1j * beta * gaps * dH_eig, atol=1e-10)


def test_schedule_table_columns():
    model = ModelSchedules(h_xf=2.0)
    table = schedule_table(model, tau=1.0, lambda_f=0.5, samples=11)
    assert len(table) == 11
    assert list(table.columns) == [
        "t", "lambda", "dlambda_dt", "h_z", "h_x", "J", "alpha", "cd_amplitude",
    ]
    np.testing.assert_allclose(
        table["cd_amplitude"], 0.5 * table["dlambda_dt"] * table["alpha"]
    )
    assert table["cd_amplitude"].iloc[0] == 0.0
