"""Tests for Trotter circuits, shot sampling, tomography and circuit export"""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from src.engine import StateVector, expectation, fidelity
from src.protocols import LocalUnitaryParams, ProtocolKind, ProtocolSpec, final_state
from src.schedules import lambda_f_opt
from src.trotter import (
    Circuit,
    Gate,
    GateKind,
    MeasurementBasis,
    ShotRecord,
    estimate_energy,
    estimate_energy_exact,
    exact_distribution,
    export_circuit,
    measurement_settings,
    parse_json,
    parse_qasm,
    project_to_physical,
    sample,
    simulate_circuit,
    synthesize,
    tomography,
)
from src.utils.errors import CapabilityError, UsageError

from oracles import dense_label, random_state


def lcd_spec(size=4, h_xf=2.0, **kwargs):
    spec = ProtocolSpec(size=size, h_xf=h_xf, kind=ProtocolKind.LCD, **kwargs)
    return spec.replace(lambda_f=lambda_f_opt(spec.model, spec.tau))


# Gates and circuits


def test_gate_validation():
    with pytest.raises(UsageError):
        Gate(GateKind.RZZ, (1, 1), 0.1)
    with pytest.raises(UsageError):
        Gate(GateKind.RX, (0, 1), 0.1)
    with pytest.raises(UsageError):
        Gate(GateKind.RZ, (-1,), 0.1)
    with pytest.raises(ValueError):
        Gate("CZ", (0, 1), 0.1)


def test_circuit_validation():
    with pytest.raises(UsageError):
        Circuit(2, [Gate(GateKind.RX, (2,), 0.1)])
    with pytest.raises(UsageError):
        Circuit(2, metadata={"trotter_steps": 0})
    circuit = Circuit(2)
    with pytest.raises(UsageError):
        circuit.append(Gate(GateKind.RZZ, (0, 3), 0.1))
    circuit.add_rotation(GateKind.RX, (0,), 0.0)
    assert len(circuit) == 0


def test_rx_pi_flips_qubit():
    circuit = Circuit(1, [Gate(GateKind.RX, (0,), math.pi)])
    psi = simulate_circuit(circuit, StateVector.from_bitstring("0"))
    np.testing.assert_allclose(psi.amplitudes, [0.0, -1j], atol=1e-15)


def test_rzz_matches_matrix_exponential(rng):
    psi = StateVector(random_state(rng, 3))
    circuit = Circuit(3, [Gate(GateKind.RZZ, (0, 2), 0.7)])
    expected = expm(-0.35j * dense_label("ZIZ")) @ psi.amplitudes
    np.testing.assert_allclose(simulate_circuit(circuit, psi).amplitudes, expected, atol=1e-12)


def test_single_site_rotations_match_matrix_exponential(rng):
    psi = StateVector(random_state(rng, 2))
    for kind, label in ((GateKind.RX, "IX"), (GateKind.RY, "IY"), (GateKind.RZ, "IZ")):
        circuit = Circuit(2, [Gate(kind, (1,), 1.1)])
        expected = expm(-0.55j * dense_label(label)) @ psi.amplitudes
        np.testing.assert_allclose(
            simulate_circuit(circuit, psi).amplitudes, expected, atol=1e-12
        )


def test_synthesized_layers():
    spec = lcd_spec(size=3)
    circuit = synthesize(spec, trotter_steps=5)
    counts = circuit.counts()
    assert counts["RZ"] == counts["RX"] == counts["RY"] == 15
    assert counts["RZZ"] == 15
    assert circuit.metadata["trotter_steps"] == 5
    assert circuit.metadata["initial"] == "111"
    adiabatic = synthesize(spec.replace(kind=ProtocolKind.ADIABATIC, lambda_f=0.0), 5)
    assert "RY" not in adiabatic.counts()
    with pytest.raises(UsageError):
        synthesize(spec, trotter_steps=0)


def test_lcdlu_circuit_ends_with_local_unitary():
    spec = lcd_spec(size=3).replace(kind=ProtocolKind.LCDLU, lu=LocalUnitaryParams.fixed_x())
    circuit = synthesize(spec, trotter_steps=2)
    tail = circuit.gates[-3:]
    assert [g.kind for g in tail] == [GateKind.RX] * 3
    assert [g.sites for g in tail] == [(0,), (1,), (2,)]
    assert all(g.angle == pytest.approx(math.pi / 4) for g in tail)


def test_trotter_circuit_converges_to_continuous_evolution():
    spec = lcd_spec(size=4, h_xf=2.0, tolerance=1e-10)
    _, continuous = final_state(spec)
    infidelities = []
    for steps in (20, 40, 80):
        digitized = simulate_circuit(synthesize(spec, steps))
        infidelities.append(1.0 - fidelity(digitized, continuous))
    assert infidelities[0] <= 0.01
    assert infidelities[0] > infidelities[1] > infidelities[2]


# Sampling


def test_sampling_is_seeded(rng):
    psi = StateVector(random_state(rng, 3))
    first = sample(psi, MeasurementBasis.Z, 500, seed=11)
    again = sample(psi, MeasurementBasis.Z, 500, seed=11)
    other = sample(psi, MeasurementBasis.Z, 500, seed=12)
    assert first.counts == again.counts
    assert first.counts != other.counts
    assert sum(first.counts.values()) == 500
    assert all(len(bits) == 3 for bits in first.counts)


def test_sampling_frequencies_follow_born_rule(rng):
    shots = 100_000
    for seed in range(5):
        psi = StateVector(random_state(rng, 3))
        for basis in MeasurementBasis:
            probs = exact_distribution(psi, basis)
            record = sample(psi, basis, shots, seed=seed)
            for index, p in enumerate(probs):
                bound = 5.0 * math.sqrt(p * (1.0 - p) / shots) + 1e-12
                assert abs(record.frequency(format(index, "03b")) - p) <= bound


def test_x_basis_readout():
    plus = StateVector.product([[1.0, 1.0], [1.0, -1.0]])
    probs = exact_distribution(plus, MeasurementBasis.X)
    np.testing.assert_allclose(probs, [0.0, 1.0, 0.0, 0.0], atol=1e-15)


def test_shot_record_validation():
    with pytest.raises(UsageError):
        ShotRecord("Z", {"00": 3}, 4)
    with pytest.raises(UsageError):
        ShotRecord("Z", {}, 0)
    with pytest.raises(UsageError):
        ShotRecord("Z", {"00": 1, "1": 1}, 2)
    with pytest.raises(ValueError):
        ShotRecord("Y", {"0": 1}, 1)
    record = ShotRecord("X", {"10": 2, "01": 1}, 3, seed=5)
    assert list(record.counts) == ["01", "10"]
    assert ShotRecord.from_json(record.to_json()) == record


def test_exact_energy_estimator_matches_expectation():
    spec = lcd_spec(size=4, h_xf=0.5)
    _, psi = final_state(spec)
    exact = estimate_energy_exact(psi, spec.h_xf, spec.J_f, spec.boundary)
    target_h = spec.model.target_hamiltonian(spec.size, spec.boundary)
    assert exact.energy == pytest.approx(expectation(target_h, psi), abs=1e-10)
    assert exact.stderr == 0.0
    assert exact.energy == pytest.approx(exact.zz + exact.x)


def test_shot_energy_within_statistical_error():
    spec = lcd_spec(size=4, h_xf=0.5)
    _, psi = final_state(spec)
    rec_z = sample(psi, MeasurementBasis.Z, 1000, seed=3)
    rec_x = sample(psi, MeasurementBasis.X, 1000, seed=4)
    estimate = estimate_energy(rec_z, rec_x, spec.h_xf, spec.J_f, spec.boundary)
    exact = estimate_energy_exact(psi, spec.h_xf, spec.J_f, spec.boundary)
    assert estimate.stderr > 0.0
    assert abs(estimate.energy - exact.energy) <= 3.0 * estimate.stderr


def test_energy_estimator_checks_bases():
    z = ShotRecord("Z", {"00": 1}, 1)
    with pytest.raises(UsageError):
        estimate_energy(z, z, 1.0)
    with pytest.raises(UsageError):
        estimate_energy(z, ShotRecord("X", {"000": 1}, 1), 1.0)


def test_classical_state_energy():
    # |0101> on a periodic ring: every bond anti-aligned
    rec_z = ShotRecord("Z", {"0101": 10}, 10)
    rec_x = ShotRecord("X", {"0000": 5, "1111": 5}, 10)
    estimate = estimate_energy(rec_z, rec_x, h_xf=0.5, J_f=1.0)
    assert estimate.zz == pytest.approx(-4.0)
    assert estimate.x == pytest.approx(0.0)
    assert estimate.energy == pytest.approx(-4.0)


# Tomography


def test_measurement_settings_count():
    assert len(measurement_settings(4)) == 81
    assert measurement_settings(1) == [("X",), ("Y",), ("Z",)]


def test_exact_tomography_reproduces_state():
    spec = lcd_spec(size=4, h_xf=0.5)
    circuit = synthesize(spec, 20)
    psi = simulate_circuit(circuit)
    result = tomography(circuit, shots_per_setting=None, target=psi)
    expected = np.outer(psi.amplitudes, psi.amplitudes.conj())
    assert np.max(np.abs(result.density - expected)) <= 1e-10
    assert result.fidelity == pytest.approx(1.0, abs=1e-10)
    assert result.settings == 81


def test_sampled_tomography_is_physical():
    spec = lcd_spec(size=2, h_xf=0.5)
    circuit = synthesize(spec, 20)
    psi = simulate_circuit(circuit)
    result = tomography(circuit, shots_per_setting=400, seed=1, target=psi)
    assert np.trace(result.density).real == pytest.approx(1.0, abs=1e-12)
    assert result.min_eigenvalue >= -1e-12
    np.testing.assert_allclose(result.density, result.density.conj().T, atol=1e-12)
    assert result.fidelity >= 0.95
    again = tomography(circuit, shots_per_setting=400, seed=1, target=psi)
    np.testing.assert_array_equal(result.density, again.density)


def test_projection_spreads_negative_mass_evenly(rng):
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    raw = (q * np.array([0.6, 0.5, 0.02, -0.12])) @ q.conj().T
    projected = project_to_physical(raw)
    expected = (q * np.array([0.55, 0.45, 0.0, 0.0])) @ q.conj().T
    np.testing.assert_allclose(projected, expected, atol=1e-12)

    physical = (q * np.array([0.5, 0.3, 0.2, 0.0])) @ q.conj().T
    np.testing.assert_allclose(project_to_physical(physical), physical, atol=1e-12)


def test_tomography_size_limit():

    with pytest.raises(CapabilityError):
        tomography(Circuit(5))
    with pytest.raises(UsageError):
        tomography(Circuit(2), shots_per_setting=0)


# Export


def test_qasm_round_trip():
    spec = lcd_spec(size=3).replace(kind=ProtocolKind.LCDLU, lu=LocalUnitaryParams.fixed_x())
    circuit = synthesize(spec, 3)
    text = export_circuit(circuit, "qasm2")
    assert text.startswith('OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[3];')
    assert "cx q[0],q[1];" in text
    assert "x q[2];" in text
    parsed = parse_qasm(text)
    assert parsed.size == 3
    assert parsed.gates == circuit.gates
    assert parsed.metadata == circuit.metadata
    assert fidelity(simulate_circuit(parsed), simulate_circuit(circuit)) == pytest.approx(1.0)


def test_qasm_x_gates_set_initial_state():
    text = 'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[3];\nx q[0];\nx q[2];\nrz(0.5) q[1];\n'
    parsed = parse_qasm(text)
    assert parsed.metadata == {"initial": "101"}
    assert len(parsed) == 1
    assert export_circuit(Circuit(2), "qasm2") == 'OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[2];\n'


def test_json_round_trip_keeps_metadata():
    circuit = synthesize(lcd_spec(size=2), 4)
    parsed = parse_json(export_circuit(circuit, "json"))
    assert parsed.gates == circuit.gates
    assert parsed.metadata == circuit.metadata


def test_export_rejects_unknown_format():
    with pytest.raises(UsageError):
        export_circuit(Circuit(1), "qasm3")


@pytest.mark.parametrize(
    "text",
    [
        "OPENQASM 3;\ninclude \"qelib1.inc\";\nqreg q[1];\n",
        "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\nh q[0];\n",
        "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncx q[0],q[1];\n",
        "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\nrx(0.5) q[3];\n",
    ],
)
def test_malformed_qasm_rejected(text):
    with pytest.raises(UsageError):
        parse_qasm(text)


def test_malformed_json_rejected():
    with pytest.raises(UsageError):
        parse_json("{\"L\": 2}")
    with pytest.raises(UsageError):
        parse_json("not json")
