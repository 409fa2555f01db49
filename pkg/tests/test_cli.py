"""End-to-end tests of the command-line interface"""

import json
import logging

import pandas as pd
import pytest
from click.testing import CliRunner

from lcdsim import EXIT_CONFIG, EXIT_RUNTIME, cli
from src.trotter import parse_json, parse_qasm


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()


def invoke(out, *args):
    runner = CliRunner()
    return runner.invoke(cli, ["--out", str(out), *args], obj={})


def test_run_writes_trajectory_and_summary(tmp_path):
    result = invoke(tmp_path, "run", "--kind", "lcd", "--L", "3", "--samples", "11")
    assert result.exit_code == 0, result.output
    trajectory = pd.read_csv(tmp_path / "run_lcd_L3.csv")
    assert len(trajectory) == 11
    assert list(trajectory.columns) == ["t", "F_instantaneous", "F_target", "norm_drift", "energy"]
    summary = json.loads((tmp_path / "run_lcd_L3.summary.json").read_text(encoding="utf-8"))
    assert summary["lambda_f_source"] == "auto"
    assert summary["lambda_f"] > 0.0
    assert 0.0 <= summary["F_final"] <= 1.0 + 1e-9
    assert summary["F_pre_lu"] is None
    assert 0.0 <= summary["peak_target_time"] <= 1.0


def test_lcd_run_beats_zero_drive(tmp_path):
    result = invoke(tmp_path, "run", "--L", "3", "--samples", "5")
    assert result.exit_code == 0, result.output
    driven = json.loads((tmp_path / "run_lcd_L3.summary.json").read_text(encoding="utf-8"))
    plain = tmp_path / "plain"
    result = invoke(plain, "run", "--L", "3", "--samples", "5", "--lambda-f", "0")
    assert result.exit_code == 0, result.output
    undriven = json.loads((plain / "run_lcd_L3.summary.json").read_text(encoding="utf-8"))
    assert undriven["lambda_f"] == 0.0
    assert driven["F_final"] > undriven["F_final"]


def test_lcdlu_run_reports_pre_lu_fidelity(tmp_path):
    result = invoke(tmp_path, "run", "--kind", "lcdlu", "--L", "3", "--samples", "5", "--no-instantaneous")
    assert result.exit_code == 0, result.output
    summary = json.loads((tmp_path / "run_lcdlu_L3.summary.json").read_text(encoding="utf-8"))
    assert summary["F_pre_lu"] is not None
    assert summary["spec"]["lu"] is not None
    trajectory = pd.read_csv(tmp_path / "run_lcdlu_L3.csv")
    assert trajectory["F_instantaneous"].isna().all()


def test_csv_files_use_crlf_and_sidecar(tmp_path):
    result = invoke(tmp_path, "run", "--L", "2", "--samples", "3")
    assert result.exit_code == 0, result.output
    data = (tmp_path / "run_lcd_L2.csv").read_bytes()
    assert data.count(b"\r\n") == 4
    assert data.count(b"\n") == data.count(b"\r\n")
    meta = json.loads((tmp_path / "run_lcd_L2.meta.json").read_text(encoding="utf-8"))
    assert meta["rows"] == 3
    assert meta["command"] == "run"
    assert meta["config"]["model"]["L"] == 2


def test_scan_lambda_writes_summary(tmp_path):
    result = invoke(tmp_path, "scan-lambda", "--L", "3", "--grid", "0:1:0.5")
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(tmp_path / "scan_lambda_L3_hxf2.csv")
    assert list(frame["lambda_f"]) == pytest.approx([0.0, 0.5, 1.0])
    summary = json.loads((tmp_path / "scan_lambda_L3_hxf2.summary.json").read_text(encoding="utf-8"))
    assert summary["lambda_f_opt"] == pytest.approx(0.25 / summary["nu"])


@pytest.mark.parametrize(
    "args",
    [
        ("scan-lambda", "--grid", ""),
        ("scan-lambda", "--grid", "1:2"),
        ("scaling", "--sizes", "4"),
        ("scaling", "--sizes", "4,4"),
        ("scaling", "--lu-mode", "bogus"),
        ("run", "--L", "1"),
        ("run", "--lu", "q:1"),
        ("trotter", "--steps", "0"),
    ],
)
def test_configuration_errors_exit_with_config_code(tmp_path, args):
    result = invoke(tmp_path, *args)
    assert result.exit_code == EXIT_CONFIG
    assert "Configuration error" in result.output


def test_bad_config_files(tmp_path):
    runner = CliRunner()
    result = runner.invoke(cli, ["--config", str(tmp_path / "missing.yml"), "run"], obj={})
    assert result.exit_code == EXIT_CONFIG
    broken = tmp_path / "broken.yml"
    broken.write_text("model: [1\n", encoding="utf-8")
    result = runner.invoke(cli, ["--config", str(broken), "run"], obj={})
    assert result.exit_code == EXIT_CONFIG


def test_missing_drive_is_runtime_error(tmp_path):
    result = invoke(tmp_path, "run", "--hxf", "0", "--lambda-f", "auto", "--L", "3")
    assert result.exit_code == EXIT_RUNTIME
    assert not (tmp_path / "run_lcd_L3.csv").exists()


def test_export_circuit_formats(tmp_path):
    result = invoke(tmp_path, "export-circuit", "--kind", "lcd", "--L", "3", "--steps", "4")
    assert result.exit_code == 0, result.output
    circuit = parse_qasm((tmp_path / "circuit_lcd_L3_T4.qasm").read_text(encoding="utf-8"))
    assert circuit.size == 3
    assert circuit.counts()["RZZ"] == 12

    target = tmp_path / "custom" / "circuit.json"
    result = invoke(
        tmp_path, "export-circuit", "--kind", "lcdlu", "--L", "2", "--steps", "3",
        "--format", "json", "--output", str(target),
    )
    assert result.exit_code == 0, result.output
    parsed = parse_json(target.read_text(encoding="utf-8"))
    assert parsed.size == 2
    assert parsed.metadata["trotter_steps"] == 3


def test_trotter_outputs_are_seeded(tmp_path):
    args = ("--seed", "5", "trotter", "--sizes", "2", "--steps", "4", "--shots", "200", "--kinds", "lcd", "--qasm")
    first, second = tmp_path / "a", tmp_path / "b"
    assert invoke(first, *args).exit_code == 0
    assert invoke(second, *args).exit_code == 0
    for name in ("trotter_energies.csv", "trotter_histograms.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    assert (first / "circuits" / "lcd_L2_T4.qasm").exists()
    energies = pd.read_csv(first / "trotter_energies.csv")
    assert len(energies) == 1
    assert energies["E_stderr"].iloc[0] > 0.0
    histograms = json.loads((first / "trotter_histograms.json").read_text(encoding="utf-8"))
    assert list(histograms) == ["lcd_L2_T4"]


def test_trotter_tomography_table(tmp_path):
    result = invoke(
        tmp_path, "trotter", "--sizes", "2", "--steps", "10", "--shots", "100",
        "--kinds", "lcd", "--tomography", "--tomography-shots", "200",
    )
    assert result.exit_code == 0, result.output
    tomo = pd.read_csv(tmp_path / "trotter_tomography.csv")
    assert len(tomo) == 1
    assert tomo["settings"].iloc[0] == 9
    assert 0.0 <= tomo["fidelity"].iloc[0] <= 1.0 + 1e-9


def test_scaling_reruns_are_identical(tmp_path):
    args = ("scaling", "--sizes", "3,4", "--kinds", "adiabatic,lcd", "--lambda-f-mode", "auto")
    assert invoke(tmp_path, *args).exit_code == 0
    names = ("scaling_hxf2.csv", "scaling_hxf2.fits.json", "scaling_hxf2.meta.json")
    first = {name: (tmp_path / name).read_bytes() for name in names}
    assert invoke(tmp_path, *args).exit_code == 0
    for name in names:
        assert (tmp_path / name).read_bytes() == first[name]
    fits = json.loads(first["scaling_hxf2.fits.json"])
    assert set(fits["fits"]) == {"adiabatic", "lcd"}
    assert fits["partial"] is False


def test_results_lists_stored_runs(tmp_path, monkeypatch):
    monkeypatch.setenv("LCDSIM_DB_PATH", str(tmp_path / "db" / "runs.db"))
    assert invoke(tmp_path, "run", "--L", "2", "--samples", "3").exit_code == 0
    assert invoke(tmp_path, "run", "--kind", "adiabatic", "--L", "2", "--samples", "3").exit_code == 0
    result = invoke(tmp_path, "results", "--kind", "lcd")
    assert result.exit_code == 0, result.output
    assert "Stored runs (1)" in result.output
    result = invoke(tmp_path, "results")
    assert "Stored runs (2)" in result.output
