"""Experiment application behind the command-line interface"""

import json
import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import Progress
from rich.table import Table

from .models import ResultsDatabase, init_db
from .protocols import (
    ProtocolKind,
    ProtocolSpec,
    RunResult,
    find_maxima,
    resolve_lambda_f,
    run,
    scaling_experiment,
    scan_h_xf,
    scan_lambda_f,
    target_state,
)
from .schedules import nu_lambda_f
from .trotter import (
    MeasurementBasis,
    estimate_energy,
    estimate_energy_exact,
    export_circuit,
    sample,
    simulate_circuit,
    synthesize,
    tomography,
)
from .trotter.tomography import MAX_TOMOGRAPHY_SITES
from .utils import ConfigError, write_csv, write_json
from .utils.config import ExperimentConfig

logger = logging.getLogger(__name__)
console = Console()

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
KIND_INDEX = {kind: index for index, kind in enumerate(ProtocolKind)}


def setup_logging(config: dict):
    """Rotating log file when ``logging.file`` is set, rich stderr handler otherwise"""
    log_config = config.get("logging", {})
    log_level = log_config.get("level", "INFO")
    log_file = log_config.get("file")

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handler = RotatingFileHandler(
            log_file,
            maxBytes=log_config.get("max_bytes", 10485760),
            backupCount=log_config.get("backup_count", 5),
        )
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
    else:
        handler = RichHandler(console=Console(stderr=True), show_path=False)

    logging.basicConfig(
        level=getattr(logging, log_level),
        handlers=[handler],
        force=True,
    )
    # numba's compiler is chatty at DEBUG
    logging.getLogger("numba").setLevel(logging.WARNING)


class ExperimentApp:
    """Runs the configured experiments and writes their data files"""

    def __init__(self, config: Dict[str, Any]):
        self.config = config
        self.settings = ExperimentConfig.from_dict(config)
        self.output_dir = self.settings.output_dir
        self.db: Optional[ResultsDatabase] = None
        if config["database"].get("enabled"):
            self.db = init_db(config["database"]["path"])

    def close(self):
        if self.db is not None:
            self.db.close()

    def _path(self, name: str) -> Path:
        return self.output_dir / name

    def _resolve(self, spec: ProtocolSpec, value: Union[str, float]) -> float:
        """lambda_f for a driven spec; optimization always runs on the bare LCD protocol"""
        if not spec.kind.driven:
            return 0.0
        return resolve_lambda_f(spec.replace(kind=ProtocolKind.LCD, lu=None), value)

    def _derive_seed(self, *keys: int) -> int:
        sequence = np.random.SeedSequence([self.settings.seed, *keys])
        return int(sequence.generate_state(1)[0])

    def _record_run(self, command: str, result: RunResult, trajectory_path: Optional[Path] = None):
        if self.db is None:
            return
        spec = result.spec
        self.db.add_run(
            command=command,
            kind=spec.kind.value,
            size=spec.size,
            h_xf=spec.h_xf,
            h_zi=spec.h_zi,
            J_f=spec.J_f,
            tau=spec.tau,
            boundary=spec.resolved_boundary.value,
            lambda_f=spec.lambda_f,
            final_fidelity=result.final_fidelity,
            pre_lu_fidelity=result.pre_lu_fidelity,
            final_energy=result.final_energy,
            energy_ratio=result.energy_ratio,
            spec_hash=spec.digest(),
            spec_json=json.dumps(spec.to_dict(), sort_keys=True),
            trajectory_path=str(trajectory_path) if trajectory_path else None,
        )

    # Commands

    def cmd_run(self) -> Dict[str, Path]:
        """One protocol: trajectory CSV plus summary JSON"""
        spec = self.settings.spec
        lam = self._resolve(spec, self.settings.lambda_f)
        spec = spec.replace(lambda_f=lam)
        result = run(spec, track_instantaneous=self.settings.track_instantaneous)

        stem = f"run_{spec.kind.value}_L{spec.size}"
        trajectory = write_csv(
            result.to_frame(), self._path(f"{stem}.csv"), self.config, {"command": "run"}
        )
        summary = result.summary()
        summary["lambda_f_source"] = self.settings.lambda_f if spec.kind.driven else None
        summary["peak_target_time"] = result.peak_target_time()
        summary_path = write_json(summary, self._path(f"{stem}.summary.json"))
        self._record_run("run", result, trajectory)

        table = Table(title=f"{spec.kind.value} L={spec.size} h_xf={spec.h_xf:g}")
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", justify="right")
        table.add_row("lambda_f", f"{lam:.6f}")
        table.add_row("F_final", f"{result.final_fidelity:.8f}")
        if spec.kind is ProtocolKind.LCDLU:
            table.add_row("F before LU", f"{result.pre_lu_fidelity:.8f}")
        table.add_row("E / E_grd", f"{result.energy_ratio:.8f}")
        table.add_row("Peak F_target at t", f"{result.peak_target_time():.4f}")
        console.print(table)
        return {"trajectory": trajectory, "summary": summary_path}

    def cmd_scan_lambda(self) -> Dict[str, Path]:
        """Final fidelity over the lambda_f grid, with nu and 1/(4 nu)"""
        spec = self.settings.spec.replace(kind=ProtocolKind.LCD, lu=None)
        grid = self.settings.lambda_grid
        nu = nu_lambda_f(spec.model, spec.tau)
        console.print(f"Scanning {len(grid)} lambda_f values at L={spec.size}, h_xf={spec.h_xf:g}")
        frame = scan_lambda_f(spec, grid, jobs=self.settings.jobs)

        maxima = find_maxima(frame["lambda_f"], frame["F_final"])
        summary = {
            "L": spec.size,
            "h_xf": spec.h_xf,
            "nu": nu,
            "lambda_f_opt": 0.25 / nu if nu != 0 else None,
            "period_predicted": 1.0 / nu if nu != 0 else None,
            "maxima": maxima.tolist(),
            "period_measured": float(maxima[1] - maxima[0]) if len(maxima) >= 2 else None,
        }
        stem = f"scan_lambda_L{spec.size}_hxf{spec.h_xf:g}"
        csv_path = write_csv(frame, self._path(f"{stem}.csv"), self.config, {"command": "scan-lambda"})
        summary_path = write_json(summary, self._path(f"{stem}.summary.json"))

        console.print(f"nu = {nu:.6f}, 1/(4 nu) = {summary['lambda_f_opt']}")
        if summary["period_measured"] is not None:
            console.print(
                f"Maxima spacing {summary['period_measured']:.4f} vs 1/nu = {summary['period_predicted']:.4f}"
            )
        return {"scan": csv_path, "summary": summary_path}

    def cmd_scan_hx(self) -> Dict[str, Path]:
        """Protocol comparison over the h_xf grid"""
        spec = self.settings.spec.replace(kind=ProtocolKind.LCD, lu=self.settings.lu)
        frame = scan_h_xf(
            spec,
            self.settings.h_xf_grid,
            kinds=self.settings.scan_kinds,
            lambda_f_mode=self.settings.scan_lambda_mode,
            jobs=self.settings.jobs,
            lu_modes=self.settings.scan_lu_modes,
        )
        csv_path = write_csv(
            frame, self._path(f"scan_hx_L{spec.size}.csv"), self.config, {"command": "scan-hx"}
        )
        pivot = frame.pivot_table(index="h_xf", columns="kind", values="F_final")
        table = Table(title=f"Final fidelity, L={spec.size}")
        table.add_column("h_xf", justify="right")
        for column in pivot.columns:
            table.add_column(str(column), justify="right")
        for h_xf, row in pivot.iterrows():
            table.add_row(f"{h_xf:.4g}", *[f"{v:.6f}" for v in row.values])
        console.print(table)
        return {"scan": csv_path}

    def cmd_scaling(self) -> Dict[str, Path]:
        """Final fidelity versus L per kind, with exponential fits"""
        sizes = self.settings.scaling_sizes
        if len(set(sizes)) < 2:
            raise ConfigError(f"scaling.sizes needs at least two distinct L for a fit, got {list(sizes)}")
        template = self.settings.spec.replace(kind=ProtocolKind.LCD, lu=self.settings.lu)
        console.print(f"Scaling experiment over L={list(sizes)} at h_xf={template.h_xf:g}")
        report = scaling_experiment(
            template,
            sizes,
            kinds=self.settings.scaling_kinds,
            lambda_f_mode=self.settings.scaling_lambda_mode,
            optimize_limit=self.settings.optimize_limit,
            jobs=self.settings.jobs,
            lu_mode=self.settings.scaling_lu_mode,
        )

        stem = f"scaling_hxf{template.h_xf:g}"
        csv_path = write_csv(report.table, self._path(f"{stem}.csv"), self.config, {"command": "scaling"})
        fits = {
            "h_xf": template.h_xf,
            "lambda_f": {str(L): lam for L, lam in sorted(report.lambda_f.items())},
            "fits": {kind: fit.to_dict() for kind, fit in report.fits.items()},
            "partial": report.partial,
            "errors": report.errors,
        }
        fits_path = write_json(fits, self._path(f"{stem}.fits.json"))

        if self.db is not None:
            for kind, fit in report.fits.items():
                self.db.add_scaling_fit(
                    kind=kind,
                    h_xf=template.h_xf,
                    c=fit.c,
                    a=fit.a,
                    sizes=fit.sizes,
                    residual_norm=float(np.linalg.norm(fit.residuals)),
                    partial=report.partial,
                )

        table = Table(title=f"log2 F = -c L + a, h_xf={template.h_xf:g}")
        table.add_column("Kind", style="cyan")
        table.add_column("c", justify="right")
        table.add_column("a", justify="right")
        for kind, fit in report.fits.items():
            table.add_row(kind, f"{fit.c:.4f}", f"{fit.a:.4f}")
        console.print(table)

        if report.partial:
            console.print("[yellow]Scaling experiment incomplete; partial results written[/yellow]")
            raise RuntimeError(f"Scaling experiment incomplete: {'; '.join(report.errors)}")
        return {"scaling": csv_path, "fits": fits_path}

    def cmd_trotter(self) -> Dict[str, Path]:
        """
        Digitized protocols: shot-based energies and ratios per (L, kind, T),
        Z-basis histograms, optional QASM files and tomography at small L.
        """
        s = self.settings
        rows: List[Dict[str, Any]] = []
        tomo_rows: List[Dict[str, Any]] = []
        histograms: Dict[str, Any] = {}
        written: Dict[str, Path] = {}

        total = len(s.trotter_sizes) * len(s.trotter_kinds) * len(s.trotter_steps)
        with Progress(console=console, transient=True) as progress:
            task = progress.add_task("Trotter circuits", total=total)
            for L in s.trotter_sizes:
                base = s.spec.replace(size=L, kind=ProtocolKind.LCD, lu=None)
                lam = self._resolve(base, s.lambda_f)
                ground = target_state(base).energy
                for kind in s.trotter_kinds:
                    spec = base.replace(
                        kind=kind,
                        lambda_f=lam if kind.driven else 0.0,
                        lu=s.lu if kind is ProtocolKind.LCDLU else None,
                    )
                    for steps in s.trotter_steps:
                        key = f"{kind.value}_L{L}_T{steps}"
                        circuit = synthesize(spec, steps)
                        psi = simulate_circuit(circuit)
                        seeds = [self._derive_seed(L, KIND_INDEX[kind], steps, b) for b in (0, 1)]
                        rec_z = sample(psi, MeasurementBasis.Z, s.shots, seeds[0])
                        rec_x = sample(psi, MeasurementBasis.X, s.shots, seeds[1])
                        estimate = estimate_energy(rec_z, rec_x, spec.h_xf, spec.J_f, spec.boundary)
                        exact = estimate_energy_exact(psi, spec.h_xf, spec.J_f, spec.boundary)
                        rows.append({
                            "L": L,
                            "kind": kind.value,
                            "trotter_steps": steps,
                            "lambda_f": spec.lambda_f,
                            "E_estimate": estimate.energy,
                            "E_stderr": estimate.stderr,
                            "E_exact": exact.energy,
                            "E_ground": ground,
                            "ratio": estimate.energy / ground,
                            "ratio_exact": exact.energy / ground,
                            "F_target": target_state(spec).weight(psi),
                            "gates": len(circuit),
                        })
                        histograms[key] = rec_z.to_json()

                        if s.qasm:
                            qasm_path = self._path(f"circuits/{key}.qasm")
                            qasm_path.parent.mkdir(parents=True, exist_ok=True)
                            qasm_path.write_text(export_circuit(circuit, "qasm2"), encoding="utf-8")

                        if s.tomography and L <= MAX_TOMOGRAPHY_SITES:
                            result = tomography(
                                circuit,
                                s.tomography_shots,
                                seed=self._derive_seed(L, KIND_INDEX[kind], steps, 2),
                                target=psi,
                            )
                            tomo_rows.append({
                                "L": L,
                                "kind": kind.value,
                                "trotter_steps": steps,
                                "fidelity": result.fidelity,
                                "min_eigenvalue_raw": float(np.linalg.eigvalsh(result.raw_density).min()),
                                "settings": result.settings,
                                "shots_per_setting": result.shots_per_setting,
                            })
                        logger.info(
                            f"{key}: E={estimate.energy:.6f} +- {estimate.stderr:.6f} "
                            f"(exact {exact.energy:.6f}), ratio={estimate.energy / ground:.6f}"
                        )
                        progress.advance(task)

        frame = pd.DataFrame(rows)
        written["energies"] = write_csv(frame, self._path("trotter_energies.csv"), self.config, {"command": "trotter"})
        written["histograms"] = write_json(histograms, self._path("trotter_histograms.json"))
        if tomo_rows:
            written["tomography"] = write_csv(
                pd.DataFrame(tomo_rows), self._path("trotter_tomography.csv"), self.config, {"command": "trotter"}
            )
        if s.tomography and not tomo_rows:
            logger.warning(f"Tomography skipped: no size <= {MAX_TOMOGRAPHY_SITES} in trotter.sizes")

        table = Table(title="Energy ratio <H_0>/E_grd")
        table.add_column("L", justify="right")
        table.add_column("Kind", style="cyan")
        table.add_column("T", justify="right")
        table.add_column("Ratio (shots)", justify="right")
        table.add_column("Ratio (exact)", justify="right")
        for row in rows:
            table.add_row(
                str(row["L"]), row["kind"], str(row["trotter_steps"]),
                f"{row['ratio']:.4f}", f"{row['ratio_exact']:.4f}",
            )
        console.print(table)
        return written

    def cmd_export_circuit(self, fmt: str = "qasm2", output: Optional[str] = None) -> Path:
        """Write the Trotter circuit of the configured protocol"""
        spec = self.settings.spec
        spec = spec.replace(lambda_f=self._resolve(spec, self.settings.lambda_f))
        circuit = synthesize(spec)
        text = export_circuit(circuit, fmt)
        suffix = "qasm" if fmt == "qasm2" else "json"
        path = Path(output) if output else self._path(
            f"circuit_{spec.kind.value}_L{spec.size}_T{spec.trotter_steps}.{suffix}"
        )
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        console.print(f"Circuit with {len(circuit)} gates written to {path}")
        return path

    def show_results(
        self, kind: Optional[str] = None, command: Optional[str] = None, limit: Optional[int] = None
    ) -> int:
        """Print stored runs and fits; returns the number of runs shown"""
        db = self.db
        if db is None:
            db_path = Path(self.config["database"]["path"])
            if not db_path.exists():
                console.print(f"[yellow]No results database at {db_path}[/yellow]")
                return 0
            db = init_db(str(db_path))
        try:
            runs = db.get_runs(kind=kind, command=command, limit=limit)
            table = Table(title=f"Stored runs ({len(runs)})")
            for column in ("Time", "Command", "Kind", "L", "h_xf", "lambda_f", "F_final", "E/E_grd"):
                table.add_column(column, justify="right" if column not in ("Command", "Kind") else "left")
            for record in runs:
                table.add_row(
                    record.timestamp.strftime("%Y-%m-%d %H:%M:%S"),
                    record.command,
                    record.kind,
                    str(record.size),
                    f"{record.h_xf:g}",
                    f"{record.lambda_f:.6f}",
                    f"{record.final_fidelity:.8f}",
                    f"{record.energy_ratio:.6f}" if record.energy_ratio is not None else "-",
                )
            console.print(table)

            fits = db.get_scaling_fits(kind=kind)
            if fits:
                fit_table = Table(title="Scaling fits")
                for column in ("Kind", "h_xf", "c", "a", "L"):
                    fit_table.add_column(column)
                for record in fits:
                    fit_table.add_row(
                        record.kind, f"{record.h_xf:g}", f"{record.c:.4f}", f"{record.a:.4f}", record.sizes
                    )
                console.print(fit_table)
            return len(runs)
        finally:
            if db is not self.db:
                db.close()
