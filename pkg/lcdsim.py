#!/usr/bin/env python3
"""
LCD Simulator - Main CLI
"""

import logging
import sys
import click
from pathlib import Path
from typing import Any, Callable, Dict, Optional

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from src.utils import ConfigError
from src.utils.config import load_config, parse_grid_option

logger = logging.getLogger("lcdsim")

EXIT_RUNTIME = 1
EXIT_CONFIG = 2

KIND_CHOICE = click.Choice(["adiabatic", "linear", "lcd", "lcdlu"], case_sensitive=False)
BOUNDARY_CHOICE = click.Choice(["auto", "periodic", "antiperiodic", "open"], case_sensitive=False)
MODE_CHOICE = click.Choice(["auto", "brent"], case_sensitive=False)


def _split(text: Optional[str]) -> Optional[list]:
    """'4,6,8' -> ['4', '6', '8']; entries are converted during validation"""
    if text is None:
        return None
    return [part.strip() for part in text.split(",") if part.strip()]


def _execute(
    ctx: click.Context,
    build_overrides: Callable[[], Dict[str, Any]],
    action: Callable[[Any], Any],
):
    """Load config, run ``action(app)`` and map failures to exit codes"""
    from src.app import ExperimentApp, setup_logging

    app = None
    try:
        overrides = dict(ctx.obj["overrides"])
        overrides.update(build_overrides())
        config = load_config(ctx.obj["config_path"], overrides)
        setup_logging(config)
        app = ExperimentApp(config)
        action(app)
    except ConfigError as e:
        click.echo(f"Configuration error: {e}", err=True)
        sys.exit(EXIT_CONFIG)
    except KeyboardInterrupt:
        click.echo("\nInterrupted by user", err=True)
        sys.exit(EXIT_RUNTIME)
    except Exception as e:
        logger.error(f"Command failed: {e}", exc_info=True)
        click.echo(f"Error: {e}", err=True)
        sys.exit(EXIT_RUNTIME)
    finally:
        if app is not None:
            app.close()


@click.group()
@click.option(
    "--config",
    "-c",
    "config_path",
    default=None,
    type=click.Path(),
    help="YAML or TOML configuration file (defaults apply when omitted)",
)
@click.option("--out", "-o", default=None, help="Output directory. Overrides output.dir.")
@click.option("--seed", default=None, type=int, help="Seed for shot sampling and tomography")
@click.option("--jobs", "-j", default=None, type=int, help="Worker threads for sweeps")
@click.option(
    "--log-level",
    default=None,
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    help="Overrides logging.level",
)
@click.pass_context
def cli(ctx, config_path, out, seed, jobs, log_level):
    """
    Local counterdiabatic driving of the transverse-field Ising chain.

    Every command writes CSV/JSON data files into the output directory.

    Examples:

      # LCD run at L=4 with lambda_f = 1/(4 nu)
      python lcdsim.py run --kind lcd --L 4 --hxf 2 --lambda-f auto

      # Fidelity oscillation in lambda_f
      python lcdsim.py scan-lambda --L 4 --hxf 2 --grid 0:6:0.05

      # Size scaling from a config file
      python lcdsim.py --config config.yml scaling
    """
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path
    ctx.obj["overrides"] = {
        "output.dir": out,
        "seed": seed,
        "jobs": jobs,
        "logging.level": log_level.upper() if log_level else None,
    }


@cli.command("run")
@click.option("--kind", type=KIND_CHOICE, default=None, help="Protocol kind")
@click.option("--L", "size", type=int, default=None, help="Number of sites")
@click.option("--hxf", type=float, default=None, help="Final transverse field h_xf")
@click.option("--hzi", type=float, default=None, help="Initial longitudinal field h_zi")
@click.option("--tau", type=float, default=None, help="Protocol duration")
@click.option("--boundary", type=BOUNDARY_CHOICE, default=None)
@click.option("--lambda-f", "lambda_f", default=None, help="Number, 'auto' (1/(4 nu)) or 'brent'")
@click.option("--lu", default=None, help="Local unitary: fixed-x-pi4, x:<theta>, z:<phi>, y:<theta> or a,t,b")
@click.option("--samples", type=int, default=None, help="Trajectory sample count")
@click.option("--no-instantaneous", is_flag=True, help="Skip instantaneous ground-state fidelities")
@click.pass_context
def run_command(ctx, kind, size, hxf, hzi, tau, boundary, lambda_f, lu, samples, no_instantaneous):
    """Execute one protocol; writes the trajectory CSV and a summary JSON."""
    _execute(
        ctx,
        lambda: {
            "protocol.kind": kind,
            "model.L": size,
            "model.h_xf": hxf,
            "model.h_zi": hzi,
            "model.tau": tau,
            "model.boundary": boundary,
            "protocol.lambda_f": lambda_f,
            "protocol.lu": lu,
            "protocol.samples": samples,
            "protocol.track_instantaneous": False if no_instantaneous else None,
        },
        lambda app: app.cmd_run(),
    )


@cli.command("scan-lambda")
@click.option("--L", "size", type=int, default=None)
@click.option("--hxf", type=float, default=None)
@click.option("--tau", type=float, default=None)
@click.option("--grid", default=None, help="start:stop:step or comma-separated lambda_f values")
@click.pass_context
def scan_lambda_command(ctx, size, hxf, tau, grid):
    """Final LCD fidelity over a lambda_f grid, plus nu and 1/(4 nu)."""
    _execute(
        ctx,
        lambda: {
            "model.L": size,
            "model.h_xf": hxf,
            "model.tau": tau,
            "scan.lambda_f": parse_grid_option(grid, "--grid") if grid is not None else None,
        },
        lambda app: app.cmd_scan_lambda(),
    )


@cli.command("scan-hx")
@click.option("--L", "size", type=int, default=None)
@click.option("--grid", default=None, help="start:stop:step or comma-separated h_xf values")
@click.option("--kinds", default=None, help="Comma-separated protocol kinds")
@click.option("--lambda-f-mode", type=MODE_CHOICE, default=None)
@click.option("--lu-modes", default=None, help="Comma-separated optimized LU families, e.g. uniform,x_only")
@click.pass_context
def scan_hx_command(ctx, size, grid, kinds, lambda_f_mode, lu_modes):
    """Compare protocols over a grid of final transverse fields."""
    _execute(
        ctx,
        lambda: {
            "model.L": size,
            "scan.h_xf": parse_grid_option(grid, "--grid") if grid is not None else None,
            "scan.kinds": _split(kinds),
            "scan.lambda_f_mode": lambda_f_mode,
            "scan.lu_modes": _split(lu_modes),
        },
        lambda app: app.cmd_scan_hx(),
    )


@cli.command("scaling")
@click.option("--sizes", default=None, help="Comma-separated system sizes")
@click.option("--hxf", type=float, default=None)
@click.option("--kinds", default=None, help="Comma-separated protocol kinds")
@click.option("--lambda-f-mode", type=MODE_CHOICE, default=None)
@click.option("--optimize-limit", type=int, default=None, help="Largest L whose lambda_f is optimized")
@click.option("--lu", default=None, help="Local unitary used by lcdlu")
@click.option("--lu-mode", default=None, help="fixed, or an LU family optimized per L (uniform, general, x_only, ...)")
@click.pass_context
def scaling_command(ctx, sizes, hxf, kinds, lambda_f_mode, optimize_limit, lu, lu_mode):
    """Final fidelity versus L with exponential fits per protocol kind."""
    _execute(
        ctx,
        lambda: {
            "scaling.sizes": _split(sizes),
            "model.h_xf": hxf,
            "scaling.kinds": _split(kinds),
            "scaling.lambda_f_mode": lambda_f_mode,
            "scaling.optimize_limit": optimize_limit,
            "protocol.lu": lu,
            "scaling.lu_mode": lu_mode,
        },
        lambda app: app.cmd_scaling(),
    )


@cli.command("trotter")
@click.option("--sizes", default=None, help="Comma-separated system sizes")
@click.option("--hxf", type=float, default=None)
@click.option("--steps", default=None, help="Comma-separated Trotter step counts")
@click.option("--shots", type=int, default=None, help="Shots per measurement basis")
@click.option("--kinds", default=None, help="Comma-separated protocol kinds")
@click.option("--lambda-f", "lambda_f", default=None)
@click.option("--qasm", is_flag=True, help="Also write every circuit as OpenQASM 2.0")
@click.option("--tomography", is_flag=True, help="State tomography for L <= 4")
@click.option("--tomography-shots", type=int, default=None)
@click.pass_context
def trotter_command(ctx, sizes, hxf, steps, shots, kinds, lambda_f, qasm, tomography, tomography_shots):
    """Digitized protocols: shot-based energies, histograms, QASM and tomography."""
    _execute(
        ctx,
        lambda: {
            "trotter.sizes": _split(sizes),
            "model.h_xf": hxf,
            "trotter.steps": _split(steps),
            "trotter.shots": shots,
            "trotter.kinds": _split(kinds),
            "protocol.lambda_f": lambda_f,
            "trotter.qasm": True if qasm else None,
            "trotter.tomography": True if tomography else None,
            "trotter.tomography_shots": tomography_shots,
        },
        lambda app: app.cmd_trotter(),
    )


@cli.command("export-circuit")
@click.option("--kind", type=KIND_CHOICE, default=None)
@click.option("--L", "size", type=int, default=None)
@click.option("--hxf", type=float, default=None)
@click.option("--steps", type=int, default=None, help="Trotter steps")
@click.option("--lambda-f", "lambda_f", default=None)
@click.option("--lu", default=None)
@click.option("--format", "fmt", type=click.Choice(["qasm2", "json"]), default="qasm2")
@click.option("--output", default=None, type=click.Path(), help="Target file (default: output directory)")
@click.pass_context
def export_circuit_command(ctx, kind, size, hxf, steps, lambda_f, lu, fmt, output):
    """Write the Trotter circuit of one protocol as OpenQASM 2.0 or JSON."""
    _execute(
        ctx,
        lambda: {
            "protocol.kind": kind,
            "model.L": size,
            "model.h_xf": hxf,
            "trotter.steps": [steps] if steps is not None else None,
            "protocol.lambda_f": lambda_f,
            "protocol.lu": lu,
        },
        lambda app: app.cmd_export_circuit(fmt, output),
    )


@cli.command("results")
@click.option("--kind", default=None, help="Filter by protocol kind")
@click.option("--command", "command_name", default=None, help="Filter by command")
@click.option("--limit", type=int, default=None, help="Show only the newest N runs")
@click.pass_context
def results_command(ctx, kind, command_name, limit):
    """List runs stored in the results database."""
    _execute(
        ctx,
        lambda: {},
        lambda app: app.show_results(kind=kind, command=command_name, limit=limit),
    )


if __name__ == "__main__":
    cli(obj={})
