"""Parameter sweeps, oscillation analysis and exponential size-scaling fits"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.signal import find_peaks

from ..schedules import lambda_f_opt
from ..utils.errors import UsageError
from .optimize import LUMode, optimize_lambda_f, optimize_lu
from .runner import final_fidelity, final_state
from .spec import LocalUnitaryParams, ProtocolKind, ProtocolSpec

logger = logging.getLogger(__name__)

DEFAULT_KINDS = (ProtocolKind.ADIABATIC, ProtocolKind.LCD, ProtocolKind.LCDLU)


@dataclass
class ScalingFit:
    """log2 F = -c L + a"""

    kind: str
    c: float
    a: float
    sizes: List[int]
    fidelities: List[float]
    residuals: List[float]

    def predict(self, size: int) -> float:
        return float(2.0 ** (-self.c * size + self.a))

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "c": self.c,
            "a": self.a,
            "sizes": list(self.sizes),
            "fidelities": list(self.fidelities),
            "residuals": list(self.residuals),
        }


@dataclass
class ScalingReport:
    table: pd.DataFrame
    fits: Dict[str, ScalingFit]
    lambda_f: Dict[int, float]
    partial: bool = False
    errors: List[str] = field(default_factory=list)


def fit_exponential(sizes: Sequence[int], fidelities: Sequence[float], kind: str = "") -> ScalingFit:
    """Ordinary least squares of log2 F against L"""
    sizes = np.asarray(sizes, dtype=float)
    fidelities = np.asarray(fidelities, dtype=float)
    if len(np.unique(sizes)) < 2:
        raise UsageError("Exponential fit needs at least two distinct system sizes")
    if np.any(fidelities <= 0):
        raise UsageError("Fidelities must be positive for a log fit")
    log_f = np.log2(fidelities)
    slope, intercept = np.polyfit(sizes, log_f, 1)
    residuals = log_f - (slope * sizes + intercept)
    return ScalingFit(
        kind=kind,
        c=float(-slope),
        a=float(intercept),
        sizes=[int(s) for s in sizes],
        fidelities=[float(f) for f in fidelities],
        residuals=[float(r) for r in residuals],
    )


def _map(func, items: Sequence, jobs: int) -> List:
    if jobs <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = {index: pool.submit(func, item) for index, item in enumerate(items)}
        return [futures[index].result() for index in range(len(items))]


def scan_lambda_f(spec: ProtocolSpec, grid: Sequence[float], jobs: int = 1) -> pd.DataFrame:
    """Final fidelity over a lambda_f grid"""
    if len(grid) == 0:
        raise UsageError("lambda_f grid is empty")
    if not spec.kind.driven:
        spec = spec.replace(kind=ProtocolKind.LCD)
    values = _map(lambda lam: final_fidelity(spec.replace(lambda_f=float(lam))), list(grid), jobs)
    return pd.DataFrame({"lambda_f": np.asarray(grid, dtype=float), "F_final": values})


def find_maxima(values: Sequence[float], fidelities: Sequence[float]) -> np.ndarray:
    """Positions of interior local maxima, in grid order"""
    fidelities = np.asarray(fidelities, dtype=float)
    peaks, _ = find_peaks(fidelities)
    return np.asarray(values, dtype=float)[peaks]


def oscillation_period(values: Sequence[float], fidelities: Sequence[float]) -> float:
    """Spacing between the first two maxima of F(lambda_f)"""
    maxima = find_maxima(values, fidelities)
    if len(maxima) < 2:
        raise UsageError(f"Need two maxima to measure a period, found {len(maxima)}")
    return float(maxima[1] - maxima[0])


def _lambda_for(spec: ProtocolSpec, mode: str) -> float:
    if mode == "auto":
        return lambda_f_opt(spec.model, spec.tau)
    return optimize_lambda_f(spec.replace(kind=ProtocolKind.LCD, lu=None)).lambda_f


def scan_h_xf(
    spec: ProtocolSpec,
    grid: Sequence[float],
    kinds: Sequence[ProtocolKind] = DEFAULT_KINDS,
    lambda_f_mode: str = "auto",
    jobs: int = 1,
    lu_modes: Sequence[LUMode] = (),
) -> pd.DataFrame:
    """
    Final fidelity per (h_xf, kind) with lambda_f resolved per h_xf.

    Each entry of ``lu_modes`` adds a row ``lcdlu_<mode>`` holding the best
    fidelity reachable by optimizing the local unitary of that family after
    the LCD evolution.
    """
    if len(grid) == 0:
        raise UsageError("h_xf grid is empty")

    def point(h_xf: float) -> List[Dict]:
        base = spec.replace(h_xf=float(h_xf))
        lam = _lambda_for(base, lambda_f_mode) if h_xf > 0 else 0.0
        rows = []
        for kind in kinds:
            run_spec = _with_kind(base, kind, lam)
            rows.append({
                "h_xf": float(h_xf),
                "kind": ProtocolKind(kind).value,
                "lambda_f": run_spec.lambda_f,
                "F_final": final_fidelity(run_spec),
            })
        if lu_modes:
            lcd = _with_kind(base, ProtocolKind.LCD, lam)
            pre, _ = final_state(lcd)
            for mode in lu_modes:
                best = optimize_lu(lcd, mode, pre_lu_state=pre)
                rows.append({
                    "h_xf": float(h_xf),
                    "kind": f"lcdlu_{LUMode(mode).value}",
                    "lambda_f": lam,
                    "F_final": best.fidelity,
                })
        return rows

    chunks = _map(point, list(grid), jobs)
    return pd.DataFrame([row for chunk in chunks for row in chunk])


def _with_kind(spec: ProtocolSpec, kind: ProtocolKind, lambda_f: float) -> ProtocolSpec:
    kind = ProtocolKind(kind)
    if kind is ProtocolKind.LCDLU:
        return spec.replace(kind=kind, lambda_f=lambda_f, lu=spec.lu or LocalUnitaryParams.fixed_x())
    if kind is ProtocolKind.LCD:
        return spec.replace(kind=kind, lambda_f=lambda_f, lu=None)
    return spec.replace(kind=kind, lambda_f=0.0, lu=None)


def scaling_experiment(
    template: ProtocolSpec,
    sizes: Sequence[int],
    kinds: Sequence[ProtocolKind] = DEFAULT_KINDS,
    lambda_f_mode: str = "brent",
    optimize_limit: int = 11,
    jobs: int = 1,
    lu_mode: Optional[Union[LUMode, str]] = None,
) -> ScalingReport:
    """
    Final fidelities over system sizes and an exponential fit per protocol kind.

    With lambda_f_mode 'brent', lambda_f is optimized for every L up to
    ``optimize_limit``; larger sizes reuse the value from the largest optimized L.
    lcdlu rows apply the template's local unitary, or with ``lu_mode`` the best
    local unitary of that family found separately for every L.
    A failing run stops the experiment and the report is flagged partial.
    """
    sizes = sorted(int(s) for s in sizes)
    if len(set(sizes)) < 2:
        raise UsageError("Scaling experiment needs at least two distinct system sizes")
    if lambda_f_mode not in ("auto", "brent"):
        raise UsageError(f"Unknown lambda_f mode {lambda_f_mode!r}")
    lu_mode = LUMode(lu_mode) if lu_mode is not None else None

    needs_lambda = any(ProtocolKind(k).driven for k in kinds)
    lambdas: Dict[int, float] = {}
    errors: List[str] = []
    rows: List[Dict] = []

    if needs_lambda:
        to_optimize = [L for L in sizes if lambda_f_mode == "auto" or L <= optimize_limit]
        try:
            base = template.replace(kind=ProtocolKind.LCD, lu=None)
            found = _map(
                lambda L: _lambda_for(base.replace(size=L), lambda_f_mode), to_optimize, jobs
            )
            lambdas.update(zip(to_optimize, found))
        except Exception as e:
            logger.error(f"lambda_f optimization failed: {e}", exc_info=True)
            errors.append(str(e))
        if lambdas:
            fallback = lambdas[max(lambdas)]
            for L in sizes:
                lambdas.setdefault(L, fallback)

    tasks = []
    if not errors:
        for L in sizes:
            for kind in kinds:
                lam = lambdas.get(L, 0.0)
                tasks.append((L, ProtocolKind(kind), _with_kind(template.replace(size=L), kind, lam)))

    def execute(task):
        L, kind, spec = task
        if kind is ProtocolKind.LCDLU and lu_mode is not None:
            fid = optimize_lu(spec.replace(kind=ProtocolKind.LCD, lu=None), lu_mode).fidelity
        else:
            fid = final_fidelity(spec)
        return {"L": L, "kind": kind.value, "lambda_f": spec.lambda_f, "F_final": fid}

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        futures = [pool.submit(execute, task) for task in tasks]
        for task, future in zip(tasks, futures):
            try:
                rows.append(future.result())
            except Exception as e:
                logger.error(f"Run L={task[0]} kind={task[1].value} failed: {e}", exc_info=True)
                errors.append(f"L={task[0]} {task[1].value}: {e}")
                for pending in futures:
                    pending.cancel()
                break

    table = pd.DataFrame(rows, columns=["L", "kind", "lambda_f", "F_final"])
    fits: Dict[str, ScalingFit] = {}
    for kind in kinds:
        value = ProtocolKind(kind).value
        subset = table[table["kind"] == value]
        if subset["L"].nunique() >= 2:
            fits[value] = fit_exponential(subset["L"], subset["F_final"], value)
            logger.info(f"Scaling {value}: c={fits[value].c:.4f}, a={fits[value].a:.4f}")

    return ScalingReport(table=table, fits=fits, lambda_f=lambdas, partial=bool(errors), errors=errors)
