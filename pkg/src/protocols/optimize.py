"""Optimization of the drive scale lambda_f and of the local unitary"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from ..engine import StateVector
from ..schedules import lambda_f_opt
from ..utils.errors import UsageError
from .local_unitary import apply_lu
from .runner import final_fidelity, final_state, target_state
from .spec import LocalUnitaryParams, ProtocolKind, ProtocolSpec

logger = logging.getLogger(__name__)

LAMBDA_XTOL = 1e-4
ANGLE_XTOL = 1e-6
FALLBACK_GRID = 33
ANGLE_SCAN = 64


@dataclass(frozen=True)
class LambdaOptimum:
    lambda_f: float
    fidelity: float
    evaluations: int
    used_fallback: bool = False


@dataclass(frozen=True)
class LUOptimum:
    params: LocalUnitaryParams
    fidelity: float
    baseline: float
    evaluations: int
    stagnated: bool = False


class LUMode(str, Enum):
    GENERAL = "general"
    UNIFORM = "uniform"
    X_ONLY = "x_only"
    Z_ONLY = "z_only"
    Y_ONLY = "y_only"


def default_bracket(spec: ProtocolSpec) -> Tuple[float, float]:
    """[0.5, 1.5] times the predicted optimum 1/(4 nu)"""
    center = lambda_f_opt(spec.model, spec.tau)
    return 0.5 * center, 1.5 * center


def _bounded_brent(objective: Callable[[float], float], lower: float, upper: float, xtol: float):
    return optimize.minimize_scalar(
        objective, bounds=(lower, upper), method="bounded", options={"xatol": xtol}
    )


def optimize_lambda_f(
    spec: ProtocolSpec,
    bracket: Optional[Tuple[float, float]] = None,
    xtol: float = LAMBDA_XTOL,
) -> LambdaOptimum:
    """
    Maximize the final target fidelity over lambda_f by bounded Brent minimization
    of 1 - F.

    If Brent fails or lands on a bracket edge, a 33-point grid over the widened
    bracket locates the best cell and Brent is rerun on its neighbours.
    """
    if not spec.kind.driven:
        raise UsageError(f"lambda_f has no effect for protocol kind {spec.kind.value}")
    lower, upper = bracket if bracket is not None else default_bracket(spec)
    if not upper > lower:
        raise UsageError(f"Invalid bracket [{lower}, {upper}]")

    evaluations = 0

    def objective(lam: float) -> float:
        nonlocal evaluations
        evaluations += 1
        value = 1.0 - final_fidelity(spec.replace(lambda_f=float(lam)))
        logger.debug(f"lambda_f={lam:.6f}: 1 - F = {value:.3e}")
        return value

    result = _bounded_brent(objective, lower, upper, xtol)
    at_edge = min(result.x - lower, upper - result.x) <= 2 * xtol
    if result.success and not at_edge:
        logger.info(f"Brent lambda_f*={result.x:.6f}, F={1 - result.fun:.8f} ({evaluations} evals)")
        return LambdaOptimum(float(result.x), float(1.0 - result.fun), evaluations)

    logger.warning(
        f"Brent on [{lower:.4f}, {upper:.4f}] ended at {result.x:.4f} "
        f"(success={result.success}); falling back to grid scan"
    )
    width = upper - lower
    grid = np.linspace(max(0.0, lower - width), upper + width, FALLBACK_GRID)
    values = np.array([objective(lam) for lam in grid])
    best = int(np.argmin(values))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]
    local = _bounded_brent(objective, lo, hi, xtol)
    if local.fun <= values[best]:
        lam, value = float(local.x), float(local.fun)
    else:
        lam, value = float(grid[best]), float(values[best])
    logger.info(f"Fallback lambda_f*={lam:.6f}, F={1 - value:.8f} ({evaluations} evals)")
    return LambdaOptimum(lam, 1.0 - value, evaluations, used_fallback=True)


def resolve_lambda_f(spec: ProtocolSpec, value: Union[str, float]) -> float:
    """'auto' -> 1/(4 nu), 'brent' -> optimizer, numbers pass through"""
    if isinstance(value, str):
        key = value.strip().lower()
        if key == "auto":
            return lambda_f_opt(spec.model, spec.tau)
        if key == "brent":
            return optimize_lambda_f(spec).lambda_f
        try:
            return float(key)
        except ValueError:
            raise UsageError(f"lambda_f must be a number, 'auto' or 'brent', got {value!r}")
    return float(value)


def _single_angle_search(fidelity_of: Callable[[float], float], xtol: float):
    """Scan one 2pi period, then bounded Brent around the best scan point"""
    grid = np.linspace(-math.pi, math.pi, ANGLE_SCAN, endpoint=False)
    values = np.array([1.0 - fidelity_of(a) for a in grid])
    best = int(np.argmin(values))
    step = grid[1] - grid[0]
    result = _bounded_brent(
        lambda a: 1.0 - fidelity_of(a), grid[best] - step, grid[best] + step, xtol
    )
    if result.fun <= values[best]:
        return float(result.x), 1.0 - float(result.fun), ANGLE_SCAN + int(result.nfev)
    return float(grid[best]), 1.0 - float(values[best]), ANGLE_SCAN + int(result.nfev)


def _simplex_search(
    objective: Callable[[np.ndarray], float],
    x0: np.ndarray,
    restarts: int,
    method: str,
) -> Tuple[np.ndarray, float, int, bool]:
    best_x, best_f = x0.copy(), objective(x0)
    evaluations = 1
    stagnated = False
    steps = [0.5, 0.1, 0.02, 0.004][: max(1, restarts)]
    for step in steps:
        if method == "cobyla":
            result = optimize.minimize(
                objective, best_x, method="COBYLA",
                options={"rhobeg": step, "tol": 1e-10, "maxiter": 4000},
            )
        else:
            n = len(best_x)
            simplex = np.vstack([best_x] + [best_x + step * np.eye(n)[i] for i in range(n)])
            result = optimize.minimize(
                objective, best_x, method="Nelder-Mead",
                options={
                    "initial_simplex": simplex,
                    "xatol": ANGLE_XTOL,
                    "fatol": 1e-12,
                    "maxiter": 400 * n,
                },
            )
        evaluations += int(result.nfev)
        stagnated = not result.success
        if result.fun < best_f:
            best_x, best_f = np.asarray(result.x, dtype=float), float(result.fun)
    return best_x, best_f, evaluations, stagnated


def optimize_lu(
    spec: ProtocolSpec,
    mode: Union[LUMode, str] = LUMode.UNIFORM,
    restarts: int = 3,
    method: str = "nelder-mead",
    pre_lu_state: Optional[StateVector] = None,
) -> LUOptimum:
    """
    Optimize the local unitary applied after the LCD evolution.

    general (3L angles) and uniform (3 angles) start from the fixed X(pi/4)
    rotation and use Nelder-Mead with shrinking restarts, or COBYLA. The
    single-axis modes scan one angle and refine with bounded Brent.
    """
    mode = LUMode(mode)
    if not spec.kind.driven:
        raise UsageError(f"Local unitary optimization needs an lcd protocol, got {spec.kind.value}")
    if method not in ("nelder-mead", "cobyla"):
        raise UsageError(f"Unknown optimizer {method!r}")

    if pre_lu_state is None:
        pre_lu_state, _ = final_state(spec.replace(kind=ProtocolKind.LCD, lu=None))
    target = target_state(spec)
    baseline = target.weight(pre_lu_state)

    def fidelity_of(params: LocalUnitaryParams) -> float:
        return target.weight(apply_lu(pre_lu_state, params))

    if mode in (LUMode.X_ONLY, LUMode.Z_ONLY, LUMode.Y_ONLY):
        builder = {
            LUMode.X_ONLY: LocalUnitaryParams.x_rotation,
            LUMode.Z_ONLY: LocalUnitaryParams.z_rotation,
            LUMode.Y_ONLY: LocalUnitaryParams.y_rotation,
        }[mode]
        angle, fid, evaluations = _single_angle_search(
            lambda a: fidelity_of(builder(a)), ANGLE_XTOL
        )
        params = builder(angle)
        logger.info(f"LU {mode.value}: angle={angle:.6f}, F={fid:.8f} (LCD {baseline:.8f})")
        return LUOptimum(params, fid, baseline, evaluations)

    quarter = 0.25 * math.pi
    if mode is LUMode.UNIFORM:
        x0 = np.array([0.0, quarter, 0.0])

        def to_params(x):
            return LocalUnitaryParams.uniform_rotation(*x)
    else:
        x0 = np.tile([0.0, quarter, 0.0], spec.size)

        def to_params(x):
            return LocalUnitaryParams.per_site(x.reshape(-1, 3))

    x, value, evaluations, stagnated = _simplex_search(
        lambda v: 1.0 - fidelity_of(to_params(v)), x0, restarts, method
    )
    if stagnated:
        logger.warning(f"LU {mode.value} optimizer stagnated; returning best point found")
    params = to_params(x)
    logger.info(f"LU {mode.value}: F={1 - value:.8f} (LCD {baseline:.8f}, {evaluations} evals)")
    return LUOptimum(params, 1.0 - value, baseline, evaluations, stagnated)
