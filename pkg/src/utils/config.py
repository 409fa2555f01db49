"""Configuration loading, validation and grid parsing"""

import copy
import logging
import math
import os

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
import yaml

from ..protocols import LocalUnitaryParams, LUMode, ProtocolKind, ProtocolSpec
from ..schedules import BoundaryCondition
from .errors import ConfigError

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

DEFAULT_CONFIG: Dict[str, Any] = {
    "model": {
        "L": 4,
        "h_xf": 2.0,
        "h_zi": 1.0,
        "J_f": 1.0,
        "tau": 1.0,
        "boundary": "auto",
    },
    "protocol": {
        "kind": "lcd",
        "lambda_f": "auto",
        "lu": "fixed-x-pi4",
        "samples": 201,
        "tolerance": 1e-8,
        "track_instantaneous": True,
    },
    "scan": {
        "lambda_f": {"start": 0.0, "stop": 6.0, "step": 0.05},
        "h_xf": {"start": 0.2, "stop": 10.0, "num": 24, "spacing": "log"},
        "kinds": ["adiabatic", "lcd", "lcdlu"],
        "lu_modes": [],
        "lambda_f_mode": "auto",
    },
    "scaling": {
        "sizes": [4, 5, 6, 7, 8, 9, 10, 11, 12],
        "kinds": ["adiabatic", "lcd", "lcdlu"],
        "lambda_f_mode": "brent",
        "optimize_limit": 11,
        "lu_mode": "fixed",
    },
    "trotter": {
        "sizes": [2, 4, 6, 8, 10, 12, 14],
        "steps": [20],
        "shots": 1000,
        "kinds": ["lcd", "lcdlu"],
        "qasm": False,
        "tomography": False,
        "tomography_shots": 400,
    },
    "output": {"dir": "results"},
    "database": {"enabled": False, "path": "results/lcdsim.db"},
    "logging": {
        "level": "INFO",
        "file": None,
        "max_bytes": 10485760,
        "backup_count": 5,
    },
    "seed": 0,
    "jobs": 1,
}

Grid = Union[List[Any], Mapping[str, Any]]


def _merge(base: Dict[str, Any], update: Mapping[str, Any]) -> Dict[str, Any]:
    for key, value in update.items():
        if isinstance(value, Mapping) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = copy.deepcopy(value)
    return base


def _read_file(config_path: str) -> Dict[str, Any]:
    path = Path(config_path)
    if not path.exists():
        raise ConfigError(f"Configuration file not found: {config_path}")
    try:
        if path.suffix.lower() == ".toml":
            with open(path, "rb") as f:
                data = tomllib.load(f)
        else:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in configuration file: {e}")
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Invalid TOML in configuration file: {e}")
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"Configuration root must be a mapping, got {type(data).__name__}")
    return data


def load_config(
    config_path: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> Dict[str, Any]:
    """
    Load configuration: defaults < file < environment < overrides.

    Args:
        config_path: YAML or TOML file, optional
        overrides: dotted keys (``"model.L"``) set last, typically from CLI flags

    Returns:
        Validated configuration dictionary

    Raises:
        ConfigError: unreadable file or invalid values
    """
    config = copy.deepcopy(DEFAULT_CONFIG)
    if config_path:
        _merge(config, _read_file(config_path))
        logger.info(f"Configuration loaded from {config_path}")

    _apply_env_overrides(config)
    for key, value in (overrides or {}).items():
        if value is not None:
            set_dotted(config, key, value)

    try:
        _validate_config(config)
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as e:
        raise ConfigError(f"Invalid configuration: {e}")
    return config


def set_dotted(config: Dict[str, Any], key: str, value: Any):
    """Set ``a.b.c`` inside nested mappings, creating sections as needed"""
    node = config
    parts = key.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"Cannot set {key}: {part} is not a section")
    node[parts[-1]] = value


def _apply_env_overrides(config: Dict[str, Any]):
    """Apply environment variable overrides to config"""
    output_dir = os.getenv("LCDSIM_OUTPUT_DIR")
    if output_dir:
        config["output"]["dir"] = output_dir

    db_path = os.getenv("LCDSIM_DB_PATH")
    if db_path:
        config["database"]["path"] = db_path
        config["database"]["enabled"] = True

    log_level = os.getenv("LCDSIM_LOG_LEVEL")
    if log_level:
        config["logging"]["level"] = log_level.upper()


def _validate_config(config: Dict[str, Any]):
    """Validate every section; raises ConfigError on the first problem"""
    for section in ("model", "protocol", "scan", "scaling", "trotter", "output", "database", "logging"):
        if not isinstance(config.get(section), dict):
            raise ConfigError(f"Missing or invalid configuration section: {section}")

    model = config["model"]
    if int(model["L"]) < 2:
        raise ConfigError(f"model.L must be >= 2, got {model['L']}")
    if not float(model["tau"]) > 0:
        raise ConfigError(f"model.tau must be positive, got {model['tau']}")
    if float(model["h_zi"]) == 0:
        raise ConfigError("model.h_zi must be nonzero")
    if not float(model["h_xf"]) >= 0:
        raise ConfigError(f"model.h_xf must be non-negative, got {model['h_xf']}")
    _choice(model["boundary"], [b.value for b in BoundaryCondition], "model.boundary")

    protocol = config["protocol"]
    _choice(protocol["kind"], [k.value for k in ProtocolKind], "protocol.kind")
    parse_lambda_f(protocol["lambda_f"], "protocol.lambda_f")
    if protocol.get("lu") is not None:
        _parse_lu(protocol["lu"])
    if int(protocol["samples"]) < 2:
        raise ConfigError(f"protocol.samples must be >= 2, got {protocol['samples']}")

    scan = config["scan"]
    parse_grid(scan["lambda_f"], "scan.lambda_f")
    parse_grid(scan["h_xf"], "scan.h_xf")
    _kinds(scan["kinds"], "scan.kinds")
    for mode in scan.get("lu_modes") or []:
        _choice(mode, [m.value for m in LUMode], "scan.lu_modes")
    _choice(scan["lambda_f_mode"], ["auto", "brent"], "scan.lambda_f_mode")

    scaling = config["scaling"]
    _sizes(scaling["sizes"], "scaling.sizes")
    _kinds(scaling["kinds"], "scaling.kinds")
    _choice(scaling["lambda_f_mode"], ["auto", "brent"], "scaling.lambda_f_mode")
    _choice(scaling.get("lu_mode", "fixed"), ["fixed"] + [m.value for m in LUMode], "scaling.lu_mode")

    trotter = config["trotter"]
    _sizes(trotter["sizes"], "trotter.sizes")
    _kinds(trotter["kinds"], "trotter.kinds")
    steps = _int_list(trotter["steps"], "trotter.steps")
    if min(steps) < 1:
        raise ConfigError(f"trotter.steps must be >= 1, got {steps}")
    if int(trotter["shots"]) < 1:
        raise ConfigError(f"trotter.shots must be >= 1, got {trotter['shots']}")
    if int(trotter["tomography_shots"]) < 1:
        raise ConfigError(f"trotter.tomography_shots must be >= 1, got {trotter['tomography_shots']}")

    if not config["output"].get("dir"):
        raise ConfigError("output.dir not specified")
    if config["database"].get("enabled") and not config["database"].get("path"):
        raise ConfigError("database.path not specified")

    level = str(config["logging"].get("level", "INFO")).upper()
    if level not in LOG_LEVELS:
        raise ConfigError(f"Invalid logging.level: {level}")
    config["logging"]["level"] = level

    if int(config["jobs"]) < 1:
        raise ConfigError(f"jobs must be >= 1, got {config['jobs']}")
    int(config["seed"])


def _choice(value: Any, allowed: List[str], name: str) -> str:
    text = str(value).strip().lower()
    if text not in allowed:
        raise ConfigError(f"Invalid {name}: {value!r} (expected one of {', '.join(allowed)})")
    return text


def _kinds(values: Any, name: str) -> List[ProtocolKind]:
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigError(f"{name} must be a non-empty list")
    return [ProtocolKind(_choice(v, [k.value for k in ProtocolKind], name)) for v in values]


def _scaling_lu_mode(value: Any) -> Optional[LUMode]:
    """'fixed' keeps protocol.lu; a family name optimizes the LU per L"""
    text = _choice(value, ["fixed"] + [m.value for m in LUMode], "scaling.lu_mode")
    return None if text == "fixed" else LUMode(text)


def _int_list(values: Any, name: str) -> List[int]:
    if isinstance(values, (int, float)):
        values = [values]
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigError(f"{name} must be a non-empty list")
    return [int(v) for v in values]


def _sizes(values: Any, name: str) -> List[int]:
    sizes = _int_list(values, name)
    if min(sizes) < 2:
        raise ConfigError(f"{name} entries must be >= 2, got {sizes}")
    return sizes


def _parse_lu(value: Any) -> LocalUnitaryParams:
    try:
        if isinstance(value, Mapping):
            return LocalUnitaryParams.from_dict(value)
        return LocalUnitaryParams.parse(str(value))
    except (ValueError, KeyError, TypeError) as e:
        raise ConfigError(f"Invalid protocol.lu {value!r}: {e}")


def parse_lambda_f(value: Any, name: str = "lambda_f") -> Union[str, float]:
    """'auto', 'brent' or a finite number"""
    if isinstance(value, str) and value.strip().lower() in ("auto", "brent"):
        return value.strip().lower()
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"Invalid {name}: {value!r} (expected a number, 'auto' or 'brent')")
    if not math.isfinite(number):
        raise ConfigError(f"Invalid {name}: {value!r}")
    return number


def parse_grid(spec: Grid, name: str = "grid") -> np.ndarray:
    """
    Expand a grid description into values.

    Accepted forms: an explicit list, ``{start, stop, step}`` (stop inclusive
    within rounding), or ``{start, stop, num, spacing: linear|log}``.

    Raises:
        ConfigError: empty, non-finite or malformed grid
    """
    if isinstance(spec, (list, tuple)):
        try:
            values = np.array([float(v) for v in spec], dtype=float)
        except (TypeError, ValueError):
            raise ConfigError(f"{name} must contain numbers, got {spec!r}")
    elif isinstance(spec, Mapping):
        try:
            start = float(spec["start"])
            stop = float(spec["stop"])
        except (KeyError, TypeError, ValueError):
            raise ConfigError(f"{name} needs numeric start and stop, got {dict(spec)!r}")
        if "step" in spec:
            step = float(spec["step"])
            if not step > 0:
                raise ConfigError(f"{name}.step must be positive, got {step}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1 if stop >= start else 0
            values = start + step * np.arange(max(count, 0))
        elif "num" in spec:
            num = int(spec["num"])
            spacing = str(spec.get("spacing", "linear")).lower()
            if spacing == "log":
                if start <= 0 or stop <= 0:
                    raise ConfigError(f"{name}: log spacing needs positive bounds")
                values = np.geomspace(start, stop, max(num, 0))
            elif spacing == "linear":
                values = np.linspace(start, stop, max(num, 0))
            else:
                raise ConfigError(f"{name}.spacing must be linear or log, got {spacing!r}")
        else:
            raise ConfigError(f"{name} needs either step or num")
    else:
        raise ConfigError(f"{name} must be a list or a mapping, got {type(spec).__name__}")

    if values.size == 0:
        raise ConfigError(f"{name} is empty")
    if not np.all(np.isfinite(values)):
        raise ConfigError(f"{name} contains non-finite values")
    return values


def parse_grid_option(text: str, name: str = "grid") -> Grid:
    """CLI grid syntax: ``start:stop:step`` or comma-separated values"""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{name} must look like start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise ConfigError(f"{name} must look like start:stop:step, got {text!r}")
        return {"start": start, "stop": stop, "step": step}
    if not text:
        return []
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"{name} must be comma-separated numbers, got {text!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Typed view of a validated configuration"""

    spec: ProtocolSpec
    lu: LocalUnitaryParams
    lambda_f: Union[str, float]
    track_instantaneous: bool
    lambda_grid: np.ndarray
    h_xf_grid: np.ndarray
    scan_kinds: Tuple[ProtocolKind, ...]
    scan_lu_modes: Tuple[LUMode, ...]
    scan_lambda_mode: str
    scaling_sizes: Tuple[int, ...]
    scaling_kinds: Tuple[ProtocolKind, ...]
    scaling_lambda_mode: str
    optimize_limit: int
    scaling_lu_mode: Optional[LUMode]
    trotter_sizes: Tuple[int, ...]
    trotter_steps: Tuple[int, ...]
    shots: int
    trotter_kinds: Tuple[ProtocolKind, ...]
    qasm: bool
    tomography: bool
    tomography_shots: int
    output_dir: Path
    seed: int
    jobs: int
    raw: Dict[str, Any]

    @classmethod
    def from_dict(cls, config: Dict[str, Any]) -> "ExperimentConfig":
        model = config["model"]
        protocol = config["protocol"]
        scan = config["scan"]
        scaling = config["scaling"]
        trotter = config["trotter"]
        kind = ProtocolKind(_choice(protocol["kind"], [k.value for k in ProtocolKind], "protocol.kind"))
        lu = _parse_lu(protocol["lu"]) if protocol.get("lu") is not None else LocalUnitaryParams.fixed_x()
        lambda_f = parse_lambda_f(protocol["lambda_f"], "protocol.lambda_f")
        try:
            spec = ProtocolSpec(
                size=int(model["L"]),
                h_xf=float(model["h_xf"]),
                h_zi=float(model["h_zi"]),
                J_f=float(model["J_f"]),
                tau=float(model["tau"]),
                boundary=BoundaryCondition(str(model["boundary"]).lower()),
                kind=kind,
                lambda_f=lambda_f if isinstance(lambda_f, float) else 0.0,
                lu=lu if kind is ProtocolKind.LCDLU else None,
                samples=int(protocol["samples"]),
                trotter_steps=_int_list(trotter["steps"], "trotter.steps")[0],
                tolerance=float(protocol["tolerance"]),
            )
        except ValueError as e:
            raise ConfigError(f"Invalid protocol configuration: {e}")
        return cls(
            spec=spec,
            lu=lu,
            lambda_f=lambda_f,
            track_instantaneous=bool(protocol.get("track_instantaneous", True)),
            lambda_grid=parse_grid(scan["lambda_f"], "scan.lambda_f"),
            h_xf_grid=parse_grid(scan["h_xf"], "scan.h_xf"),
            scan_kinds=tuple(_kinds(scan["kinds"], "scan.kinds")),
            scan_lu_modes=tuple(LUMode(str(m).lower()) for m in scan.get("lu_modes") or []),
            scan_lambda_mode=str(scan["lambda_f_mode"]).lower(),
            scaling_sizes=tuple(_sizes(scaling["sizes"], "scaling.sizes")),
            scaling_kinds=tuple(_kinds(scaling["kinds"], "scaling.kinds")),
            scaling_lambda_mode=str(scaling["lambda_f_mode"]).lower(),
            optimize_limit=int(scaling.get("optimize_limit", 11)),
            scaling_lu_mode=_scaling_lu_mode(scaling.get("lu_mode", "fixed")),
            trotter_sizes=tuple(_sizes(trotter["sizes"], "trotter.sizes")),
            trotter_steps=tuple(_int_list(trotter["steps"], "trotter.steps")),
            shots=int(trotter["shots"]),
            trotter_kinds=tuple(_kinds(trotter["kinds"], "trotter.kinds")),
            qasm=bool(trotter.get("qasm", False)),
            tomography=bool(trotter.get("tomography", False)),
            tomography_shots=int(trotter["tomography_shots"]),
            output_dir=Path(config["output"]["dir"]),
            seed=int(config["seed"]),
            jobs=int(config["jobs"]),
            raw=config,
        )
