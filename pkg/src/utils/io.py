"""CSV and JSON writers for experiment outputs"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def _to_builtin(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, default=_to_builtin)


def write_json(data: Any, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(data) + "\n", encoding="utf-8")
    logger.debug(f"Wrote {path}")
    return path


def meta_path(path: Path) -> Path:
    """results/scan.csv -> results/scan.meta.json"""
    path = Path(path)
    return path.with_name(f"{path.stem}.meta.json")


def write_csv(
    frame: pd.DataFrame,
    path: Path,
    config: Optional[Mapping[str, Any]] = None,
    extra: Optional[Dict[str, Any]] = None,
) -> Path:
    """
    Write a CSV with a header row, CRLF line ends and 17-digit floats, plus a
    ``<name>.meta.json`` sidecar holding the resolved configuration.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(
        path,
        index=False,
        float_format=FLOAT_FORMAT,
        lineterminator="\r\n",
        encoding="utf-8",
    )
    meta = {"file": path.name, "columns": list(frame.columns), "rows": int(len(frame))}
    if config is not None:
        meta["config"] = dict(config)
    if extra:
        meta.update(extra)
    write_json(meta, meta_path(path))
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path
