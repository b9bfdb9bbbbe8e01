"""Output helpers: versioned CSV files, JSON sidecars and small validators."""

import json
import math
import os
import platform
import subprocess
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, TypeVar, Union

import numpy as np
import pandas as pd

from .config import CSV_SCHEMA_VERSION, get_settings

PathLike = Union[str, Path]
T = TypeVar("T")
R = TypeVar("R")


def package_version() -> str:
    """Package version, with the git commit appended when one is available."""
    from . import __version__

    sha = os.getenv("GITHUB_SHA", "").strip()
    if not sha:
        try:
            completed = subprocess.run(
                ["git", "rev-parse", "--short", "HEAD"],
                cwd=Path(__file__).resolve().parent,
                capture_output=True,
                text=True,
                check=True,
                timeout=5,
            )
            sha = completed.stdout.strip()
        except (OSError, subprocess.SubprocessError):
            sha = ""
    return f"{__version__}+g{sha[:7]}" if sha else __version__


def ordered_map(func: Callable[[T], R], items: Sequence[T], workers: int = 1) -> List[R]:
    """map() over threads; output order always follows ``items``."""
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def resolve_output(path: PathLike) -> Path:
    """Relative paths land under COVSTAT_OUTPUT_DIR."""
    path = Path(path)
    if not path.is_absolute():
        path = get_settings().output_dir / path
    return path


def ensure_finite(frame: pd.DataFrame) -> None:
    """Raise ValueError naming the first column that holds NaN or Inf."""
    numeric = frame.select_dtypes(include=[np.number])
    bad = ~np.isfinite(numeric.to_numpy(dtype=float))
    if bad.any():
        column = numeric.columns[int(np.argwhere(bad)[0][1])]
        raise ValueError(f"non-finite value in column {column!r}")


def write_csv(frame: pd.DataFrame, path: PathLike, metadata: Optional[Mapping[str, Any]] = None) -> Path:
    """CSV with '#'-prefixed metadata lines; the first one carries the schema version."""
    ensure_finite(frame)
    path = resolve_output(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {"schema": CSV_SCHEMA_VERSION, "generator": f"covstat {package_version()}"}
    header.update(metadata or {})
    with open(path, "w", encoding="utf-8", newline="") as handle:
        for key, value in header.items():
            handle.write(f"# {key}: {value}\n")
        frame.to_csv(handle, index=False, float_format="%.17g", lineterminator="\n")
    return path


def read_csv(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def _json_default(value: Any) -> Any:
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _check_json_finite(value: Any, where: str = "$") -> None:
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError(f"non-finite value at {where}")
    if isinstance(value, Mapping):
        for key, item in value.items():
            _check_json_finite(item, f"{where}.{key}")
    elif isinstance(value, (list, tuple)):
        for index, item in enumerate(value):
            _check_json_finite(item, f"{where}[{index}]")


def write_json(payload: Mapping[str, Any], path: PathLike) -> Path:
    _check_json_finite(payload)
    path = resolve_output(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False, default=_json_default, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def provenance(**extra: Any) -> Dict[str, Any]:
    """Version, interpreter and timestamp block for JSON sidecars."""
    block = {
        "version": package_version(),
        "python_version": platform.python_version(),
        "timestamp_utc": datetime.now(timezone.utc).replace(microsecond=0).isoformat(),
        "csv_schema": CSV_SCHEMA_VERSION,
    }
    block.update(extra)
    return block


def sidecar_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".meta.json")


def format_file_size(size_bytes: int) -> str:
    for unit in ["B", "KB", "MB", "GB"]:
        if size_bytes < 1024.0:
            return f"{size_bytes:.2f} {unit}"
        size_bytes /= 1024.0
    return f"{size_bytes:.2f} TB"


def validate_grid(minimum: float, maximum: float, points: int) -> Dict[str, Any]:
    """Check a beta*m grid; returns {'is_valid': bool, 'message': str}."""
    if not (math.isfinite(minimum) and math.isfinite(maximum)):
        return {"is_valid": False, "message": "grid bounds must be finite"}
    if minimum <= 0.0:
        return {"is_valid": False, "message": f"grid minimum must be positive, got {minimum}"}
    if maximum < minimum:
        return {"is_valid": False, "message": f"grid maximum {maximum} lies below minimum {minimum}"}
    if points < 1:
        return {"is_valid": False, "message": f"need at least one grid point, got {points}"}
    if points == 1 and maximum != minimum:
        return {"is_valid": False, "message": "a single-point grid needs min == max"}
    if points >= 2 and maximum == minimum:
        return {"is_valid": False, "message": "min == max allows only one grid point"}
    return {"is_valid": True, "message": "grid is well-formed"}


def make_grid(minimum: float, maximum: float, points: int, log_spaced: bool = True) -> np.ndarray:
    check = validate_grid(minimum, maximum, points)
    if not check["is_valid"]:
        raise ValueError(check["message"])
    if points == 1:
        return np.array([float(minimum)])
    if log_spaced:
        return np.logspace(math.log10(minimum), math.log10(maximum), points)
    return np.linspace(minimum, maximum, points)
