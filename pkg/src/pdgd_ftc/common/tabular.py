"""Atomic CSV/JSON output with pandas."""

import json
import tempfile
from enum import Enum
from pathlib import Path
from typing import Any, Dict

import numpy as np
import pandas as pd


def _temp_path(file_path: Path, suffix: str) -> Path:
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(
        mode="wb",
        suffix=suffix,
        dir=file_path.parent,
        delete=False,
    ) as tmp_file:
        return Path(tmp_file.name)


def atomic_write_csv(df: pd.DataFrame, file_path: Path) -> None:
    """Write a DataFrame to CSV atomically (temp file + rename).

    Floats are written with Python's shortest round-trip repr so identical runs
    produce byte-identical files.

    Args:
        df: DataFrame to write
        file_path: Destination file path
    """
    temp_path = _temp_path(file_path, ".csv")
    try:
        df.to_csv(temp_path, index=False, float_format=None, lineterminator="\n")
        temp_path.replace(file_path)
    except Exception:
        if temp_path.exists():
            temp_path.unlink()
        raise


def _to_builtin(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): _to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return _to_builtin(value.tolist())
    if isinstance(value, np.generic):
        return _to_builtin(value.item())
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def to_json_text(payload: Dict[str, Any]) -> str:
    """Serialize a report payload; numpy values and enums become builtins."""
    return json.dumps(_to_builtin(payload), indent=2, sort_keys=True) + "\n"


def atomic_write_json(payload: Dict[str, Any], file_path: Path) -> None:
    """Write a JSON document atomically (temp file + rename)."""
    temp_path = _temp_path(file_path, ".json")
    try:
        temp_path.write_text(to_json_text(payload), encoding="utf-8")
        temp_path.replace(file_path)
    except Exception:
        if temp_path.exists():
            temp_path.unlink()
        raise
