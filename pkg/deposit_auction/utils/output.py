"""Writers for command output: JSON summaries and CSV curves."""

import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Optional, Sequence, TextIO

import numpy as np
from pydantic import BaseModel

from deposit_auction.core.config import settings
from deposit_auction.core.logging import get_logger

logger = get_logger(__name__)


def round_floats(obj: Any, digits: int = settings.float_digits) -> Any:
    """Round every float in a nested structure to ``digits`` significant digits."""
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return obj
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, dict):
        return {key: round_floats(value, digits) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(value, digits) for value in obj]
    return obj


def _emit(text: str, out: Optional[Path], stream: Optional[TextIO] = None) -> None:
    if out is None:
        (stream or sys.stdout).write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    logger.info("Wrote output", extra={"path": str(out), "bytes": len(text)})


def dump_json(model: BaseModel) -> str:
    data = round_floats(model.model_dump(mode="json"))
    return json.dumps(data, indent=2) + "\n"


def write_json(model: BaseModel, out: Optional[Path] = None, stream: Optional[TextIO] = None) -> None:
    """Write a pydantic model as indented JSON to ``out``, else to ``stream`` (stdout)."""
    _emit(dump_json(model), out, stream)


def write_csv(columns: Sequence[np.ndarray], header: Sequence[str], out: Optional[Path] = None) -> None:
    """Write equal-length columns as CSV with a fixed header."""
    buffer = io.StringIO()
    np.savetxt(
        buffer,
        np.column_stack([np.asarray(col, dtype=float) for col in columns]),
        fmt=f"%.{settings.float_digits}g",
        delimiter=",",
        header=",".join(header),
        comments="",
    )
    _emit(buffer.getvalue(), out)
