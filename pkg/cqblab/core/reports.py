"""Machine-readable report files."""
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel
from returns.result import Failure, Result, Success

from cqblab import __version__
from cqblab.models.config import AnalysisSettings, JobConfig

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return _plain(value.model_dump(mode="json"))
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_plain(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def to_json(payload: Any) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip floats."""
    return json.dumps(_plain(payload), sort_keys=True, indent=2) + "\n"


def provenance(
    config: JobConfig, settings: AnalysisSettings, **extra: Any
) -> dict[str, Any]:
    """Everything needed to reproduce a verdict."""
    return {
        "version": __version__,
        "job": config.model_dump(mode="json", exclude_none=True),
        "settings": settings.model_dump(mode="json"),
        **extra,
    }


def write_json(payload: Any, path: str | Path | None) -> Result[str, str]:
    """Serialize a report; write it when a path is given.

    Returns:
        Result containing the serialized text or an error message
    """
    try:
        text = to_json(payload)
    except (TypeError, ValueError) as e:
        return Failure(f"Error serializing report: {e!s}")
    if path is None:
        return Success(text)
    try:
        Path(path).write_text(text)
        logger.debug("Wrote report to %s", path)
        return Success(text)
    except OSError as e:
        return Failure(f"Error writing report to {path}: {e!s}")
