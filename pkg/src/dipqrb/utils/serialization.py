"""JSON helpers for transcripts and statistics snapshots."""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np


def json_serializer(obj: Any) -> Any:
    """``default=`` hook for :func:`json.dumps`.

    Handles numpy scalars and arrays, enums (by value) and paths.

    Raises:
        TypeError: For any other type
    """
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"Type {type(obj)} not serializable")
