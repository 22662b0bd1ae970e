"""Key=value experiment config files.

OpticalModel and ProtocolConfig share one flat file format, read through
python-dotenv so comments, quoting and blank lines behave like ``.env``.
"""

from __future__ import annotations

from collections.abc import Mapping
from pathlib import Path

from dotenv import dotenv_values

from dipqrb.exceptions import ValidationError


def read_config(path: str | Path) -> dict[str, str]:
    """Read a key=value config file.

    Args:
        path: File path

    Returns:
        Mapping of lower-cased keys to raw string values

    Raises:
        ValidationError: If the file does not exist
    """
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"Config file not found: {path}")

    values = dotenv_values(path)
    return {key.lower(): value for key, value in values.items() if value is not None}


def format_value(value: object) -> str:
    """Render one config value (sequences become comma lists)."""
    if isinstance(value, (list, tuple)):
        return ",".join(format_value(v) for v in value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def write_config(path: str | Path, values: Mapping[str, object]) -> None:
    """Write (or merge into) a key=value config file.

    Existing keys not present in ``values`` are preserved so one file
    can hold both the optical model and the protocol settings.
    """
    path = Path(path)
    merged: dict[str, str] = read_config(path) if path.is_file() else {}
    merged.update({key: format_value(value) for key, value in values.items()})

    lines = [f"{key}={value}" for key, value in merged.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def split_list(value: object) -> object:
    """Split a comma list from a config file; other values pass through."""
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    return value
