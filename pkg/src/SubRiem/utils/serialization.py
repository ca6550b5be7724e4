"""
--- Serialization ---

Deterministic JSON encoding for reports. Floats are written with 17
significant digits so that every double survives a round trip and
identical inputs give byte-identical output.

License:  Apache-2.0 license
"""

import re
import json
import math
from typing import Any, Final

import numpy as np

try:
    from src.SubRiem.utils.cons import SIGNIFICANT_DIGITS
except ImportError:
    from utils.cons import SIGNIFICANT_DIGITS


FLOAT_MARKER: Final[str] = "\u0000float:"
FLOAT_MARKER_PATTERN: Final[re.Pattern] = re.compile(r'"\\u0000float:([^"]*)"')


def format_float(value: float) -> str:
    """
    Format a finite float with SIGNIFICANT_DIGITS significant digits.
    Negative zero is written as 0.0.

    Args:
        value (float): The value.

    Returns:
        str: A JSON number literal.
    """

    value = float(value)
    if value == 0.0:
        value = 0.0

    text = format(value, f".{SIGNIFICANT_DIGITS}g")
    if "." not in text and "e" not in text and "n" not in text:
        text += ".0"

    return text


def _prepare(data: Any) -> Any:
    if isinstance(data, dict):
        return {str(key): _prepare(value) for key, value in data.items()}

    if isinstance(data, np.ndarray):
        return _prepare(data.tolist())

    if isinstance(data, (list, tuple)):
        return [_prepare(item) for item in data]

    if isinstance(data, (bool, np.bool_)):
        return bool(data)

    if isinstance(data, (int, np.integer)):
        return int(data)

    if isinstance(data, (float, np.floating)):
        if not math.isfinite(float(data)):
            return None
        return FLOAT_MARKER + format_float(float(data))

    return data


def dumps(data: Any, indent: int = 2) -> str:
    """
    Encode a report as deterministic JSON.

    Args:
        data (Any): Nested dicts, lists, numbers, strings and numpy arrays.
        indent (int): Indentation of the output.

    Returns:
        str: The JSON text. Non-finite floats are written as null.
    """

    text = json.dumps(_prepare(data), indent = indent, ensure_ascii = False)
    return FLOAT_MARKER_PATTERN.sub(lambda match: match.group(1), text)


def canonical_dumps(data: Any) -> str:
    """
    Compact JSON with sorted keys, the input of spec digests.
    """

    text = json.dumps(
        _prepare(data), sort_keys = True, separators = (",", ":"), ensure_ascii = False
    )
    return FLOAT_MARKER_PATTERN.sub(lambda match: match.group(1), text)


if __name__ == "__main__":
    print("serialization.py: This file is not designed to be executed.")
