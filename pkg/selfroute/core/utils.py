import json
import math
import re
from fractions import Fraction
from typing import Any, Union

import numpy as np

from selfroute.core.constants import SIGNIFICANT_DIGITS

_NATURAL_SPLIT = re.compile(r"(\d+)")


def parse_number(value: Union[str, int, float]) -> float:
    """
    Parse a decimal or an exact fraction such as "4/21".

    Args:
        value: Number, decimal string or fraction string

    Returns:
        float: The parsed value

    Raises:
        ValueError: If the value is not a finite number
    """
    if isinstance(value, bool):
        raise ValueError(f"Not a number: {value!r}")
    if isinstance(value, (int, float)):
        parsed = float(value)
    else:
        try:
            parsed = float(Fraction(str(value).strip()))
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Not a number: {value!r}") from e
    if not math.isfinite(parsed):
        raise ValueError(f"Not a finite number: {value!r}")
    return parsed


def natural_key(identifier: Any) -> tuple:
    """Sort key that orders "e2" before "e10"."""
    parts = _NATURAL_SPLIT.split(str(identifier))
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts if p != "")


def round_significant(value: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    if value == 0 or not math.isfinite(value):
        return float(value)
    return float(f"{value:.{digits}g}")


def to_serializable(value: Any) -> Any:
    """Recursively convert numpy values and round floats for stable output."""
    if isinstance(value, dict):
        return {str(k): to_serializable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_serializable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_serializable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return None
        return round_significant(value)
    return value


def dump_json(payload: Any) -> str:
    return json.dumps(to_serializable(payload), indent=2)
