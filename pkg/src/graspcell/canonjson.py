"""Canonical JSON serialization with controlled float formatting.

Two consumers need byte-stable JSON: golden scene files (fixed 6-decimal
floats) and bus frames (compact, floats at <= 9 significant digits).  The
stdlib encoder cannot inject a float format, so the tree walk lives here.
"""

from __future__ import annotations

import json
import math
from typing import Any, Callable

# Wire-format float policy: at most 9 significant digits.  A float that was
# produced by quantize_wire() round-trips bit-exactly through this format.
WIRE_FLOAT_FMT = "%.9g"


def _format_float(value: float, fmt: str) -> str:
    if math.isnan(value) or math.isinf(value):
        raise ValueError("non-finite float is not representable in canonical JSON")
    out = fmt % value
    # "%.9g" may emit "1e+05"; normalize the exponent sign padding json allows.
    return out


def quantize_wire(value: float) -> float:
    """Snap a float onto the wire-representable grid (9 significant digits)."""
    return float(WIRE_FLOAT_FMT % float(value))


def dumps(obj: Any, float_fmt: str = WIRE_FLOAT_FMT) -> str:
    """Serialize to canonical JSON: sorted keys, no whitespace, fixed floats."""
    parts: list[str] = []
    _write(obj, float_fmt, parts.append)
    return "".join(parts)


def _write(obj: Any, fmt: str, emit: Callable[[str], None]) -> None:
    if obj is None:
        emit("null")
    elif obj is True:
        emit("true")
    elif obj is False:
        emit("false")
    elif isinstance(obj, int):
        emit(str(obj))
    elif isinstance(obj, float):
        emit(_format_float(obj, fmt))
    elif isinstance(obj, str):
        emit(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, (list, tuple)):
        emit("[")
        for i, item in enumerate(obj):
            if i:
                emit(",")
            _write(item, fmt, emit)
        emit("]")
    elif isinstance(obj, dict):
        emit("{")
        for i, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise TypeError(f"canonical JSON requires str keys, got {type(key).__name__}")
            if i:
                emit(",")
            emit(json.dumps(key, ensure_ascii=True))
            emit(":")
            _write(obj[key], fmt, emit)
        emit("}")
    else:
        raise TypeError(f"not canonically serializable: {type(obj).__name__}")


def loads(text: str | bytes) -> Any:
    return json.loads(text)
