"""Deterministic JSON output shared by the command-line tools."""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

SCHEMA = "sphere-flows/1"
DIGITS = 12


def normalize(obj: Any, digits: int = DIGITS) -> Any:
    """Convert to plain JSON types with floats rounded to ``digits`` decimals.

    Complex numbers become ``[re, im]``; non-finite floats become strings so
    the output stays valid JSON.  ``-0.0`` is printed as ``0.0`` so reruns are
    byte-identical.
    """
    if isinstance(obj, dict):
        return {str(k): normalize(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v, digits) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        x = round(x, digits)
        return 0.0 if x == 0 else x
    if isinstance(obj, (complex, np.complexfloating)):
        return [normalize(obj.real, digits), normalize(obj.imag, digits)]
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist(), digits)
    if hasattr(obj, "to_json"):
        return normalize(obj.to_json(), digits)
    return obj


def document(kind: str, payload: dict) -> dict:
    """Wrap ``payload`` with the schema tag and document kind."""
    out = {"schema": SCHEMA, "kind": kind}
    out.update(payload)
    return normalize(out)


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
