"""Canonical JSON encoding and configuration fingerprints."""
from __future__ import annotations

import hashlib
import json
import math

import numpy as np


def jsonable(obj):
    """Canonical JSON-ready form: floats as ``repr``-exact numbers, inf as a string."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def fingerprint(config: dict) -> str:
    """SHA-256 of the canonical JSON encoding of ``config``."""
    text = json.dumps(jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()
