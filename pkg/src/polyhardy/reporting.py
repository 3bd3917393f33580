"""Deterministic JSON encoding for reports.

Complex scalars become [re, im] pairs, matrices become row-major nested
lists under a shape header, dataclasses become plain dicts, and the final
document is serialized with sorted keys so reports are byte-stable.
"""
from __future__ import annotations

import dataclasses
import json
from typing import Any

import numpy as np


def encode(obj: Any) -> Any:
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return float(obj)
    if isinstance(obj, complex):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.complexfloating,)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        if obj.ndim == 1:
            return [encode(x) for x in obj.tolist()]
        if obj.ndim == 2:
            return {
                "shape": [int(obj.shape[0]), int(obj.shape[1])],
                "rows": [[encode(x) for x in row] for row in obj.tolist()],
            }
        raise TypeError("only 1-d and 2-d arrays are encodable")
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: encode(getattr(obj, f.name)) for f in dataclasses.fields(obj)
        }
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(x) for x in obj]
    raise TypeError(f"cannot encode {type(obj).__name__}")


def canonical_json(obj: Any) -> str:
    return json.dumps(encode(obj), sort_keys=True, indent=2) + "\n"


def strip_timing(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timing"}
