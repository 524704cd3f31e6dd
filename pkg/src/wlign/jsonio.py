"""Canonical JSON emission: sorted keys, compact separators, rationals as "num/den"."""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction

import numpy as np

from .ign import FeatureTensor
from .wl import RefinementHistory, history_to_dict


def tensor_to_dict(a: FeatureTensor) -> dict:
    rows = a.to_fractions().reshape(-1, a.channels) if a.mode == "rational" else a.values.reshape(-1, a.channels)
    tuples = np.ndindex(*(a.n,) * a.k)
    return {"k": a.k, "n": a.n, "channels": a.channels, "mode": a.mode,
            "rows": [[list(t), list(r)] for t, r in zip(tuples, rows.tolist())]}


def to_jsonable(obj):
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted((to_jsonable(v) for v in obj), key=lambda x: json.dumps(x, sort_keys=True))
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, FeatureTensor):
        return to_jsonable(tensor_to_dict(obj))
    if isinstance(obj, RefinementHistory):
        return to_jsonable(history_to_dict(obj))
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(dataclasses.asdict(obj))
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def emit_report(obj) -> bytes:
    """Canonical bytes for a report, history, tensor or plain JSON-like value."""
    return dumps(obj).encode()
