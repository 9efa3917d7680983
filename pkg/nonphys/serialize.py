"""
JSON encoding shared by the channel files and the command-line reports.
Floats are written with 12 significant digits, keys sorted, so identical runs
produce byte-identical output.
"""
import dataclasses
import enum
import json

import numpy as np

from .exceptions import InputError

SCHEMA_VERSION = 1
SIGNIFICANT_DIGITS = 12


def round_sig(x):
    x = float(x)
    if not np.isfinite(x):
        return None
    r = float('{:.{}g}'.format(x, SIGNIFICANT_DIGITS))
    return 0.0 if r == 0.0 else r


def encode_matrix(m):
    """Complex matrix as nested [[re, im], ...] rows."""
    m = np.asarray(m, dtype=np.complex128)
    return [[[round_sig(z.real), round_sig(z.imag)] for z in row] for row in m]


def decode_matrix(data, name='matrix'):
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError("{} is not a numeric [[re, im]] array: {}".format(name, exc)) from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise InputError("{} must be a 2-D array of [re, im] pairs, got shape {}".format(name, arr.shape))
    return arr[..., 0] + 1j * arr[..., 1]


def to_jsonable(obj):
    """Recursively convert reports, arrays and numbers into plain JSON types."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, 'to_dict'):
            return to_jsonable(obj.to_dict())
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_sig(obj)
    if isinstance(obj, complex):
        return [round_sig(obj.real), round_sig(obj.imag)]
    if hasattr(obj, 'shape') and hasattr(obj, 'dtype'):
        arr = np.asarray(obj)
        if arr.ndim == 0:
            return to_jsonable(arr.item())
        if arr.ndim == 2 and np.iscomplexobj(arr):
            return encode_matrix(arr)
        return [to_jsonable(v) for v in arr.tolist()]
    return obj


def dumps(payload):
    body = {'schema': SCHEMA_VERSION}
    body.update(to_jsonable(payload))
    return json.dumps(body, sort_keys=True, indent=2) + '\n'
