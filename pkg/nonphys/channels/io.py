import json
import logging
import os

from ..exceptions import InputError
from ..serialize import decode_matrix, encode_matrix, SCHEMA_VERSION
from .library import ALIASES, BUILTINS, builtin
from .maps import from_choi, from_kraus

logger = logging.getLogger(__name__)

BUILTIN_PREFIX = 'builtin:'


def _convert(name, key, raw, kind):
    try:
        if kind is list:
            return [float(v) for v in raw.split(',') if v.strip()]
        if kind is int:
            value = float(raw)
            if value != int(value):
                raise ValueError("not an integer")
            return int(value)
        return float(raw)
    except ValueError as exc:
        raise InputError("parameter {}={!r} of {!r}: {}".format(key, raw, name, exc)) from exc


def parse_query(name, query, kinds):
    """Parameters of a 'k=v&k=v' query, converted with the types in `kinds`."""
    params = {}
    for item in filter(None, query.split('&')):
        key, sep, raw = item.partition('=')
        if not sep:
            raise InputError("malformed parameter {!r} in {!r}, expected k=v".format(item, name))
        key = key.strip()
        if key not in kinds:
            raise InputError("unknown parameter {!r} for {!r}; allowed: {}".format(
                key, name, ', '.join(sorted(kinds)) or 'none'))
        if key in params:
            raise InputError("parameter {!r} given twice".format(key))
        params[key] = _convert(name, key, raw, kinds[key])
    return params


def parse_builtin(text):
    """
    Parse a mini-spec 'builtin:<name>?k=v&k=v' (the prefix is optional) and construct the map.
    List parameters are comma separated.
    """
    if text.startswith(BUILTIN_PREFIX):
        text = text[len(BUILTIN_PREFIX):]
    name, _, query = text.partition('?')
    name = ALIASES.get(name.strip(), name.strip())
    if name not in BUILTINS:
        raise InputError("unknown builtin map {!r}; known: {}".format(name, ', '.join(sorted(BUILTINS))))
    params = parse_query(name, query, BUILTINS[name].params)
    logger.debug("builtin %s with %s", name, params)
    return builtin(name, **params)


def channel_from_dict(data):
    if not isinstance(data, dict):
        raise InputError("channel description must be a JSON object")
    try:
        d_in, d_out = int(data['d_in']), int(data['d_out'])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("channel description needs integer 'd_in' and 'd_out'") from exc
    has_kraus, has_choi = 'kraus' in data, 'choi' in data
    if has_kraus == has_choi:
        raise InputError("channel description needs exactly one of 'kraus' or 'choi'")
    if has_choi:
        return from_choi(decode_matrix(data['choi'], 'choi'), d_in, d_out)
    kraus = data['kraus']
    if not isinstance(kraus, list) or not kraus:
        raise InputError("'kraus' must be a nonempty list of matrices")
    ops = [decode_matrix(k, 'kraus[{}]'.format(i)) for i, k in enumerate(kraus)]
    if any(k.shape != (d_out, d_in) for k in ops):
        raise InputError("Kraus operators must all be {}x{}".format(d_out, d_in))
    return from_kraus(ops)


def channel_to_dict(m):
    return {'schema': SCHEMA_VERSION, 'd_in': m.d_in, 'd_out': m.d_out, 'choi': encode_matrix(m.choi)}


def load_channel(path):
    try:
        with open(path) as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise InputError("{}: malformed JSON at line {} column {}: {}".format(path, exc.lineno, exc.colno, exc.msg)) from exc
    except OSError as exc:
        raise InputError("cannot read channel file {}: {}".format(path, exc)) from exc
    return channel_from_dict(data)


def dump_channel(m, path):
    with open(path, 'w') as f:
        json.dump(channel_to_dict(m), f, sort_keys=True)


def parse_channel_source(text):
    """A 'builtin:' mini-spec or the path of a channel JSON file."""
    if text.startswith(BUILTIN_PREFIX):
        return parse_builtin(text)
    if not os.path.exists(text):
        raise InputError("channel source {!r} is neither a builtin mini-spec nor an existing file".format(text))
    return load_channel(text)
