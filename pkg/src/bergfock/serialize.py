"""Deterministic JSON and CSV output.

Floats are written with 17 significant digits and keys keep insertion
order, so identical runs give byte-identical files.  Non-finite floats are
written as the strings "inf", "-inf" and "nan".
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

from .space import Poly


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = f"{x:.17g}"
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def to_plain(obj):
    """Convert numpy scalars/arrays, Poly and dataclasses into JSON-ready values."""
    if isinstance(obj, Poly):
        return obj.to_pairs()
    if hasattr(obj, "to_dict"):
        return to_plain(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def _emit(obj, indent: int, level: int, out: list):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(k)}: ")
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            out.append("[" + ", ".join(_float(v) if isinstance(v, float) else str(v) for v in obj) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    out: list = []
    _emit(to_plain(obj), indent, 0, out)
    return "".join(out) + "\n"


def _restore(obj):
    if isinstance(obj, str) and obj in ("inf", "-inf", "nan"):
        return float(obj)
    if isinstance(obj, list):
        return [_restore(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _restore(v) for k, v in obj.items()}
    return obj


def loads(text: str):
    return _restore(json.loads(text))


def read_poly(path: str) -> Poly:
    """A polynomial file: a list of numbers or [re, im] pairs, or an object
    with a ``coefficients`` list (so solution files can be reused)."""
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        if "coefficients" not in data:
            raise ValueError(f"{path}: expected a 'coefficients' list")
        data = data["coefficients"]
    if not isinstance(data, list) or not data:
        raise ValueError(f"{path}: expected a non-empty list of coefficients")
    return Poly.from_pairs(data)


def write_poly(path: str, f: Poly) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(f.to_pairs()))


def csv_table(header, rows, comment: str | None = None) -> str:
    lines = [f"# {comment}"] if comment else []
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(f"{float(v):.17g}" for v in row))
    return "\n".join(lines) + "\n"
