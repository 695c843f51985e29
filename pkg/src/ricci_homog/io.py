"""JSON storage for StructureData, LieAlgebraTable and tensor/metric files.

StructureData keeps gamma as a list of entries with 1-based i <= k <= l;
the loader expands them by symmetry.  Bracket tables store entries with
a < b only, antisymmetry in the first pair being implied.
"""

from __future__ import annotations

import itertools
import json
import math
from pathlib import Path

import numpy as np

from .errors import ParseError, SchemaError
from .structure import InvariantTensor, LieAlgebraTable, StructureData


def _read_json(path):
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _require(doc, key, kind, where):
    if not isinstance(doc, dict) or key not in doc:
        raise SchemaError(f"{where}: missing required field {key!r}", field=key)
    value = doc[key]
    if kind is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    else:
        ok = isinstance(value, kind) and not (kind is int and isinstance(value, bool))
    if not ok:
        raise SchemaError(f"{where}: field {key!r} must be {kind.__name__}", field=key)
    return value


def _number_list(doc, key, where, kind=float, length=None):
    values = _require(doc, key, list, where)
    for j, v in enumerate(values):
        bad = isinstance(v, bool) or not isinstance(v, (int, float) if kind is float else int)
        if bad:
            raise SchemaError(f"{where}: {key}[{j}] must be {kind.__name__}", field=f"{key}[{j}]")
    if length is not None and len(values) != length:
        raise SchemaError(f"{where}: {key} must have length {length}, got {len(values)}", field=key)
    return values


def structure_to_dict(sd: StructureData) -> dict:
    entries = []
    for i, k, l in itertools.combinations_with_replacement(range(sd.s), 3):
        entries.append({"i": i + 1, "k": k + 1, "l": l + 1, "value": float(sd.gamma[i, k, l])})
    doc = {
        "label": sd.label,
        "s": sd.s,
        "d": [int(v) for v in sd.d],
        "b": [float(v) for v in sd.b],
        "gamma": entries,
    }
    if sd.zeta is not None:
        doc["zeta"] = [float(v) for v in sd.zeta]
    return doc


def structure_from_dict(doc, where="<structure>") -> StructureData:
    s = _require(doc, "s", int, where)
    if s < 1:
        raise SchemaError(f"{where}: s must be >= 1", field="s")
    d = _number_list(doc, "d", where, kind=int, length=s)
    b = _number_list(doc, "b", where, length=s)
    entries = _require(doc, "gamma", list, where)
    gamma = np.zeros((s, s, s))
    seen = set()
    for j, ent in enumerate(entries):
        w = f"{where}: gamma[{j}]"
        i, k, l = (_require(ent, key, int, w) for key in ("i", "k", "l"))
        value = _require(ent, "value", float, w)
        if not (1 <= i <= k <= l <= s):
            raise SchemaError(f"{w}: indices must satisfy 1 <= i <= k <= l <= s, got ({i}, {k}, {l})",
                              field=f"gamma[{j}]")
        if (i, k, l) in seen:
            raise SchemaError(f"{w}: duplicate entry ({i}, {k}, {l})", field=f"gamma[{j}]")
        seen.add((i, k, l))
        for p in set(itertools.permutations((i - 1, k - 1, l - 1))):
            gamma[p] = value
    zeta = None
    if "zeta" in doc and doc["zeta"] is not None:
        zeta = _number_list(doc, "zeta", where, length=s)
    label = doc.get("label", "")
    if not isinstance(label, str):
        raise SchemaError(f"{where}: field 'label' must be str", field="label")
    return StructureData(d, b, gamma, zeta, label)


def table_to_dict(t: LieAlgebraTable) -> dict:
    entries = []
    n = t.dim_g
    for a in range(n):
        for b in range(a + 1, n):
            for e in range(n):
                v = float(t.c[a, b, e])
                if v != 0.0:
                    entries.append({"a": a + 1, "b": b + 1, "e": e + 1, "value": v})
    return {
        "dim_g": n,
        "c": entries,
        "h_indices": [i + 1 for i in t.h_indices],
        "m_blocks": [[i + 1 for i in blk] for blk in t.m_blocks],
    }


def table_from_dict(doc, where="<table>") -> LieAlgebraTable:
    n = _require(doc, "dim_g", int, where)
    if n < 1:
        raise SchemaError(f"{where}: dim_g must be >= 1", field="dim_g")
    c = np.zeros((n, n, n))
    for j, ent in enumerate(_require(doc, "c", list, where)):
        w = f"{where}: c[{j}]"
        a, b, e = (_require(ent, key, int, w) for key in ("a", "b", "e"))
        value = _require(ent, "value", float, w)
        if not (1 <= a < b <= n and 1 <= e <= n):
            raise SchemaError(f"{w}: need 1 <= a < b <= dim_g and 1 <= e <= dim_g", field=f"c[{j}]")
        c[a - 1, b - 1, e - 1] = value
        c[b - 1, a - 1, e - 1] = -value
    h = _number_list(doc, "h_indices", where, kind=int)
    blocks = _require(doc, "m_blocks", list, where)
    for j, blk in enumerate(blocks):
        if not isinstance(blk, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in blk):
            raise SchemaError(f"{where}: m_blocks[{j}] must be a list of int", field=f"m_blocks[{j}]")
    for v in h + [v for blk in blocks for v in blk]:
        if not 1 <= v <= n:
            raise SchemaError(f"{where}: basis index {v} out of range 1..{n}", field="m_blocks")
    return LieAlgebraTable(c, [v - 1 for v in h], [[v - 1 for v in blk] for blk in blocks])


def tensor_from_dict(doc, where="<tensor>") -> InvariantTensor:
    z = _number_list(doc, "z", where)
    return InvariantTensor(z)


def load(path):
    """Load a StructureData or LieAlgebraTable file, dispatching on its keys."""
    doc = _read_json(path)
    if isinstance(doc, dict) and "dim_g" in doc:
        return table_from_dict(doc, str(path))
    return structure_from_dict(doc, str(path))


def load_structure(path) -> StructureData:
    return structure_from_dict(_read_json(path), str(path))


def load_table(path) -> LieAlgebraTable:
    return table_from_dict(_read_json(path), str(path))


def load_tensor(path) -> InvariantTensor:
    return tensor_from_dict(_read_json(path), str(path))


def save(obj, path):
    if isinstance(obj, LieAlgebraTable):
        doc = table_to_dict(obj)
    elif isinstance(obj, StructureData):
        doc = structure_to_dict(obj)
    else:
        raise TypeError(f"cannot save {type(obj).__name__}")
    Path(path).write_text(dumps(doc) + "\n")


def _encode(value, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in value):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in value) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return "null"
        text = format(v, ".17g")
        if not any(ch in text for ch in ".en"):
            text += ".0"
        return text
    return json.dumps(value)


def dumps(doc, indent=2) -> str:
    """Deterministic JSON text with every float written to 17 significant digits."""
    return _encode(doc, indent, 0)
