"""JSON algebra files and report serialization.

An algebra file looks like::

    {
      "name": "e2r",
      "dim": 4,
      "scalars": "exact",
      "brackets": [{"i": 0, "j": 2, "k": 3, "c": "1"}, ...],
      "metric": [["1", "0", ...], ...],
      "J": [[...], ...]
    }

``brackets`` lists ``[x_i, x_j] = ... + c x_k`` with ``i < j``; ``metric``
defaults to the identity and ``J`` is optional.  With ``"scalars": "exact"``
every number must be an integer or a rational string such as ``"-3/4"``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .algebra import AlmostComplexStructure, LieAlgebra, MetricTensor
from .errors import InputError
from .scalars import ExactComplex, format_scalar, is_exact, parse_float, parse_rational, to_float


def _matrix(rows, n, field, parse):
    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise InputError(f"{field} must be a {n}x{n} matrix", field)
    out = np.empty((n, n), dtype=object)
    for a, row in enumerate(rows):
        for b, v in enumerate(row):
            out[a, b] = parse(v, f"{field}[{a}][{b}]")
    return out


def parse_algebra(data, exact=None):
    """Build ``(L, g, J, meta)`` from a decoded JSON object.

    ``exact`` overrides the file's ``scalars`` field; forcing exact mode on a
    file holding decimal floats is an input error.
    """
    if not isinstance(data, dict):
        raise InputError("top level must be an object", "<root>")
    n = data.get("dim")
    if not isinstance(n, int) or isinstance(n, bool):
        raise InputError("dim must be an integer", "dim")
    if n < 2:
        raise InputError(f"dim must be at least 2, got {n}", "dim")
    mode = data.get("scalars", "exact")
    if mode not in ("exact", "float"):
        raise InputError("scalars must be 'exact' or 'float'", "scalars")
    use_exact = (mode == "exact") if exact is None else exact
    parse = parse_rational if use_exact else parse_float

    brackets = data.get("brackets", [])
    if not isinstance(brackets, list):
        raise InputError("brackets must be a list", "brackets")
    c = np.empty((n, n, n), dtype=object)
    c.fill(parse(0, "brackets"))
    seen = set()
    for pos, entry in enumerate(brackets):
        fld = f"brackets[{pos}]"
        if not isinstance(entry, dict) or not {"i", "j", "k", "c"} <= entry.keys():
            raise InputError("bracket entries need i, j, k and c", fld)
        i, j, k = entry["i"], entry["j"], entry["k"]
        for name, v in (("i", i), ("j", j), ("k", k)):
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < n:
                raise InputError(f"index {name}={v!r} out of range 0..{n - 1}", f"{fld}.{name}")
        if i >= j:
            raise InputError(f"need i < j, got i={i}, j={j}", fld)
        if (i, j, k) in seen:
            raise InputError(f"duplicate entry for [x{i}, x{j}] along x{k}", fld)
        seen.add((i, j, k))
        v = parse(entry["c"], f"{fld}.c")
        c[k, i, j] = v
        c[k, j, i] = -v
    if not use_exact:
        c = c.astype(float)
    try:
        L = LieAlgebra(c)
    except InputError as exc:
        raise InputError(str(exc), exc.field or "brackets") from exc

    if "metric" in data and data["metric"] is not None:
        gm = _matrix(data["metric"], n, "metric", parse)
        gm = gm if use_exact else gm.astype(float)
    else:
        gm = MetricTensor.identity(n, exact=use_exact).g
    try:
        g = MetricTensor(gm)
    except InputError as exc:
        raise InputError(str(exc), "metric") from exc

    J = None
    if data.get("J") is not None:
        Jm = _matrix(data["J"], n, "J", parse)
        J = AlmostComplexStructure(Jm if use_exact else Jm.astype(float))
    meta = {"name": data.get("name", ""), "scalars": "exact" if use_exact else "float"}
    return L, g, J, meta


def load_algebra(path, exact=None):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {p}: {exc.strerror}", "path") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{p}: invalid JSON at line {exc.lineno} column {exc.colno}", "<json>") from exc
    return parse_algebra(data, exact=exact)


def _scalar_out(v, exact):
    if exact:
        return str(v)
    x = float(v)
    return int(x) if x.is_integer() else x


def algebra_to_dict(L, g=None, J=None, name=""):
    exact = L.exact and (g is None or g.exact) and (J is None or J.exact)
    c = L.c if exact else to_float(L.c)
    n = L.dim
    out = {"name": name, "dim": n, "scalars": "exact" if exact else "float"}
    out["brackets"] = [
        {"i": i, "j": j, "k": k, "c": _scalar_out(c[k, i, j], exact)}
        for i in range(n) for j in range(i + 1, n) for k in range(n)
        if c[k, i, j] != 0
    ]
    if g is not None:
        gm = g.g if exact else to_float(g.g)
        out["metric"] = [[_scalar_out(v, exact) for v in row] for row in gm]
    if J is not None:
        Jm = J.J if exact else to_float(J.J)
        out["J"] = [[_scalar_out(v, exact) for v in row] for row in Jm]
    return out


def dump_algebra(L, g=None, J=None, name=""):
    """Readable JSON: one bracket entry or matrix row per line."""
    d = algebra_to_dict(L, g, J, name)
    parts = []
    for key, val in d.items():
        if isinstance(val, list):
            rows = ",\n".join("    " + json.dumps(v) for v in val)
            parts.append(f'  "{key}": [\n{rows}\n  ]' if val else f'  "{key}": []')
        else:
            parts.append(f"  {json.dumps(key)}: {json.dumps(val)}")
    return "{\n" + ",\n".join(parts) + "\n}\n"


def jsonable(obj):
    """Recursively convert numbers, arrays and exact scalars for json.dumps."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()] if obj.dtype != object else [jsonable(v) for v in obj]
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, ExactComplex):
        return format_scalar(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return format_scalar(obj)


def array_to_json(arr):
    arr = np.asarray(arr)
    if is_exact(arr):
        return np.vectorize(format_scalar, otypes=[object])(arr).tolist() if arr.size else arr.tolist()
    if np.iscomplexobj(arr):
        return np.vectorize(lambda z: {"re": float(z.real), "im": float(z.imag)}, otypes=[object])(arr).tolist()
    return arr.tolist()


__all__ = [
    "parse_algebra", "load_algebra", "algebra_to_dict", "dump_algebra", "jsonable", "array_to_json",
]
