"""JSON state files.

Pure:  {"kind": "pure", "num_qubits": n, "amplitudes": [[re, im], ...]}
Mixed: {"kind": "mixed", "num_qubits": n, "entries": [[[re, im], ...], ...]}

``num_qubits`` is optional for mixed files. Floats are written with 17
significant digits, so a write/read round trip is exact.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Union

import numpy as np

from .errors import NumericalIntegrityError, StateFileError
from .tensor import DensityMatrix, PureState

State = Union[PureState, DensityMatrix]


def fmt17(x: float) -> str:
    """Format a float with 17 significant digits (exact round trip)."""
    return format(float(x), ".17g")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _emit(obj, indent, 0) + "\n"


def _emit(o, indent, level):
    if o is None or isinstance(o, (bool, np.bool_)):
        return "null" if o is None else ("true" if o else "false")
    if isinstance(o, (int, np.integer)):
        return str(int(o))
    if isinstance(o, (float, np.floating)):
        return fmt17(o) if np.isfinite(o) else "null"
    if isinstance(o, str):
        return json.dumps(o, ensure_ascii=False)
    if isinstance(o, np.ndarray):
        o = o.tolist()
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(o, dict):
        if not o:
            return "{}"
        items = [json.dumps(str(k), ensure_ascii=False) + ": " + _emit(v, indent, level + 1)
                 for k, v in o.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(o, (list, tuple)):
        if not o:
            return "[]"
        parts = [_emit(v, indent, level + 1) for v in o]
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in o):
            return "[" + ", ".join(parts) + "]"
        return "[" + pad + ("," + pad).join(parts) + end + "]"
    raise TypeError(f"cannot serialize {type(o).__name__}")


def complex_pairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).reshape(-1)]


def state_to_dict(state: State) -> dict:
    if isinstance(state, PureState):
        return {"kind": "pure", "num_qubits": state.num_qubits,
                "amplitudes": complex_pairs(state.amplitudes)}
    return {"kind": "mixed", "num_qubits": state.num_qubits,
            "entries": [complex_pairs(row) for row in state.entries]}


def _parse_complex(item, field):
    if (not isinstance(item, (list, tuple)) or len(item) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in item)):
        raise StateFileError("expected a [re, im] pair of numbers", field=field)
    z = complex(item[0], item[1])
    if not np.isfinite(z):
        raise StateFileError("non-finite number", field=field)
    return z


def state_from_dict(data) -> State:
    if not isinstance(data, dict):
        raise StateFileError("top level must be a JSON object")
    kind = data.get("kind")
    if kind not in ("pure", "mixed"):
        raise StateFileError("kind must be 'pure' or 'mixed'", field="kind")
    n = data.get("num_qubits")
    if n is not None and (not isinstance(n, int) or isinstance(n, bool) or not 1 <= n <= 3):
        raise StateFileError("num_qubits must be 1, 2 or 3", field="num_qubits")

    try:
        if kind == "pure":
            amps = data.get("amplitudes")
            if not isinstance(amps, list):
                raise StateFileError("missing amplitude list", field="amplitudes")
            if n is None:
                raise StateFileError("pure files need num_qubits", field="num_qubits")
            if len(amps) != 1 << n:
                raise StateFileError(f"expected {1 << n} amplitudes, got {len(amps)}", field="amplitudes")
            vec = [_parse_complex(a, f"amplitudes[{i}]") for i, a in enumerate(amps)]
            return PureState(vec)

        rows = data.get("entries")
        if not isinstance(rows, list) or not rows:
            raise StateFileError("missing entries matrix", field="entries")
        dim = len(rows)
        if n is not None and dim != 1 << n:
            raise StateFileError(f"expected {1 << n} rows, got {dim}", field="entries")
        mat = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != dim:
                raise StateFileError(f"row must have {dim} entries", field=f"entries[{i}]")
            mat.append([_parse_complex(z, f"entries[{i}][{j}]") for j, z in enumerate(row)])
        return DensityMatrix(np.array(mat))
    except NumericalIntegrityError:
        raise
    except ValueError as exc:
        if isinstance(exc, StateFileError):
            raise
        raise StateFileError(str(exc), field="amplitudes" if kind == "pure" else "entries") from exc


def loads(text: str) -> State:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    return state_from_dict(data)


def read_state(path) -> State:
    return loads(Path(path).read_text(encoding="utf-8"))


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def write_state(path, state: State) -> None:
    write_json(path, state_to_dict(state))
