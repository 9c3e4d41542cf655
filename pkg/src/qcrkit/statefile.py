"""Versioned JSON state files.

One complex entry per line as a [real, imaginary] pair in row-major order,
so small fixtures diff cleanly in review. Python's float repr is
shortest-round-trip, which makes write-then-read bit-exact.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import defaults
from .registers import SystemLayout
from .states import QuantumState

FORMAT = "qcr-state/1"


class StateFileError(ValueError):
    """The file is not a loadable state: wrong format, shape, or values."""


def state_to_text(state: QuantumState, note: str | None = None) -> str:
    flat = state.vector if state.is_pure else state.matrix.reshape(-1)
    if not (np.all(np.isfinite(flat.real)) and np.all(np.isfinite(flat.imag))):
        raise StateFileError("state contains non-finite entries")
    lines = ["{", f' "format": {json.dumps(FORMAT)},']
    if note is not None:
        lines.append(f' "note": {json.dumps(str(note))},')
    lines.append(' "layout": [')
    subs = state.layout.to_dict()
    for i, sub in enumerate(subs):
        comma = "," if i < len(subs) - 1 else ""
        lines.append(f"  {json.dumps(sub)}{comma}")
    lines.append(" ],")
    rep = "pure" if state.is_pure else "density"
    lines.append(f' "representation": {json.dumps(rep)},')
    lines.append(' "entries": [')
    last = flat.size - 1
    for idx, z in enumerate(flat):
        comma = "," if idx < last else ""
        lines.append(f"  [{json.dumps(float(z.real))}, {json.dumps(float(z.imag))}]{comma}")
    lines.append(" ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def text_to_state(text: str, cap: int | None = None) -> QuantumState:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise StateFileError(f"not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise StateFileError("top-level JSON value must be an object")
    fmt = doc.get("format")
    if fmt != FORMAT:
        raise StateFileError(f"unsupported format {fmt!r}; expected {FORMAT!r}")
    layout_doc = doc.get("layout")
    if not isinstance(layout_doc, list):
        raise StateFileError("missing or malformed layout")
    try:
        layout = SystemLayout.from_dict(layout_doc)
    except (KeyError, TypeError, ValueError) as e:
        raise StateFileError(f"bad layout: {e}") from None
    limit = defaults.DIM_CAP if cap is None else cap
    if layout.total_dim > limit:
        raise StateFileError(f"state dimension {layout.total_dim} exceeds cap {limit}")
    rep = doc.get("representation")
    if rep not in ("pure", "density"):
        raise StateFileError(f"unknown representation {rep!r}")
    entries = doc.get("entries")
    if not isinstance(entries, list):
        raise StateFileError("missing or malformed entries")
    dim = layout.total_dim
    expected = dim if rep == "pure" else dim * dim
    if len(entries) != expected:
        raise StateFileError(f"expected {expected} entries, found {len(entries)}")
    try:
        pairs = np.asarray(entries, dtype=np.float64)
    except (TypeError, ValueError):
        raise StateFileError("entries must be [real, imaginary] number pairs") from None
    if pairs.shape != (expected, 2):
        raise StateFileError("entries must be [real, imaginary] number pairs")
    if not np.all(np.isfinite(pairs)):
        raise StateFileError("entries contain non-finite values")
    data = pairs[:, 0] + 1j * pairs[:, 1]
    try:
        if rep == "pure":
            return QuantumState(layout, vector=data, copy=False)
        return QuantumState(layout, matrix=data.reshape(dim, dim), copy=False)
    except ValueError as e:
        raise StateFileError(f"entries do not form a valid state: {e}") from None


def write_state(state: QuantumState, path: str | Path, note: str | None = None) -> None:
    Path(path).write_text(state_to_text(state, note=note), encoding="utf-8")


def read_state(path: str | Path, cap: int | None = None) -> QuantumState:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise StateFileError(f"cannot read {path}: {e}") from None
    return text_to_state(text, cap=cap)
