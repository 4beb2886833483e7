"""JSON state files.

Document shape::

    {"layout": [{"label": "A", "dim": 2, "party": "Alice"}, ...],
     "kind": "pure" | "density",
     "data": [[re, im], ...]            # pure: flat amplitudes
           | [[[re, im], ...], ...]}    # density: row-major rows
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .qstate import DensityOperator, Party, PureState, State, Subsystem, SystemLayout


class StateFormatError(ValueError):
    """Malformed state document. ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _pair(x: complex) -> list[float]:
    return [float(np.real(x)), float(np.imag(x))]


def state_to_dict(state: State) -> dict[str, Any]:
    doc: dict[str, Any] = {"layout": state.layout.to_list()}
    if isinstance(state, PureState):
        doc["kind"] = "pure"
        doc["data"] = [_pair(a) for a in state.amplitudes]
    else:
        doc["kind"] = "density"
        doc["data"] = [[_pair(a) for a in row] for row in state.matrix]
    return doc


def _parse_complex(value, field: str) -> complex:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise StateFormatError(field, f"expected [re, im] pair of numbers, got {value!r}")
    return complex(value[0], value[1])


def _parse_layout(raw) -> SystemLayout:
    if not isinstance(raw, list) or not raw:
        raise StateFormatError("layout", "expected a nonempty list of subsystems")
    subs = []
    for i, entry in enumerate(raw):
        where = f"layout[{i}]"
        if not isinstance(entry, dict):
            raise StateFormatError(where, "expected an object with label, dim, party")
        for key in ("label", "dim", "party"):
            if key not in entry:
                raise StateFormatError(f"{where}.{key}", "missing")
        if not isinstance(entry["label"], str):
            raise StateFormatError(f"{where}.label", "expected a string")
        dim = entry["dim"]
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
            raise StateFormatError(f"{where}.dim", f"expected a positive integer, got {dim!r}")
        try:
            party = Party(entry["party"])
        except ValueError:
            choices = ", ".join(p.value for p in Party)
            raise StateFormatError(f"{where}.party", f"unknown party {entry['party']!r} (one of {choices})") from None
        subs.append(Subsystem(entry["label"], dim, party))
    try:
        return SystemLayout(tuple(subs))
    except ValueError as exc:
        raise StateFormatError("layout", str(exc)) from None


def state_from_dict(doc: dict[str, Any]) -> State:
    """Parse a state document; raises :class:`StateFormatError` or ``ValueError`` on invariant violations."""
    if not isinstance(doc, dict):
        raise StateFormatError("<root>", "expected a JSON object")
    for key in ("layout", "kind", "data"):
        if key not in doc:
            raise StateFormatError(key, "missing")
    layout = _parse_layout(doc["layout"])
    d = layout.total_dim
    kind = doc["kind"]
    data = doc["data"]
    if kind == "pure":
        if not isinstance(data, list) or len(data) != d:
            n = len(data) if isinstance(data, list) else type(data).__name__
            raise StateFormatError("data", f"expected {d} amplitude pairs, got {n}")
        amps = np.array([_parse_complex(v, f"data[{i}]") for i, v in enumerate(data)])
        return PureState(layout, amps)
    if kind == "density":
        if not isinstance(data, list) or len(data) != d:
            raise StateFormatError("data", f"expected {d} rows")
        rows = []
        for i, row in enumerate(data):
            if not isinstance(row, list) or len(row) != d:
                raise StateFormatError(f"data[{i}]", f"expected a row of {d} pairs")
            rows.append([_parse_complex(v, f"data[{i}][{j}]") for j, v in enumerate(row)])
        return DensityOperator(layout, np.array(rows))
    raise StateFormatError("kind", f"expected 'pure' or 'density', got {kind!r}")


def dumps_state(state: State) -> str:
    # repr-precision floats round-trip exactly
    return json.dumps(state_to_dict(state), indent=1)


def save_state(state: State, path) -> None:
    Path(path).write_text(dumps_state(state) + "\n")


def load_state(path) -> State:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"line {exc.lineno}", f"invalid JSON: {exc.msg}") from None
    return state_from_dict(doc)
