"""Byte-stable rendering of reports as JSON, CSV or an aligned text table.

Reals are always written in 12-significant-digit scientific notation and
JSON objects are key-sorted, so identical inputs give identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any

from . import __version__
from .measure import ABLDistribution
from .meter import MeterOutcome, PointerModel
from .scenarios import QueryFailure, ScenarioReport

FORMATS = ("json", "csv", "table")


def fmt_real(x: float) -> str:
    x = float(x) + 0.0  # folds -0.0 into 0.0
    if not math.isfinite(x):
        raise ValueError(f"refusing to serialize non-finite value {x!r}")
    return f"{x:.11e}"


def complex_payload(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def entry_payload(v: Any) -> Any:
    if isinstance(v, QueryFailure):
        return {"error": v.code}
    if isinstance(v, ABLDistribution):
        return [{"eigenvalue": float(o), "probability": float(p)} for o, p in v.entries]
    if isinstance(v, complex):
        return complex_payload(v)
    if isinstance(v, float):
        return float(v)
    return v


def report_payload(report: ScenarioReport) -> dict:
    return {
        "name": report.name,
        "weak_values": {k: entry_payload(v) for k, v in report.weak_values.items()},
        "abl": {k: entry_payload(v) for k, v in report.abl.items()},
        "amplitudes": {k: complex_payload(v) for k, v in report.amplitudes.items()},
        "post_selection_probability": float(report.post_selection_probability),
        "notes": list(report.notes),
    }


def meter_payload(outcome: MeterOutcome, model: PointerModel, ratio: float,
                  peaks: dict[float, float], weak: complex | QueryFailure) -> dict:
    return {
        "model": {"g": float(model.g), "sigma": float(model.sigma)},
        "post_selection_probability": float(outcome.post_selection_probability),
        "pointer_mean": float(outcome.pointer_mean),
        "pointer_variance": float(outcome.pointer_variance),
        "weak_shift_ratio": float(ratio),
        "weak_value": entry_payload(weak),
        "components": [
            {"eigenvalue": float(o), "center": float(c), "amplitude": complex_payload(a),
             "weight": float(w), "peak_weight": float(peaks[o])}
            for (o, c, a), w in zip(outcome.components, outcome.component_weights().values())
        ],
    }


def _dump(obj: Any, indent: int) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, float):
        return fmt_real(obj)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_dump(obj[k], indent + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _dump(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(obj: Any) -> str:
    return _dump(obj, 0) + "\n"


def envelope(scenario: str, fmt: str, payload: Any) -> dict:
    return {"tool_version": __version__, "scenario": scenario, "format": fmt,
            "payload": payload}


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return fmt_real(v)
    return str(v)


def flatten(payload: Any, prefix: tuple[str, ...] = ()) -> list[tuple[str, str]]:
    """(dotted path, value) rows, keys in sorted order, for CSV and tables."""
    if isinstance(payload, dict):
        rows = []
        for k in sorted(payload, key=str):
            rows += flatten(payload[k], prefix + (str(k),))
        return rows
    if isinstance(payload, (list, tuple)):
        rows = []
        for i, v in enumerate(payload):
            rows += flatten(v, prefix + (str(i),))
        return rows
    return [(".".join(prefix), _cell(payload))]


def to_csv(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def to_table(header: list[str], rows: list[list[Any]]) -> str:
    cells = [header] + [[_cell(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render(scenario: str, fmt: str, payload: Any,
           header: list[str] | None = None, rows: list[list[Any]] | None = None) -> str:
    """Render ``payload``; CSV and table use ``header``/``rows`` when given,
    otherwise the flattened payload as ``key,value`` rows."""
    if fmt == "json":
        return to_json(envelope(scenario, fmt, payload))
    if header is None or rows is None:
        header = ["key", "value"]
        rows = [list(r) for r in flatten(payload)]
    if fmt == "csv":
        return to_csv(header, rows)
    if fmt == "table":
        return to_table(header, rows)
    raise ValueError(f"unknown format {fmt!r}")


SWEEP_COLUMNS = ["q", "r", "beta", "re_Nw_D", "im_Nw_D", "re_Nw_B", "im_Nw_B",
                 "abl_N_given_D", "dark_port_flag"]


def sweep_row(report: ScenarioReport, q: float, r: float, beta: float) -> list[Any]:
    row: list[Any] = [float(q), float(r), float(beta)]
    dark = 0
    for port in ("D", "B"):
        w = report.weak_values[f"N@{port}"]
        if isinstance(w, QueryFailure):
            dark = 1
            row += [None, None]
        else:
            row += [float(w.real), float(w.imag)]
    abl = report.abl["N@D"]
    row.append(None if isinstance(abl, QueryFailure) else float(abl.prob(1.0)))
    row.append(dark)
    return row
