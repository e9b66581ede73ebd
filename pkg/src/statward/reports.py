"""Report serialisation: versioned JSON, CSV and plain tables, written atomically."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from .numeric import Approx, format_value

SCHEMA = 1


class ReportEncoder(json.JSONEncoder):
    """Fractions become "a/b" strings so nothing is rounded on the way out."""

    def default(self, o):
        if isinstance(o, Fraction):
            return str(o)
        if isinstance(o, Approx):
            return format_value(o)
        if isinstance(o, (np.integer,)):
            return int(o)
        if isinstance(o, (np.floating,)):
            return float(o)
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (set, frozenset, tuple)):
            return list(o)
        if hasattr(o, "to_dict"):
            return o.to_dict()
        return str(o)


def envelope(command: str, config: dict, body: dict) -> dict:
    return {"schema": SCHEMA, "command": command,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "config": config, "result": body}


def to_json(report: dict) -> str:
    return json.dumps(report, cls=ReportEncoder, indent=2, sort_keys=True) + "\n"


def _cell(v):
    if isinstance(v, (Fraction, Approx)):
        return format_value(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def to_table(columns, rows) -> str:
    lines = [list(map(str, columns))] + [[str(_cell(v)) for v in r] for r in rows]
    widths = [max(len(line[i]) for line in lines) for i in range(len(columns))]
    out = ["  ".join(v.ljust(w) for v, w in zip(line, widths)).rstrip() for line in lines]
    out.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(out) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write through a temp file in the same directory, then rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def strip_timestamp(text: str) -> str:
    """JSON text with the timestamp field removed, for reproducibility checks."""
    data = json.loads(text)
    data.pop("timestamp", None)
    return json.dumps(data, sort_keys=True)
