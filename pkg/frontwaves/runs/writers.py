"""
CSV and JSON writers for run records.

Output is deterministic: rows keep grid order, floats use Python's shortest
round-trip repr, and nothing time-dependent is written.
"""
import csv
import enum
import io
import json
import math

import numpy as np
from django.conf import settings

from .serializers import OutputFormat, config_payload


def _cell(value):
    if isinstance(value, np.generic):
        value = value.item()
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _json_value(value):
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, dict):
        return {key: _json_value(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(item) for item in value]
    return value


def _config(record):
    return None if record.config is None else config_payload(record.config)


def render_csv(record):
    version = settings.FRONTWAVES["CSV_SCHEMA_VERSION"]
    buffer = io.StringIO()
    buffer.write(f"# frontwaves-csv v{version} command={record.command}\n")
    config = _config(record)
    if config is not None:
        buffer.write("# config=" + json.dumps(config, separators=(",", ":")) + "\n")
    for key, value in record.extra.items():
        buffer.write(f"# {key}=" + json.dumps(_json_value(value), separators=(",", ":")) + "\n")
    buffer.write("# versions=" + json.dumps(record.versions, separators=(",", ":"), sort_keys=True) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(record.columns)
    for row in record.rows:
        writer.writerow([_cell(row.get(column)) for column in record.columns])
    return buffer.getvalue()


def render_json(record):
    payload = {
        "schema": f"frontwaves-json v{settings.FRONTWAVES['CSV_SCHEMA_VERSION']}",
        "command": record.command,
        "config": _config(record),
        "versions": dict(sorted(record.versions.items())),
        "columns": list(record.columns),
        "rows": [{column: _json_value(row.get(column)) for column in record.columns} for row in record.rows],
    }
    for key, value in record.extra.items():
        payload[key] = _json_value(value)
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def render(record, fmt):
    if OutputFormat(fmt) is OutputFormat.JSON:
        return render_json(record)
    return render_csv(record)


def write_record(record, fmt, path=None, stream=None):
    """Write to ``path`` when given, otherwise to ``stream``; returns the text."""
    text = render(record, fmt)
    if path:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    elif stream is not None:
        stream.write(text)
    return text
