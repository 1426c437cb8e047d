"""JSON and CSV serialization for distributions, operators and reports."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .classical import MASS_TOL, Distribution
from .errors import ValidationError
from .quantum import DensityOperator, density_from_dict


def load_json(path):
    """Parse a JSON file, turning syntax errors into located diagnostics."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _with_path(path, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def read_distribution(path, *, tol=MASS_TOL) -> Distribution:
    return _with_path(path, Distribution.from_dict, load_json(path), tol=tol)


def read_density(path) -> DensityOperator:
    return _with_path(path, density_from_dict, load_json(path))


def read_state(path, *, tol=MASS_TOL):
    """Load either a distribution or a density operator, decided by its fields."""
    data = load_json(path)
    if isinstance(data, dict) and "entries" in data:
        return _with_path(path, density_from_dict, data)
    return _with_path(path, Distribution.from_dict, data, tol=tol)


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def flatten(obj, prefix=""):
    """Flatten nested dicts and lists into dotted keys."""
    out = {}
    if isinstance(obj, dict):
        for key in obj:
            out.update(flatten(obj[key], f"{prefix}{key}."))
    elif isinstance(obj, (list, tuple)):
        for i, item in enumerate(obj):
            out.update(flatten(item, f"{prefix}{i}."))
    else:
        out[prefix[:-1]] = obj
    return out


def dumps_csv(rows) -> str:
    """CSV text for one report (dict) or several (list of dicts)."""
    if isinstance(rows, dict):
        rows = [rows]
    flat = [flatten(r) for r in rows]
    columns = []
    for row in flat:
        columns.extend(k for k in row if k not in columns)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(flat)
    return buf.getvalue()


def write_text(path, text):
    Path(path).write_text(text)
