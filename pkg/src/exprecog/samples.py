"""Reading and writing sampled function values.

CSV: header ``x1,...,xd,re,im``, one sample per row.
JSON: ``{"dim": d, "points": [[...], ...], "values_re": [...], "values_im": [...]}``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInput
from .oracle import SampledOracle


class SampleFormatError(InvalidInput):
    """Malformed sample file; ``line`` and ``field`` locate the problem when known."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


@dataclass(frozen=True)
class SampleSet:
    dim: int
    points: np.ndarray  # (m, dim)
    values: np.ndarray  # (m,) complex

    def __len__(self):
        return len(self.values)

    def oracle(self, match_tol: float = 1e-9) -> SampledOracle:
        return SampledOracle(self.points, self.values, match_tol)


def _validated(points: np.ndarray, values: np.ndarray, lines: list[int] | None = None) -> SampleSet:
    if len(values) == 0:
        raise SampleFormatError("no samples")
    bad = np.nonzero(~np.isfinite(values) | ~np.all(np.isfinite(points), axis=1))[0]
    if bad.size:
        i = int(bad[0])
        raise SampleFormatError("non-finite point or value", lines[i] if lines else None,
                                None if lines else f"row {i}")
    seen: dict[tuple, int] = {}
    for i, p in enumerate(map(tuple, points)):
        if p in seen:
            j = seen[p]
            loc = f"lines {lines[j]} and {lines[i]}" if lines else f"rows {j} and {i}"
            raise SampleFormatError(f"duplicate point {[float(c) for c in p]} at {loc}")
        seen[p] = i
    return SampleSet(points.shape[1], points, values)


def _read_csv(path: Path) -> SampleSet:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [(i + 1, r) for i, r in enumerate(rows) if any(c.strip() for c in r)]
    if not rows:
        raise SampleFormatError("no samples")
    _, header = rows[0]
    header = [h.strip() for h in header]
    d = len(header) - 2
    expected = [f"x{i + 1}" for i in range(d)] + ["re", "im"]
    if d < 1 or header != expected:
        raise SampleFormatError(f"header must be {','.join(expected) if d >= 1 else 'x1,...,xd,re,im'}", 1)
    pts, vals, lines = [], [], []
    for line, row in rows[1:]:
        if len(row) != d + 2:
            raise SampleFormatError(f"expected {d + 2} fields, got {len(row)}", line)
        nums = []
        for name, cell in zip(header, row):
            try:
                nums.append(float(cell))
            except ValueError:
                raise SampleFormatError(f"not a number: {cell!r}", line, name) from None
        pts.append(nums[:d])
        vals.append(complex(nums[d], nums[d + 1]))
        lines.append(line)
    return _validated(np.array(pts, dtype=float).reshape(-1, d), np.array(vals, dtype=complex), lines)


def _read_json(path: Path) -> SampleSet:
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        raise SampleFormatError("no samples")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SampleFormatError(e.msg, e.lineno) from None
    if not isinstance(doc, dict):
        raise SampleFormatError("top level must be an object")
    for key in ("dim", "points", "values_re", "values_im"):
        if key not in doc:
            raise SampleFormatError("missing key", field=key)
    d = doc["dim"]
    if not isinstance(d, int) or d < 1:
        raise SampleFormatError("must be a positive integer", field="dim")
    lengths = {k: len(doc[k]) for k in ("points", "values_re", "values_im")}
    if len(set(lengths.values())) != 1:
        raise SampleFormatError(f"length mismatch: {lengths}", field="values_re")
    try:
        pts = np.array(doc["points"], dtype=float).reshape(-1, d) if doc["points"] else np.zeros((0, d))
        if len(pts) != lengths["points"]:
            raise ValueError
    except (TypeError, ValueError):
        raise SampleFormatError(f"each point must have {d} numbers", field="points") from None
    try:
        vals = np.array(doc["values_re"], dtype=float) + 1j * np.array(doc["values_im"], dtype=float)
    except (TypeError, ValueError):
        raise SampleFormatError("values must be numbers", field="values_re") from None
    return _validated(pts, vals)


def load_samples(path, fmt: str | None = None) -> SampleSet:
    """Load a sample file; ``fmt`` ('csv' or 'json') defaults to the file suffix."""
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".")).lower()
    if fmt == "csv":
        return _read_csv(path)
    if fmt == "json":
        return _read_json(path)
    raise SampleFormatError(f"unknown sample format {fmt!r}")


def write_samples(path, points, values, fmt: str | None = None) -> None:
    path = Path(path)
    points = np.asarray(points, dtype=float)
    points = points.reshape(len(points), -1)
    values = np.asarray(values, dtype=complex)
    fmt = (fmt or path.suffix.lstrip(".")).lower()
    d = points.shape[1]
    if fmt == "json":
        doc = {"dim": d, "points": points.tolist(),
               "values_re": values.real.tolist(), "values_im": values.imag.tolist()}
        path.write_text(json.dumps(doc) + "\n", encoding="utf-8")
    elif fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow([f"x{i + 1}" for i in range(d)] + ["re", "im"])
            for p, v in zip(points, values):
                w.writerow([repr(float(c)) for c in p] + [repr(float(v.real)), repr(float(v.imag))])
    else:
        raise SampleFormatError(f"unknown sample format {fmt!r}")

