"""Reading improvement data and writing results.

Two CSV schemas are accepted, both comma-separated with a header row:

* raw values: ``dataset_id,value``
* paired scores: ``dataset_id,score_a,score_b,base_rate``; each row becomes
  the difference of Cohen's kappa of algorithm A and algorithm B.
"""

import csv
import io
import json
import math
from enum import Enum
from pathlib import Path

import numpy as np

from ._validation import check_1d
from .adversary import ImprovementSample
from .exceptions import DegenerateInputError, DomainError, ParseError

RAW_HEADER = ("dataset_id", "value")
PAIRED_HEADER = ("dataset_id", "score_a", "score_b", "base_rate")


class Schema(str, Enum):
    RAW_VALUES = "raw"
    PAIRED_SCORES = "paired"


def cohen_kappa(score, base_rate):
    """Skill over the majority-class baseline: ``(s - s_base) / (1 - s_base)``."""
    if not (math.isfinite(score) and math.isfinite(base_rate)):
        raise DomainError("score and base_rate must be finite")
    if base_rate >= 1.0:
        raise DomainError(f"base_rate must be below 1, got {base_rate}")
    return (score - base_rate) / (1.0 - base_rate)


def _float(text, column, row):
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise ParseError(f"column {column!r} is not a number: {text!r}", row) from None
    if not math.isfinite(value):
        raise ParseError(f"column {column!r} is not finite", row)
    return value


def read_records(path, schema=Schema.RAW_VALUES):
    """Parse a CSV into ``(dataset_ids, values)`` without building a sample."""
    schema = Schema(schema)
    expected = RAW_HEADER if schema is Schema.RAW_VALUES else PAIRED_HEADER
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError("file is empty")
        header = tuple(h.strip() for h in header)
        if header != expected:
            raise ParseError(f"expected header {','.join(expected)}, got {','.join(header)}", 1)
        ids, values = [], []
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(expected):
                raise ParseError(f"expected {len(expected)} fields, got {len(row)}", row_no)
            ids.append(row[0].strip())
            if schema is Schema.RAW_VALUES:
                values.append(_float(row[1], "value", row_no))
            else:
                a, b, base = (_float(row[k], expected[k], row_no) for k in (1, 2, 3))
                try:
                    values.append(cohen_kappa(a, base) - cohen_kappa(b, base))
                except DomainError as exc:
                    raise ParseError(str(exc), row_no) from None
    if not values:
        raise ParseError("file has no data rows")
    return ids, values


def load_improvements(path, schema=Schema.RAW_VALUES):
    _, values = read_records(path, schema)
    return ImprovementSample(np.array(values))


def write_raw_values(path_or_buffer, values, ids=None):
    """Write ``dataset_id,value`` rows. ``repr`` keeps floats round-trippable."""
    values = check_1d(values, "values")
    ids = [f"d{i + 1}" for i in range(values.size)] if ids is None else list(ids)
    own = isinstance(path_or_buffer, (str, Path))
    fh = open(path_or_buffer, "w", newline="", encoding="utf-8") if own else path_or_buffer
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RAW_HEADER)
        for ident, v in zip(ids, values):
            writer.writerow([ident, repr(float(v))])
    finally:
        if own:
            fh.close()


def normalize_unit_variance(sample):
    """Divide by the unbiased sample standard deviation."""
    known_sd = None
    if isinstance(sample, ImprovementSample):
        known_sd, sample = sample.known_sd, sample.values
    values = check_1d(sample, "values")
    if values.size < 2:
        raise DegenerateInputError("need at least two values to estimate a variance")
    sd = values.std(ddof=1)
    if sd <= 1e-13 * np.abs(values).max():
        raise DegenerateInputError("sample variance is zero")
    scaled = values / sd
    return ImprovementSample(scaled, None if known_sd is None else known_sd / sd)


# --- result serialization ----------------------------------------------------


def _plain(value):
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else str(value)
    return value


def rows_to_csv(rows):
    """Serialize a list of flat dicts; the column set is the union, in first-seen order."""
    columns = []
    for row in rows:
        columns.extend(k for k in row if k not in columns)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _plain(v) for k, v in row.items()})
    return buf.getvalue()


def rows_to_json(rows, meta=None):
    payload = {"rows": [{k: _plain(v) for k, v in row.items()} for row in rows]}
    if meta:
        payload = {"meta": {k: _plain(v) for k, v in meta.items()}, **payload}
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def _fmt(value):
    value = _plain(value)
    if isinstance(value, float):
        return f"{value:.6g}"
    return "" if value is None else str(value)


def rows_to_table(rows):
    """Plain aligned text table."""
    columns = []
    for row in rows:
        columns.extend(k for k in row if k not in columns)
    cells = [[_fmt(row.get(c)) for c in columns] for row in rows]
    widths = [max(len(c), *(len(r[i]) for r in cells)) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    for r in cells:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"
