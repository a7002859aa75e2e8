"""Tap and filter-document files.

CSV taps: one ``index,value`` pair per line, index running -m..m.  Blank
lines and ``#`` comments are ignored.  JSON documents carry
``format_version`` 1.  Numbers are written with 17 significant digits so a
write/read cycle is value-identical.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1


class ParseError(ValueError):
    def __init__(self, path, line, msg):
        super().__init__(f"{path}:{line}: {msg}")
        self.line = line


def fmt(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def taps_to_csv(c) -> str:
    m = len(c) // 2
    return "".join(f"{i - m},{fmt(v)}\n" for i, v in enumerate(c))


def parse_csv_taps(text: str, path="<taps>") -> np.ndarray:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise ParseError(path, lineno, f"expected 'index,value', got {raw!r}")
        try:
            idx, val = int(parts[0]), float(parts[1])
        except ValueError:
            raise ParseError(path, lineno, f"not a number: {raw!r}") from None
        rows.append((lineno, idx, val))
    if not rows:
        raise ParseError(path, 0, "no taps found")
    if len(rows) % 2 == 0:
        raise ParseError(path, rows[-1][0], "tap count must be odd (2m+1)")
    m = len(rows) // 2
    for k, (lineno, idx, _) in enumerate(rows):
        if idx != k - m:
            raise ParseError(path, lineno, f"expected index {k - m}, got {idx}")
    return np.array([v for _, _, v in rows])


def _json_number_list(values) -> str:
    return "[" + ", ".join(fmt(float(v)) for v in values) + "]"


def document_to_json(doc: dict) -> str:
    """Serialize a filter document; the tap list is written at 17 digits."""
    body = dict(doc)
    coeffs = body.pop("coefficients")
    body["format_version"] = FORMAT_VERSION
    text = json.dumps(body, indent=2, allow_nan=True)
    # splice the taps in by hand to control their formatting
    assert text.endswith("\n}")
    return text[:-2] + ',\n  "coefficients": ' + _json_number_list(coeffs) + "\n}\n"


def parse_document(text: str, path="<document>") -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.lineno, exc.msg) from None
    if not isinstance(doc, dict) or "coefficients" not in doc:
        raise ParseError(path, 1, "missing 'coefficients'")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ParseError(path, 1, f"unsupported format_version {version!r}")
    c = np.array(doc["coefficients"], dtype=float)
    spec = doc.get("spec")
    if c.ndim != 1 or c.size % 2 == 0:
        raise ParseError(path, 1, "coefficient count must be odd (2m+1)")
    if spec and c.size != 2 * int(spec["m"]) + 1:
        raise ParseError(path, 1, f"expected {2 * int(spec['m']) + 1} coefficients, got {c.size}")
    doc["coefficients"] = c
    return doc


def load_taps(path) -> tuple[np.ndarray, dict | None]:
    """Read taps from a JSON document or a CSV file (sniffed by content)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        doc = parse_document(text, path)
        return doc["coefficients"], doc
    return parse_csv_taps(text, path), None
