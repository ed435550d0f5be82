"""Result records: canonical JSONL, reproducibility hashing, CSV export.

Every emitted record carries the run-manifest fields (subcommand,
config_hash, seed, tool_version, started, finished).  Lines are
canonical JSON (sorted keys, no whitespace), so a rerun with the same
config and seed is byte-identical outside the two timestamp fields;
``reproducibility_hash`` strips exactly those before hashing.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import asdict, dataclass, is_dataclass
from datetime import datetime, timezone
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

TOOL_VERSION = "0.1.0"
TIMESTAMP_KEYS = ("started", "finished")

CSV_COLUMNS = (
    "n",
    "k",
    "p",
    "epsilon",
    "exact_or_estimate",
    "ci_low",
    "ci_high",
    "theorem_rate",
    "zero_rows_lower",
    "conjecture_rhs",
    "structured_lower",
)


def to_jsonable(obj):
    """Exact, deterministic JSON image: Fractions become "a/b" strings."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def parse_fraction(text):
    """Inverse of the "a/b" encoding; floats pass through."""
    if isinstance(text, str) and "/" in text:
        return Fraction(text)
    return text


def canonical_line(record: dict) -> str:
    return json.dumps(to_jsonable(record), sort_keys=True, separators=(",", ":"))


def write_jsonl(path, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(canonical_line(rec) + "\n")


def read_jsonl(path) -> list[dict]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def reproducibility_hash(path) -> str:
    """sha256 over the canonical records with timestamp fields removed."""
    h = hashlib.sha256()
    for rec in read_jsonl(path):
        for key in TIMESTAMP_KEYS:
            rec.pop(key, None)
        h.update(canonical_line(rec).encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def config_hash(config: dict) -> str:
    """Digest of every input that can affect numerical output.

    The output path and timestamps are excluded on purpose.
    """
    trimmed = {
        k: v
        for k, v in config.items()
        if v is not None and k not in ("out",) + TIMESTAMP_KEYS
    }
    return hashlib.sha256(canonical_line(trimmed).encode("utf-8")).hexdigest()


@dataclass
class RunManifest:
    subcommand: str
    config_hash: str
    seed: Optional[int]
    tool_version: str = TOOL_VERSION
    started: str = ""
    finished: str = ""

    def stamp_start(self):
        self.started = datetime.now(timezone.utc).isoformat()

    def stamp_finish(self):
        self.finished = datetime.now(timezone.utc).isoformat()

    def fields(self) -> dict:
        return asdict(self)


def tag_records(records: Iterable[dict], manifest: RunManifest) -> list[dict]:
    tagged = []
    for rec in records:
        merged = dict(rec)
        merged.update(manifest.fields())
        tagged.append(merged)
    return tagged


def write_bounds_csv(path, rows: Iterable[dict]) -> None:
    """Comparison table; numeric cells are rendered as floats so the
    file is directly plot-ready (exact values live in the JSONL)."""

    def cell(v):
        if v is None:
            return ""
        v = parse_fraction(v)
        if isinstance(v, Fraction):
            return repr(float(v))
        if isinstance(v, float):
            return repr(v)
        return v

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([cell(row.get(col)) for col in CSV_COLUMNS])


__all__ = [
    "CSV_COLUMNS",
    "TOOL_VERSION",
    "RunManifest",
    "canonical_line",
    "config_hash",
    "parse_fraction",
    "read_jsonl",
    "reproducibility_hash",
    "tag_records",
    "to_jsonable",
    "write_bounds_csv",
    "write_jsonl",
]
