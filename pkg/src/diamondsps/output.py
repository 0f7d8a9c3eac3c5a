"""Deterministic CSV/JSON emission with units header and provenance footer."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__ as _version


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()[:16]


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


@dataclass
class ResultTable:
    """Column-oriented numeric table with units and provenance."""

    title: str
    columns: list[str]
    units: list[str]
    rows: list[list] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.columns) != len(self.units):
            raise ValueError("one unit per column required")

    def add_row(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(list(values))

    def to_csv(self) -> str:
        lines = [f"# {self.title}", "# units: " + ",".join(self.units)]
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(_fmt(v) for v in row))
        prov = " ".join(f"{k}={v}" for k, v in sorted(self.provenance.items()))
        lines.append(f"# {prov}" if prov else "#")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        def norm(v):
            if isinstance(v, (bool, np.bool_)):
                return bool(v)
            if isinstance(v, (int, np.integer)):
                return int(v)
            if isinstance(v, (float, np.floating)):
                return float(v) if np.isfinite(v) else None
            return v

        payload = {
            "title": self.title,
            "columns": self.columns,
            "units": self.units,
            "rows": [[norm(v) for v in row] for row in self.rows],
            "provenance": self.provenance,
        }
        return canonical_json(payload) + "\n"

    def write(self, path: Path, fmt: str = "csv") -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        text = self.to_csv() if fmt == "csv" else self.to_json()
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        return path


def provenance(config: dict, seed: int) -> dict:
    return {"config_sha256": config_hash(config), "seed": seed, "version": _version}
