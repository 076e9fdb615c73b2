"""Deterministic writers for the output formats, and the run manifest."""

from __future__ import annotations

import csv
import hashlib
import json
import resource
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import io as spio
from scipy import sparse


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n"


def _default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(path: Path | str, obj) -> Path:
    path = Path(path)
    path.write_text(_dump(obj))
    return path


def write_jsonl(path: Path | str, rows: Iterable) -> Path:
    path = Path(path)
    with path.open("w") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, default=_default) + "\n")
    return path


def write_growth_csv(path: Path | str, layer_sizes: Sequence[int]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["layer", "count"])
        out.writerows(enumerate(int(x) for x in layer_sizes))
    return path


def read_growth_csv(path: Path | str) -> list[int]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    layers = [int(r["layer"]) for r in rows]
    if layers != list(range(len(rows))):
        raise ValueError(f"{path}: layers must run 0, 1, 2, ...")
    return [int(r["count"]) for r in rows]


def write_table_csv(path: Path | str, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        out.writerows(rows)
    return path


def write_matrix_market(path: Path | str, matrix: np.ndarray, comment: str = "") -> Path:
    """Coordinate-format pattern matrix."""
    path = Path(path)
    spio.mmwrite(str(path), sparse.coo_matrix(matrix), comment=comment, field="pattern")
    return path


def sha256(path: Path | str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def peak_rss_bytes() -> int:
    rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    return rss if sys.platform == "darwin" else rss * 1024


@dataclass
class RunManifest:
    command: str
    args: dict
    engine: str | None = None
    wall_time: float = 0.0
    peak_memory: int = 0
    outputs: dict[str, str] = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def record(self, path: Path | str) -> None:
        path = Path(path)
        self.outputs[path.name] = sha256(path)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "args": self.args,
            "engine": self.engine,
            "wall_time": round(self.wall_time, 6),
            "peak_memory": self.peak_memory,
            "outputs": dict(sorted(self.outputs.items())),
            "notes": self.notes,
        }

    def write(self, directory: Path | str) -> Path:
        return write_json(Path(directory) / "manifest.json", self.to_dict())
