"""Reproducible experiment plumbing: typed run configuration, seed
derivation, CSV emission, and the JSON run record written next to every
output set.
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__

OUTPUT_ROOT_ENV = "CHAODYN_OUT"


@dataclass(frozen=True)
class ExperimentConfig:
    """Full parameter set of one run; (subcommand, params, seed) determine
    every output byte."""

    subcommand: str
    params: dict
    seed: int
    outdir: Path

    def canonical_json(self) -> str:
        return json.dumps(
            {"subcommand": self.subcommand, "params": self.params, "seed": self.seed},
            sort_keys=True,
        )

    @staticmethod
    def from_canonical(text: str, outdir: Path) -> "ExperimentConfig":
        data = json.loads(text)
        return ExperimentConfig(data["subcommand"], data["params"], data["seed"], outdir)


@dataclass
class RunRecord:
    config: ExperimentConfig
    wall_time_s: float = 0.0
    manifest: dict = field(default_factory=dict)  # filename -> row count
    headline: dict = field(default_factory=dict)  # scalar diagnostics

    def write(self) -> Path:
        path = self.config.outdir / "run_record.json"
        payload = {
            "artifact_version": __version__,
            "config": json.loads(self.config.canonical_json()),
            "config_echo": self.config.canonical_json(),
            "wall_time_s": round(self.wall_time_s, 3),
            "outputs": self.manifest,
            "headline": self.headline,
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return path


def output_root() -> Path:
    return Path(os.environ.get(OUTPUT_ROOT_ENV, "runs"))


def spawn_seed(master_seed: int, index: int) -> int:
    """Per-point seed for sweeps: child ``index`` of the master seed's
    SeedSequence, reproducible independent of evaluation order."""
    child = np.random.SeedSequence(master_seed).spawn(index + 1)[index]
    return int(child.generate_state(1, dtype=np.uint64)[0])


def write_csv(path: Path, header: list[str], rows) -> int:
    """Write rows (iterable of sequences) with a header line; returns the
    data row count. Floats are emitted with repr-level precision so reruns
    are byte-identical."""
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(c) for c in row])
            count += 1
    return count


def _format_cell(value):
    if isinstance(value, (float, np.floating)):
        return np.format_float_scientific(value, precision=16) if value != 0 else "0.0"
    if isinstance(value, (int, np.integer)):
        return int(value)
    return value


def parse_config_file(path: Path) -> dict:
    """KEY=VALUE lines (# comments allowed); keys mirror the CLI flag names
    with dashes or underscores."""
    out = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected KEY=VALUE, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out
