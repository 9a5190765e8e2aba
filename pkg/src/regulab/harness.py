"""Batch experiment runner.

Runs a matrix of (adaptivity x power x seed) cells headless, persists every
run record, and reduces each cell to mean and standard error of its
percent-of-optimal metric.  A failing cell is marked failed and never
contaminates the rest of the matrix.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import os
import statistics
import traceback
from dataclasses import dataclass, field

from .config import ADAPTIVITY_LEVELS, POWER_LEVELS, ConfigError, RunConfig
from .engine import run_headless
from .policies import make_policy
from .records import RunRecord


@dataclass
class MatrixSpec:
    scenario: str = "traffic"
    adaptivity: list[str] = field(default_factory=lambda: ["simple", "adaptive"])
    power: list[str] = field(default_factory=lambda: ["none"])
    policy: str = "none"
    seeds: list[int] = field(default_factory=list)
    base: dict = field(default_factory=dict)   # RunConfig overrides

    @classmethod
    def from_file(cls, path: str) -> "MatrixSpec":
        with open(path) as f:
            data = json.load(f)
        spec = cls(**data)
        for a in spec.adaptivity:
            if a not in ADAPTIVITY_LEVELS:
                raise ConfigError("adaptivity", f"unknown level {a!r}")
        for p in spec.power:
            if p not in POWER_LEVELS:
                raise ConfigError("power", f"unknown level {p!r}")
            if p == "none" and spec.policy not in ("none",):
                raise ConfigError("policy", "power 'none' forces policy 'none'")
        return spec

    def cell_config(self, adaptivity: str, power: str, seed: int) -> RunConfig:
        data = dict(self.base)
        data["scenario"] = self.scenario
        data["adaptivity"] = adaptivity
        data["seed"] = seed
        reg = dict(data.get("regulator", {}))
        reg["power"] = power
        data["regulator"] = reg
        return RunConfig.from_dict(data)


@dataclass
class CellResult:
    adaptivity: str
    power: str
    policy: str
    seeds: list[int]
    metrics: list[float]
    failed: bool = False
    error: str = ""

    @property
    def mean(self) -> float | None:
        return statistics.fmean(self.metrics) if self.metrics else None

    @property
    def sem(self) -> float | None:
        if len(self.metrics) < 2:
            return None
        return statistics.stdev(self.metrics) / math.sqrt(len(self.metrics))


def metric_of(record: RunRecord) -> float:
    final = record.final or {}
    key = "throughput_pct" if record.config.scenario == "traffic" else "utility_pct"
    return final[key]


def run_cell(config: RunConfig, seed: int, policy_name: str) -> RunRecord:
    return run_headless(config, seed, policy=make_policy(policy_name))


def run_matrix(spec: MatrixSpec, out_dir: str | None = None,
               progress=None) -> list[CellResult]:
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    results: list[CellResult] = []
    for adaptivity in spec.adaptivity:
        for power in spec.power:
            cell = CellResult(adaptivity, power, spec.policy, [], [])
            for seed in spec.seeds:
                try:
                    config = spec.cell_config(adaptivity, power, seed)
                    record = run_cell(config, seed, spec.policy)
                    cell.seeds.append(seed)
                    cell.metrics.append(metric_of(record))
                    if out_dir:
                        name = f"{spec.scenario}_{adaptivity}_{power}_s{seed}.jsonl"
                        record.write(os.path.join(out_dir, name))
                except Exception:
                    cell.failed = True
                    cell.error = traceback.format_exc(limit=3)
                if progress:
                    progress(adaptivity, power, seed)
            results.append(cell)
    if out_dir:
        write_summary(results, spec, os.path.join(out_dir, "summary.csv"))
    return results


def write_summary(results: list[CellResult], spec: MatrixSpec, path: str) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["scenario", "adaptivity", "power", "policy", "n",
                         "mean_pct", "sem_pct", "failed", "per_seed"])
        for cell in results:
            writer.writerow([
                spec.scenario, cell.adaptivity, cell.power, cell.policy,
                len(cell.metrics),
                f"{cell.mean:.6f}" if cell.mean is not None else "",
                f"{cell.sem:.6f}" if cell.sem is not None else "",
                int(cell.failed),
                ";".join(f"{s}:{m:.6f}" for s, m in zip(cell.seeds, cell.metrics)),
            ])


def format_table(results: list[CellResult]) -> str:
    lines = [f"{'adaptivity':<10} {'power':<10} {'n':>3} {'mean%':>10} {'sem':>8}  status"]
    for cell in results:
        mean = f"{cell.mean:10.3f}" if cell.mean is not None else " " * 10
        sem = f"{cell.sem:8.3f}" if cell.sem is not None else " " * 8
        status = "FAILED" if cell.failed else "ok"
        lines.append(f"{cell.adaptivity:<10} {cell.power:<10} "
                     f"{len(cell.metrics):>3} {mean} {sem}  {status}")
    return "\n".join(lines)
