#!/usr/bin/env python3
"""Forecast accuracy measurement.

Runs Simple-None traffic with the warning system enabled across seeds and
reports per-seed and mean status-match accuracy at the 20 s horizon.

Usage: python scripts/forecast_accuracy_study.py [--seeds N] [--duration S]
"""

from __future__ import annotations

import argparse
import statistics

from regulab.config import RunConfig
from regulab.engine import run_headless
from regulab.forecast import accuracy


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--seeds", type=int, default=12)
    parser.add_argument("--duration", type=float, default=1500.0)
    args = parser.parse_args()

    values = []
    for seed in range(1, args.seeds + 1):
        cfg = RunConfig.from_dict({
            "scenario": "traffic", "adaptivity": "simple",
            "duration_s": args.duration, "forecast": {"enabled": True}})
        record = run_headless(cfg, seed)
        capacities = {f"{r.from_node}>{r.to_node}": r.capacity
                      for r in cfg.traffic.network.roads}
        acc = accuracy(record.forecasts(), record.samples(), capacities,
                       cfg.forecast.horizon_s)
        values.append(acc)
        print(f"seed {seed:>2}: accuracy {acc:.4f} "
              f"({len(record.forecasts())} reports)")
    print(f"\nmean accuracy over {args.seeds} seeds: "
          f"{statistics.fmean(values):.4f}")


if __name__ == "__main__":
    main()
