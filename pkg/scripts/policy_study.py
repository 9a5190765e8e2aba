#!/usr/bin/env python3
"""Scripted-regulator study: how canned policies move the None baselines.

Runs each scripted policy under limited and unlimited power against both
adaptivity levels and prints the percent-of-optimal table next to the
unregulated baseline.

Usage: python scripts/policy_study.py [--scenario traffic|water] [--seeds N]
"""

from __future__ import annotations

import argparse
import statistics

from regulab.config import RunConfig
from regulab.engine import run_headless
from regulab.policies import make_policy

TRAFFIC_POLICIES = ["none", "random-walk", "greedy-congestion"]
WATER_POLICIES = ["none", "random-walk", "peak-pricing"]


def cell(scenario: str, adaptivity: str, power: str, policy: str,
         seeds: range, duration: float) -> float:
    metrics = []
    for seed in seeds:
        data = {"scenario": scenario, "adaptivity": adaptivity,
                "regulator": {"power": power}}
        if scenario == "traffic":
            data["duration_s"] = duration
        record = run_headless(RunConfig.from_dict(data), seed,
                              policy=make_policy(policy))
        key = "throughput_pct" if scenario == "traffic" else "utility_pct"
        metrics.append(record.final[key])
    return statistics.fmean(metrics)


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--scenario", choices=["traffic", "water"], default="traffic")
    parser.add_argument("--seeds", type=int, default=6)
    parser.add_argument("--duration", type=float, default=1500.0)
    args = parser.parse_args()

    policies = TRAFFIC_POLICIES if args.scenario == "traffic" else WATER_POLICIES
    seeds = range(1, args.seeds + 1)
    print(f"{'adaptivity':<10} {'power':<10} {'policy':<18} {'mean %':>8}")
    for adaptivity in ("simple", "adaptive"):
        baseline = cell(args.scenario, adaptivity, "none", "none", seeds,
                        args.duration)
        print(f"{adaptivity:<10} {'none':<10} {'none':<18} {baseline:8.2f}")
        for power in ("limited", "unlimited"):
            for policy in policies[1:]:
                mean = cell(args.scenario, adaptivity, power, policy, seeds,
                            args.duration)
                print(f"{adaptivity:<10} {power:<10} {policy:<18} {mean:8.2f}")


if __name__ == "__main__":
    main()
