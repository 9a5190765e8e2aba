#!/usr/bin/env python3
"""Machine-playable None-condition study.

Runs Simple-None and Adaptive-None for both scenarios (12 traffic seeds,
10 water seeds), prints mean percent-of-optimal with standard errors and the
one-sided Welch test for the adaptivity ordering, and writes raw CSVs.

Usage: python scripts/none_condition_study.py [--out DIR] [--traffic-seeds N]
"""

from __future__ import annotations

import argparse
import statistics

from scipy import stats

from regulab.harness import MatrixSpec, format_table, run_matrix


def study(scenario: str, seeds: list[int], base: dict, out_dir: str | None):
    spec = MatrixSpec(scenario=scenario, adaptivity=["simple", "adaptive"],
                      power=["none"], policy="none", seeds=seeds, base=base)
    results = run_matrix(spec, out_dir)
    print(f"\n== {scenario} ==")
    print(format_table(results))
    by_mode = {c.adaptivity: c.metrics for c in results}
    test = stats.ttest_ind(by_mode["adaptive"], by_mode["simple"],
                           equal_var=False, alternative="greater")
    gap = statistics.fmean(by_mode["adaptive"]) - statistics.fmean(by_mode["simple"])
    print(f"adaptive - simple = {gap:+.2f} pp, one-sided Welch p = {test.pvalue:.3g}")


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=None, help="persist records and CSVs here")
    parser.add_argument("--traffic-seeds", type=int, default=12)
    parser.add_argument("--water-seeds", type=int, default=10)
    args = parser.parse_args()

    study("traffic", list(range(1, args.traffic_seeds + 1)),
          {"duration_s": 1500.0},
          f"{args.out}/traffic" if args.out else None)
    study("water", list(range(1, args.water_seeds + 1)), {},
          f"{args.out}/water" if args.out else None)


if __name__ == "__main__":
    main()
