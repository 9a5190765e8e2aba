#!/usr/bin/env python3
"""Recompute the golden oracle values under goldens/.

Each golden stores the oracle result keyed by a hash of the exact inputs.
Updating a golden is an oracle-improvement event: commit the change together
with a note on why the search got better.
"""

from __future__ import annotations

import json
import os

from regulab.config import RunConfig
from regulab.oracles import _traffic_key, optimal_throughput

GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "..", "goldens")


def main() -> None:
    os.makedirs(GOLDEN_DIR, exist_ok=True)
    config = RunConfig.from_dict({"scenario": "traffic"})
    result = optimal_throughput(config)
    payload = {
        "config_hash": _traffic_key(config),
        "name": "default-traffic-network",
        "car_count": config.traffic.car_count,
        "objective_cars_per_second": result.objective,
        "certificate": result.certificate,
        "method": result.method,
    }
    path = os.path.join(GOLDEN_DIR, "default_traffic_throughput.json")
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"wrote {path}: {result.objective:.6f} cars/s")


if __name__ == "__main__":
    main()
