from __future__ import annotations

import pytest

from regulab.config import RunConfig


def traffic_config(**overrides) -> RunConfig:
    data = {"scenario": "traffic", "adaptivity": "simple", "duration_s": 20.0}
    data.update(overrides)
    return RunConfig.from_dict(data)


def water_config(**overrides) -> RunConfig:
    data = {"scenario": "water", "adaptivity": "simple"}
    data.update(overrides)
    return RunConfig.from_dict(data)


def tiny_network(caps: dict[tuple[str, str], int] | None = None) -> dict:
    """Two-node loop unless capacities for specific edges are given."""
    caps = caps or {("A", "B"): 50, ("B", "A"): 50}
    return {
        "nodes": sorted({n for edge in caps for n in edge}),
        "roads": [{"from_node": a, "to_node": b, "capacity": c}
                  for (a, b), c in caps.items()],
    }


@pytest.fixture
def default_traffic() -> RunConfig:
    return traffic_config()


@pytest.fixture
def default_water() -> RunConfig:
    return water_config()
