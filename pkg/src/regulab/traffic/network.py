"""Road network and congestion physics.

Speed on a road is a logistic function of how far occupancy exceeds
capacity: free-flow below capacity, a sharp slowdown around it, and a
never-zero crawl floor far above it.  The raw factor sigma(N,C) + 0.1 tops
out at 1.1, so we divide by 1.1 to make free-flow speed equal the road's
maximum speed.
"""

from __future__ import annotations

import math

from ..config import NetworkConfig
from ..money import to_cents


def road_speed(n: float, capacity: float, max_speed: float) -> float:
    """Current speed on a road holding n cars.  Strictly decreasing in n."""
    x = 0.25 * (n - capacity)
    # Guard exp() overflow; far past capacity sigma underflows to the crawl
    # floor anyway.
    if x > 700.0:
        sigma = 0.0
    else:
        sigma = 1.0 / (1.0 + math.exp(x))
    # Inner parentheses keep free flow at exactly max_speed.
    return max_speed * ((sigma + 0.1) / 1.1)


class Road:
    """One directed road.  Occupancy is the list of cars currently on it."""

    __slots__ = ("index", "from_node", "to_node", "length", "capacity",
                 "max_speed", "toll_cents", "cars")

    def __init__(self, index: int, from_node: str, to_node: str,
                 length: float, capacity: int, max_speed: float,
                 toll_cents: int):
        self.index = index
        self.from_node = from_node
        self.to_node = to_node
        self.length = length
        self.capacity = capacity
        self.max_speed = max_speed
        self.toll_cents = toll_cents
        self.cars: list = []

    @property
    def road_id(self) -> str:
        return f"{self.from_node}>{self.to_node}"

    @property
    def occupancy(self) -> int:
        return len(self.cars)

    @property
    def toll(self) -> float:
        return self.toll_cents / 100.0

    def speed(self) -> float:
        return road_speed(len(self.cars), self.capacity, self.max_speed)

    def free_flow_time(self) -> float:
        return self.length / self.max_speed


class RoadNetwork:
    """Directed road graph with per-road tolls."""

    def __init__(self, config: NetworkConfig, initial_toll: float):
        toll_cents = to_cents(initial_toll)
        self.nodes: list[str] = sorted(config.nodes)
        self.roads: list[Road] = []
        self.by_id: dict[str, Road] = {}
        self.out_roads: dict[str, list[Road]] = {n: [] for n in self.nodes}
        for rc in config.roads:
            road = Road(len(self.roads), rc.from_node, rc.to_node,
                        rc.length, rc.capacity, rc.max_speed, toll_cents)
            self.roads.append(road)
            self.by_id[road.road_id] = road
        # Outgoing lists in road-index order: deterministic iteration everywhere.
        for road in self.roads:
            self.out_roads[road.from_node].append(road)

    def road_between(self, a: str, b: str) -> Road | None:
        return self.by_id.get(f"{a}>{b}")

    def occupancies(self) -> dict[str, int]:
        return {r.road_id: len(r.cars) for r in self.roads}

    def tolls(self) -> dict[str, float]:
        return {r.road_id: r.toll for r in self.roads}
