"""Car decision making.

A car keeps a money value for arriving at each node, resampled every time it
reaches its chosen destination.  At a node it picks the destination and route
maximizing value minus travel cost minus tolls, where per-road travel time is
either the congestion-free estimate (simple mode) or a per-car learned
estimate (adaptive mode, exponential smoothing of observed traversal times).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from ..rng import StreamRng
from .network import Road, RoadNetwork


def learn_link_cost(x: float, alpha: float, z: float) -> float:
    """Blend the previous estimate x with an observed traversal time z."""
    return alpha * x + (1.0 - alpha) * z


def sample_destination_values(rng: StreamRng, nodes: list[str],
                              bias: dict[str, float],
                              spread_is_variance: bool = False) -> dict[str, float]:
    """Fresh per-node arrival values.

    For each node, in sorted node order: mean = bias + U[0,1], spread =
    0.1 + 0.3*U[0,1], value ~ Normal(mean, spread).  The spread is a standard
    deviation unless spread_is_variance is set.
    """
    values = {}
    for node in sorted(nodes):
        mean = bias[node] + rng.random()
        spread = 0.1 + 0.3 * rng.random()
        sigma = math.sqrt(spread) if spread_is_variance else spread
        values[node] = rng.normalvariate(mean, sigma)
    return values


@dataclass
class PlanResult:
    destination: str
    path: list[str]              # node sequence, path[0] is the current node
    expected_utility: float
    travel_cost: float           # sum of operating-cost * estimated seconds
    toll_cost: float             # sum of tolls along the path


def shortest_paths(network: RoadNetwork, weights: list[float],
                   source: str) -> dict[str, tuple[float, tuple[str, ...]]]:
    """Dijkstra from source under per-road weights.

    Returns {node: (cost, node_path)} for every reachable node.  Ties in cost
    resolve to the lexicographically smallest node path, which is also the
    tie-break the brute-force path enumeration uses.
    """
    best: dict[str, tuple[float, tuple[str, ...]]] = {}
    heap: list[tuple[float, tuple[str, ...]]] = [(0.0, (source,))]
    while heap:
        cost, path = heapq.heappop(heap)
        node = path[-1]
        if node in best:
            continue
        best[node] = (cost, path)
        for road in network.out_roads[node]:
            if road.to_node not in best:
                heapq.heappush(heap, (cost + weights[road.index], path + (road.to_node,)))
    return best


def plan_trip(network: RoadNetwork, weights: list[float],
              travel_seconds: list[float], operating_cost: float,
              values: dict[str, float], current: str,
              reach: dict[str, tuple[float, tuple[str, ...]]] | None = None) -> PlanResult:
    """Pick the destination maximizing value minus path cost from `current`.

    `weights[r]` must equal operating_cost * travel_seconds[r] + toll[r]; the
    cheapest path per destination comes from one Dijkstra pass, then the
    destination argmax is taken in sorted node order (first wins ties).
    Cars sharing identical weights may pass a precomputed `reach`.
    """
    if reach is None:
        reach = shortest_paths(network, weights, current)
    best: PlanResult | None = None
    for g in sorted(network.nodes):
        if g == current or g not in reach:
            continue
        cost, path = reach[g]
        u = values[g] - cost
        if best is None or u > best.expected_utility:
            t_cost = sum(operating_cost * travel_seconds[network.by_id[f"{a}>{b}"].index]
                         for a, b in zip(path, path[1:]))
            best = PlanResult(g, list(path), u, t_cost, cost - t_cost)
    if best is None:
        raise ValueError(f"no destination reachable from {current!r}: malformed network")
    return best


class Car:
    """State of one car.  Location is a node (between trips legs) or a road."""

    __slots__ = ("car_id", "mode", "alpha", "rng", "values", "x",
                 "node", "road", "fraction", "destination", "route",
                 "tolls_paid", "trip_start_tick", "entry_tick",
                 "cumulative_utility", "arrivals")

    def __init__(self, car_id: int, mode: str, alpha: float, rng: StreamRng,
                 values: dict[str, float], x: list[float], node: str):
        self.car_id = car_id
        self.mode = mode
        self.alpha = alpha
        self.rng = rng
        self.values = values
        self.x = x                     # per-road estimated traversal seconds
        self.node: str | None = node
        self.road: Road | None = None
        self.fraction = 0.0
        self.destination: str | None = None
        self.route: list[Road] = []    # remaining roads to traverse
        self.tolls_paid = 0.0          # dollars, current trip
        self.trip_start_tick = 0
        self.entry_tick = 0
        self.cumulative_utility = 0.0
        self.arrivals = 0

    def plan(self, network: RoadNetwork, operating_cost: float,
             weights: list[float] | None = None) -> PlanResult:
        """Replan from the current node using this car's cost estimates."""
        assert self.node is not None, "plan() requires the car to be at a node"
        if weights is None:
            weights = [operating_cost * self.x[r.index] + r.toll
                       for r in network.roads]
        return plan_trip(network, weights, self.x, operating_cost,
                         self.values, self.node)
