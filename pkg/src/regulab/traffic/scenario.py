"""Tolled road network scenario.

One tick advances every car by speed * dt along its road, using the road
occupancies at tick start (simultaneous-move semantics: nothing a car does
within a tick changes another car's speed in that tick).  Cars decide only at
nodes: on every node arrival the car replans destination and route against
the live tolls, pays each road's toll once at entry, and collects its arrival
value when it reaches its chosen destination.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..config import RunConfig
from ..rng import RngPool
from .cars import Car, PlanResult, learn_link_cost, plan_trip, sample_destination_values, shortest_paths
from .network import RoadNetwork


@dataclass
class StepEvents:
    """What happened during one tick, for instrumentation (never fed back)."""
    departures: list[tuple[str, int]] = field(default_factory=list)  # (node, road index)
    transits: int = 0


class TrafficScenario:
    def __init__(self, config: RunConfig, rngs: RngPool, random_routes: bool = False):
        self.config = config
        self.params = config.traffic
        self.dt = config.dt
        self.network = RoadNetwork(self.params.network, self.params.initial_toll)
        self.random_routes = random_routes
        self.sink = self.params.sink_node
        self.transits = 0
        self.toll_version = 0
        self._reach_cache: dict[tuple[str, int], dict] = {}
        self._simple_paths_cache: dict[tuple[str, str], list[tuple[str, ...]]] = {}

        nodes = sorted(self.network.nodes)
        base_x = [r.free_flow_time() for r in self.network.roads]
        self._base_x = base_x
        setup = rngs.stream("setup")
        adaptive = config.adaptivity == "adaptive"
        self.cars: list[Car] = []
        for i in range(self.params.car_count):
            start = nodes[setup.randrange(len(nodes))]
            rng = rngs.stream(f"car/{i}")
            alpha = rng.random()
            values = sample_destination_values(
                rng, nodes, self.params.destination_bias,
                self.params.value_spread_is_variance)
            x = list(base_x) if adaptive else base_x
            car = Car(i, config.adaptivity, alpha, rng, values, x, start)
            self.cars.append(car)
        # Cars rest at a node only before their first departure; afterwards a
        # node arrival flows straight into the next departure within the tick.
        self._waiting: list[Car] = list(self.cars)

    # -- interventions ----------------------------------------------------

    def road_for_target(self, target: str):
        return self.network.by_id.get(target)

    def apply_toll_change(self, target: str, delta_cents: int) -> None:
        road = self.network.by_id[target]
        road.toll_cents += delta_cents
        self.toll_version += 1

    # -- stepping ----------------------------------------------------------

    def step(self, tick: int) -> StepEvents:
        events = StepEvents()
        network = self.network

        # Cars waiting at nodes (initial tick) depart first.
        if self._waiting:
            for car in self._waiting:
                self._depart(car, tick, events)
            self._waiting = []

        # Advance everything against tick-start occupancies.
        arrived: list[Car] = []
        for road in network.roads:
            cars = road.cars
            if not cars:
                continue
            adv = road.speed() * self.dt / road.length
            remaining = []
            for car in cars:
                car.fraction += adv
                if car.fraction >= 1.0:
                    arrived.append(car)
                else:
                    remaining.append(car)
            if len(remaining) != len(cars):
                road.cars = remaining

        # Node arrivals in car-id order (canonical event order; per-car RNG
        # streams make the outcome order-independent anyway).
        arrived.sort(key=lambda c: c.car_id)
        for car in arrived:
            self._arrive(car, tick, events)
        events.transits = self.transits
        return events

    def _arrive(self, car: Car, tick: int, events: StepEvents) -> None:
        road = car.road
        node = road.to_node
        if car.mode == "adaptive":
            z = (tick - car.entry_tick) * self.dt
            car.x[road.index] = learn_link_cost(car.x[road.index], car.alpha, z)
        car.road = None
        car.fraction = 0.0
        car.node = node
        if node == self.sink:
            self.transits += 1
        if node == car.destination:
            self._credit_arrival(car, tick)
        self._depart(car, tick, events)

    def _credit_arrival(self, car: Car, tick: int) -> None:
        travel_seconds = (tick - car.trip_start_tick) * self.dt
        value = car.values[car.destination]
        car.cumulative_utility += (value - car.tolls_paid
                                   - self.params.operating_cost * travel_seconds)
        car.arrivals += 1
        car.values = sample_destination_values(
            car.rng, sorted(self.network.nodes), self.params.destination_bias,
            self.params.value_spread_is_variance)

    def _depart(self, car: Car, tick: int, events: StepEvents) -> None:
        node = car.node
        starting_trip = car.destination is None or node == car.destination
        if self.random_routes:
            plan = self._random_plan(car, node)
        else:
            plan = self._plan_from(car, node)
        car.destination = plan.destination
        route = [self.network.by_id[f"{a}>{b}"]
                 for a, b in zip(plan.path, plan.path[1:])]
        if starting_trip:
            car.tolls_paid = 0.0
            car.trip_start_tick = tick
        first = route[0]
        car.tolls_paid += first.toll
        car.node = None
        car.road = first
        car.fraction = 0.0
        car.entry_tick = tick
        first.cars.append(car)
        events.departures.append((node, first.index))

    def _plan_from(self, car: Car, node: str) -> PlanResult:
        y = self.params.operating_cost
        if car.mode == "simple":
            key = (node, self.toll_version)
            reach = self._reach_cache.get(key)
            if reach is None:
                weights = [y * self._base_x[r.index] + r.toll
                           for r in self.network.roads]
                reach = shortest_paths(self.network, weights, node)
                self._reach_cache[key] = reach
            return plan_trip(self.network, [], self._base_x, y,
                             car.values, node, reach=reach)
        weights = [y * car.x[r.index] + r.toll for r in self.network.roads]
        return plan_trip(self.network, weights, car.x, y, car.values, node)

    def _random_plan(self, car: Car, node: str) -> PlanResult:
        """Training mode: uniform destination, uniform simple path."""
        nodes = [n for n in sorted(self.network.nodes) if n != node]
        dest = nodes[car.rng.randrange(len(nodes))]
        paths = self._simple_paths(node, dest)
        path = paths[car.rng.randrange(len(paths))]
        return PlanResult(dest, list(path), 0.0, 0.0, 0.0)

    def _simple_paths(self, src: str, dst: str) -> list[tuple[str, ...]]:
        key = (src, dst)
        cached = self._simple_paths_cache.get(key)
        if cached is None:
            cached = []

            def walk(path: tuple[str, ...]) -> None:
                here = path[-1]
                if here == dst:
                    cached.append(path)
                    return
                for road in self.network.out_roads[here]:
                    if road.to_node not in path:
                        walk(path + (road.to_node,))

            walk((src,))
            cached.sort()
            self._simple_paths_cache[key] = cached
        return cached

    # -- observation -------------------------------------------------------

    def sample(self, tick: int) -> dict:
        return {
            "occupancy": {r.road_id: len(r.cars) for r in self.network.roads},
            "tolls": {r.road_id: r.toll for r in self.network.roads},
            "transits": self.transits,
        }

    def car_positions(self) -> list[dict]:
        out = []
        for car in self.cars:
            if car.road is not None:
                out.append({"id": car.car_id, "road": car.road.road_id,
                            "fraction": round(min(car.fraction, 1.0), 4)})
            else:
                out.append({"id": car.car_id, "node": car.node})
        return out

    def conservation_holds(self) -> bool:
        on_roads = sum(len(r.cars) for r in self.network.roads)
        at_nodes = sum(1 for c in self.cars if c.node is not None)
        return on_roads + at_nodes == self.params.car_count

    def final_metrics(self, optimal_rate: float | None, duration_s: float) -> dict:
        metrics = {
            "transits": self.transits,
            "duration_s": duration_s,
            "transit_rate": self.transits / duration_s if duration_s else 0.0,
            "aggregate_utility": round(sum(c.cumulative_utility for c in self.cars), 9),
            "arrivals": sum(c.arrivals for c in self.cars),
        }
        if optimal_rate:
            metrics["optimal_rate"] = optimal_rate
            metrics["throughput_pct"] = 100.0 * metrics["transit_rate"] / optimal_rate
        return metrics


def throughput_percent(transits: int, window_s: float, optimal_rate: float) -> float:
    """Observed sink transits over a window as a percentage of the optimum."""
    if window_s <= 0:
        raise ValueError("window must have positive length")
    return 100.0 * (transits / window_s) / optimal_rate
