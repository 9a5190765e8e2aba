"""Congestion warning system.

A lightweight flow model is run 20 simulated seconds ahead of the live
world: current road occupancies become fractional car mass, mass drains from
each road at the congestion-dependent speed, and mass reaching a node splits
across outgoing roads in the proportions recently observed in the live
simulation.  Roads whose predicted peak exceeds capacity are flagged red;
peaks between 75% and 100% of capacity are flagged yellow.

The forecaster only ever reads snapshots: with identical seeds, running with
or without it yields bit-identical world trajectories.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .traffic.network import RoadNetwork, road_speed

STATUS_NONE = "none"
STATUS_YELLOW = "yellow"
STATUS_RED = "red"


def classify(peak: float, capacity: float, yellow_fraction: float = 0.75) -> str:
    if peak > capacity:
        return STATUS_RED
    if peak >= yellow_fraction * capacity:
        return STATUS_YELLOW
    return STATUS_NONE


@dataclass
class ForecastReport:
    issued_tick: int
    elapsed_s: float
    horizon_s: float
    peaks: dict[str, float]        # road id -> predicted peak occupancy
    statuses: dict[str, str]       # road id -> none | yellow | red

    def to_event(self) -> dict:
        return {
            "t": "forecast",
            "tick": self.issued_tick,
            "elapsed": self.elapsed_s,
            "horizon_s": self.horizon_s,
            "peaks": {k: round(v, 6) for k, v in sorted(self.peaks.items())},
            "statuses": dict(sorted(self.statuses.items())),
        }


class ChoiceModel:
    """Sliding-window estimate of the fraction of departures per road."""

    def __init__(self, network: RoadNetwork, window_ticks: int):
        self.network = network
        self.window_ticks = window_ticks
        self._events: deque[tuple[int, int]] = deque()   # (tick, road index)
        self._counts: list[int] = [0] * len(network.roads)

    def observe(self, tick: int, departures: list[tuple[str, int]]) -> None:
        for _node, road_index in departures:
            self._events.append((tick, road_index))
            self._counts[road_index] += 1
        cutoff = tick - self.window_ticks
        while self._events and self._events[0][0] <= cutoff:
            _t, idx = self._events.popleft()
            self._counts[idx] -= 1

    def fractions(self, node: str) -> list[tuple[int, float]]:
        """(road index, fraction) per outgoing road; uniform when unobserved."""
        out = self.network.out_roads[node]
        total = sum(self._counts[r.index] for r in out)
        if total == 0:
            share = 1.0 / len(out) if out else 0.0
            return [(r.index, share) for r in out]
        return [(r.index, self._counts[r.index] / total) for r in out]


def forecast(network: RoadNetwork, choices: ChoiceModel, horizon_s: float,
             issued_tick: int, elapsed_s: float, step_s: float = 1.0,
             yellow_fraction: float = 0.75) -> ForecastReport:
    """Pure lookahead over a snapshot of current occupancies."""
    roads = network.roads
    mass = [float(len(r.cars)) for r in roads]
    split = {node: choices.fractions(node) for node in network.nodes}
    peaks = [0.0] * len(roads)
    steps = round(horizon_s / step_s)
    for _ in range(steps):
        inflow = [0.0] * len(roads)
        for r in roads:
            m = mass[r.index]
            if m <= 0.0:
                continue
            v = road_speed(m, r.capacity, r.max_speed)
            out = min(m, m * v * step_s / r.length)
            mass[r.index] = m - out
            if out > 0.0:
                for idx, frac in split[r.to_node]:
                    inflow[idx] += out * frac
        for i, extra in enumerate(inflow):
            mass[i] += extra
            if mass[i] > peaks[i]:
                peaks[i] = mass[i]
    return ForecastReport(
        issued_tick, elapsed_s, horizon_s,
        peaks={r.road_id: peaks[r.index] for r in roads},
        statuses={r.road_id: classify(peaks[r.index], r.capacity, yellow_fraction)
                  for r in roads},
    )


def realized_status(occupancy: int, capacity: int,
                    yellow_fraction: float = 0.75) -> str:
    return classify(float(occupancy), capacity, yellow_fraction)


def accuracy(forecast_events: list[dict], samples: list[dict],
             capacities: dict[str, int], horizon_s: float,
             yellow_fraction: float = 0.75) -> float:
    """Fraction of (report, road) pairs whose status matched reality.

    Reality for a report issued at elapsed t is the road's occupancy in the
    state sample at t + horizon, classified with the same thresholds.
    """
    by_time = {round(s["elapsed"], 6): s for s in samples}
    matches = 0
    total = 0
    for ev in forecast_events:
        target = round(ev["elapsed"] + horizon_s, 6)
        sample = by_time.get(target)
        if sample is None:
            continue
        occ = sample["occupancy"]
        for road_id, predicted in ev["statuses"].items():
            actual = realized_status(occ[road_id], capacities[road_id], yellow_fraction)
            matches += predicted == actual
            total += 1
    if total == 0:
        raise ValueError("run shorter than the forecast horizon: nothing to score")
    return matches / total
