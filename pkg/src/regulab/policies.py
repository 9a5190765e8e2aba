"""Scripted regulator policies.

Stand-ins for human play in headless runs and CI.  Every policy goes through
the same validate/apply path as a human console: no backdoors, rejections
and budget accounting included.
"""

from __future__ import annotations

from .engine import Engine
from .regulator import Intervention


class NonePolicy:
    name = "none"

    def decide(self, engine: Engine):
        return []


class RandomWalkPolicy:
    """A random valid intervention at a fixed cadence."""

    name = "random-walk"

    def __init__(self, cadence_s: float = 10.0):
        self.cadence_s = cadence_s

    def decide(self, engine: Engine):
        tick = engine.clock.tick_index
        cadence_ticks = max(1, round(self.cadence_s / engine.clock.dt))
        if tick % cadence_ticks != 0:
            return []
        rng = engine.rngs.stream("policy")
        candidates = []
        if engine.config.scenario == "traffic":
            inc = engine.config.regulator.toll_increment
            for road in engine.scenario.network.roads:
                for delta in (inc, -inc):
                    iv = Intervention.toll(road.road_id, delta, tick, source=self.name)
                    if engine.regulator.validate(iv, road.toll_cents).accepted:
                        candidates.append(iv)
        else:
            inc = engine.config.water.price_increment
            for period in range(1, engine.scenario.periods + 1):
                for delta in (inc, -inc):
                    iv = Intervention.price(period, delta, tick, inc, source=self.name)
                    if engine.regulator.validate(
                            iv, engine.scenario.price_steps[period - 1]).accepted:
                        candidates.append(iv)
        if not candidates:
            return []
        return [(candidates[rng.randrange(len(candidates))], 0)]


class GreedyCongestionPolicy:
    """Raise the toll on the most over-capacity road, relieve its alternative."""

    name = "greedy-congestion"

    def __init__(self, cadence_s: float = 10.0):
        self.cadence_s = cadence_s

    def decide(self, engine: Engine):
        tick = engine.clock.tick_index
        cadence_ticks = max(1, round(self.cadence_s / engine.clock.dt))
        if tick % cadence_ticks != 0 or tick == 0:
            return []
        roads = engine.scenario.network.roads
        worst = max(roads, key=lambda r: (len(r.cars) - r.capacity, r.road_id))
        if len(worst.cars) <= worst.capacity:
            return []
        inc = engine.config.regulator.toll_increment
        out = [(Intervention.toll(worst.road_id, inc, tick, source=self.name), 0)]
        siblings = [r for r in engine.scenario.network.out_roads[worst.from_node]
                    if r is not worst]
        if siblings:
            spare = min(siblings, key=lambda r: (len(r.cars) / r.capacity, r.road_id))
            out.append((Intervention.toll(spare.road_id, -inc, tick, source=self.name), 0))
        return out


class PeakPricingPolicy:
    """Each morning, raise the price of the historically thirstiest period."""

    name = "peak-pricing"

    def __init__(self, changes_per_day: int = 1):
        self.changes_per_day = changes_per_day

    def decide(self, engine: Engine):
        scen = engine.scenario
        tick = engine.clock.tick_index
        if scen.period != 1 or scen.day < 2:
            return []
        periods = scen.periods
        history = scen.consumption_log[:scen.day - 1]
        totals = [sum(day[h] for day in history) for h in range(periods)]
        ranked = sorted(range(periods), key=lambda h: (-totals[h], h))
        inc = engine.config.water.price_increment
        out = []
        for h in ranked[:self.changes_per_day]:
            iv = Intervention.price(h + 1, inc, tick, inc, source=self.name)
            if engine.regulator.validate(iv, scen.price_steps[h]).accepted:
                out.append((iv, 0))
        return out


POLICIES = {
    "none": NonePolicy,
    "random-walk": RandomWalkPolicy,
    "greedy-congestion": GreedyCongestionPolicy,
    "peak-pricing": PeakPricingPolicy,
}


def make_policy(name: str | None):
    if name is None or name == "none":
        return None
    try:
        return POLICIES[name]()
    except KeyError:
        raise ValueError(f"unknown policy {name!r}; choices: {sorted(POLICIES)}")
