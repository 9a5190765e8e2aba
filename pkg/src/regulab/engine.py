"""Simulation kernel: fixed-step clock, intervention queue, run loop.

One Engine owns one world.  External callers (gateway, CLI, policies) only
ever submit interventions into a queue and read immutable snapshots; each
tick drains the queue through the regulator's validate/apply path first, so
every agent deciding in that tick already sees the new tolls or prices, then
advances the scenario by one step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .config import RunConfig
from .forecast import ChoiceModel, forecast
from .records import RunRecord
from .regulator import Decision, Intervention, Regulator, UnknownTargetError
from .rng import RngPool
from .traffic.scenario import TrafficScenario
from .water.scenario import WaterScenario


@dataclass
class SimClock:
    dt: float
    tick_index: int = 0

    @property
    def elapsed(self) -> float:
        return self.tick_index * self.dt

    def advance(self) -> None:
        self.tick_index += 1


@dataclass
class QueuedCommand:
    intervention: Intervention
    not_before_tick: int = 0
    on_result: Callable[[Decision], None] | None = None


class Engine:
    def __init__(self, config: RunConfig, seed: int,
                 policy=None, random_agents: bool = False):
        config.validate()
        self.config = config
        self.seed = seed
        self.rngs = RngPool(seed)
        self.policy = policy
        dt = config.dt if config.scenario == "traffic" else 1.0
        self.clock = SimClock(dt=dt)
        if config.scenario == "traffic":
            self.scenario = TrafficScenario(config, self.rngs, random_routes=random_agents)
        else:
            self.scenario = WaterScenario(config, self.rngs, random_choices=random_agents)
        self.regulator = Regulator(config)
        self.record = RunRecord(config, seed)
        self.queue: list[QueuedCommand] = []
        self._ticks_per_sample = (round(config.sample_every_s / config.dt)
                                  if config.scenario == "traffic" else 1)
        self._forecaster: ChoiceModel | None = None
        self._forecast_every = 0
        if config.scenario == "traffic" and config.forecast.enabled:
            window_ticks = round(config.forecast.window_s / config.dt)
            self._forecaster = ChoiceModel(self.scenario.network, window_ticks)
            self._forecast_every = round(config.forecast.refresh_s / config.dt)
        self.latest_forecast = None
        self._sample()  # initial state at elapsed 0

    # -- intervention intake -------------------------------------------------

    def submit(self, intervention: Intervention, not_before_tick: int = 0,
               on_result: Callable[[Decision], None] | None = None) -> None:
        """Queue a command; it is validated and applied at a tick boundary."""
        self.queue.append(QueuedCommand(intervention, not_before_tick, on_result))

    def _drain_queue(self, tick: int) -> None:
        if not self.queue:
            return
        later: list[QueuedCommand] = []
        for cmd in self.queue:
            if cmd.not_before_tick > tick:
                later.append(cmd)
                continue
            decision = self._apply(tick, cmd.intervention)
            if cmd.on_result is not None:
                cmd.on_result(decision)
        self.queue = later

    def _apply(self, tick: int, iv: Intervention) -> Decision:
        current = self._current_steps(iv)
        decision = self.regulator.validate(iv, current)
        if decision.accepted:
            if self.config.scenario == "traffic":
                self.scenario.apply_toll_change(iv.target, iv.delta_steps)
            else:
                self.scenario.apply_price_change(iv.target, iv.delta_steps)
            decision = self.regulator.apply(tick, iv)
            self.record.add({"t": "intervention", "tick": tick, "kind": iv.kind,
                             "target": iv.target, "delta": iv.delta,
                             "source": iv.source, "client_tag": iv.client_tag})
        else:
            self.record.add({"t": "rejected", "tick": tick, "kind": iv.kind,
                             "target": iv.target, "delta": iv.delta,
                             "reason": decision.reason, "source": iv.source,
                             "client_tag": iv.client_tag})
        return decision

    def _current_steps(self, iv: Intervention) -> int:
        if self.config.scenario == "traffic":
            road = self.scenario.road_for_target(str(iv.target))
            if road is None:
                raise UnknownTargetError(iv.target)
            return road.toll_cents
        period = iv.target
        if not (isinstance(period, int) and 1 <= period <= self.scenario.periods):
            raise UnknownTargetError(iv.target)
        return self.scenario.price_steps[period - 1]

    # -- stepping ------------------------------------------------------------

    def step(self) -> None:
        tick = self.clock.tick_index
        if self.policy is not None:
            for iv, not_before in self.policy.decide(self):
                self.submit(iv, not_before)
        self._drain_queue(tick)
        events = self.scenario.step(tick)
        if self._forecaster is not None:
            self._forecaster.observe(tick, events.departures)
        self.regulator.accrue()
        self.clock.advance()
        if self.clock.tick_index % self._ticks_per_sample == 0:
            self._sample()
        if self._forecaster is not None and self.clock.tick_index % self._forecast_every == 0:
            report = forecast(self.scenario.network, self._forecaster,
                              self.config.forecast.horizon_s,
                              self.clock.tick_index, self.clock.elapsed,
                              yellow_fraction=self.config.forecast.yellow_fraction)
            self.latest_forecast = report
            self.record.add(report.to_event())
        if (self.config.scenario == "water"
                and self.scenario.period == 1 and self.clock.tick_index > 0):
            self.regulator.day_boundary()

    def _sample(self) -> None:
        event = {"t": "sample", "tick": self.clock.tick_index,
                 "elapsed": self.clock.elapsed}
        event.update(self.scenario.sample(self.clock.tick_index))
        if self.config.scenario == "traffic" and self.regulator.state.power == "limited":
            event["budget"] = round(self.regulator.state.balance, 6)
        self.record.add(event)

    # -- whole runs -----------------------------------------------------------

    def run(self, ticks: int | None = None) -> RunRecord:
        total = self.config.ticks() if ticks is None else ticks
        if total <= 0:
            raise ValueError("duration must be positive")
        while self.clock.tick_index < total:
            self.step()
        self.record.finish(self.final_metrics())
        return self.record

    def final_metrics(self) -> dict:
        from . import oracles
        from .regulator import interventions_per_second
        if self.config.scenario == "traffic":
            rate = oracles.optimal_throughput_cached(self.config).objective
            metrics = self.scenario.final_metrics(rate, self.clock.elapsed)
        else:
            welfare = oracles.optimal_welfare_cached(
                self.config, self.scenario.activity_table).objective
            metrics = self.scenario.final_metrics(welfare)
        history = self.regulator.state.history
        metrics["interventions"] = len(history)
        if self.clock.elapsed > 0:
            per_second, total_abs = interventions_per_second(
                history, self.clock.elapsed, self.clock.dt)
            metrics["interventions_per_second"] = round(per_second, 9)
            metrics["intervention_total_abs"] = round(total_abs, 9)
        return metrics


def run_headless(config: RunConfig, seed: int, policy=None,
                 ticks: int | None = None) -> RunRecord:
    """Free-running (no wall-clock pacing) complete run."""
    return Engine(config, seed, policy=policy).run(ticks)


class ReplayPolicy:
    """Feeds the applied interventions of a record back at their ticks."""

    def __init__(self, record: RunRecord):
        self._by_tick: dict[int, list[dict]] = {}
        for ev in record.interventions():
            self._by_tick.setdefault(ev["tick"], []).append(ev)
        self._increment = record.config.water.price_increment

    def decide(self, engine: Engine):
        out = []
        for ev in self._by_tick.get(engine.clock.tick_index, []):
            if ev["kind"] == "toll-change":
                iv = Intervention.toll(ev["target"], ev["delta"], ev["tick"],
                                       source=ev.get("source", "replay"),
                                       client_tag=ev.get("client_tag"))
            else:
                iv = Intervention.price(ev["target"], ev["delta"], ev["tick"],
                                        self._increment,
                                        source=ev.get("source", "replay"),
                                        client_tag=ev.get("client_tag"))
            out.append((iv, 0))
        return out


def replay(record: RunRecord) -> RunRecord:
    """Re-simulate a record from its config, seed and intervention log."""
    engine = Engine(record.config, record.seed, policy=ReplayPolicy(record))
    return engine.run()
