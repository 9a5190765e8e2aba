"""Run configuration.

A run is fully described by (config, seed, intervention log).  Everything a
scenario or regulator reads at setup time lives here, defaults match the
testbed's reference setups, and every field can be overridden from a JSON
file.  Validation reports the path of the offending field so config errors
are actionable before tick 0.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Any

SCENARIOS = ("traffic", "water")
ADAPTIVITY_LEVELS = ("simple", "adaptive")
POWER_LEVELS = ("none", "limited", "unlimited")

NODE_ORDER = ("A", "B", "C", "D")


class ConfigError(ValueError):
    """Invalid run configuration; message carries the field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class RoadConfig:
    from_node: str
    to_node: str
    length: float = 100.0
    capacity: int = 60
    max_speed: float = 20.0


def default_roads() -> list[RoadConfig]:
    # Both directions of each edge are separate roads with their own
    # occupancy and toll.  Capacities are sized so 300 randomly placed cars
    # congest several roads immediately.
    caps = {("A", "B"): 60, ("A", "C"): 80, ("B", "C"): 40,
            ("B", "D"): 60, ("C", "D"): 80}
    roads = []
    for (a, b), cap in caps.items():
        roads.append(RoadConfig(a, b, capacity=cap))
        roads.append(RoadConfig(b, a, capacity=cap))
    return roads


@dataclass
class NetworkConfig:
    nodes: list[str] = field(default_factory=lambda: list(NODE_ORDER))
    roads: list[RoadConfig] = field(default_factory=default_roads)


@dataclass
class TrafficConfig:
    car_count: int = 300
    operating_cost: float = 0.079          # dollars per simulated second
    destination_bias: dict[str, float] = field(
        default_factory=lambda: {"A": 0.6, "B": 0.6, "C": 0.8, "D": 0.6})
    initial_toll: float = 0.50
    sink_node: str = "D"                   # throughput is transits through this node
    value_spread_is_variance: bool = False  # second Normal parameter: std (default) or variance
    network: NetworkConfig = field(default_factory=NetworkConfig)


@dataclass
class WaterConfig:
    tenants: int = 8
    periods_per_day: int = 6
    days: int = 30
    refill: list[int] = field(default_factory=lambda: [0, 40, 50, 60, 30, 0])
    # Capacity is calibrated so the evening fully drains the tank: with a
    # larger tank, overnight carry-over always covers the morning and the
    # adaptive scheduler never has anything to learn.
    tank_capacity: int = 30
    initial_level: int = 60
    initial_price: float = 1.0
    price_min: float = 0.0
    price_max: float = 2.0
    price_increment: float = 0.1
    value_means: list[float] = field(default_factory=lambda: [8, 4, 3, 3, 4, 8])
    value_noise: float = 0.25              # +/- fraction of the period mean
    size_raw_min: int = 4                  # raw uniform integers, rescaled so the
    size_raw_max: int = 7                  # daily total is exactly daily_demand
    daily_demand: int = 300
    activity_table: list[dict[str, Any]] | None = None  # explicit override
    metric_window_days: list[int] = field(default_factory=lambda: [26, 30])


@dataclass
class RegulatorConfig:
    power: str = "none"
    budget_initial: float = 0.30           # traffic limited power
    budget_rate: float = 0.007             # dollars per simulated second
    toll_increment: float = 0.01
    max_daily_changes: int = 3             # water limited power


@dataclass
class ForecastConfig:
    enabled: bool = False
    horizon_s: float = 20.0
    window_s: float = 60.0
    refresh_s: float = 1.0
    yellow_fraction: float = 0.75


@dataclass
class PacingConfig:
    # Interactive sessions only; headless runs free-run.
    traffic_speed: float = 1.0             # simulated seconds per wall second
    water_period_seconds: float = 10.0     # wall seconds per period
    frame_hz: float = 5.0


@dataclass
class RunConfig:
    scenario: str = "traffic"
    adaptivity: str = "simple"
    seed: int = 0
    dt: float = 0.1                        # simulated seconds per tick (traffic)
    duration_s: float = 1500.0             # traffic run length
    sample_every_s: float = 1.0
    regulator: RegulatorConfig = field(default_factory=RegulatorConfig)
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    water: WaterConfig = field(default_factory=WaterConfig)
    forecast: ForecastConfig = field(default_factory=ForecastConfig)
    pacing: PacingConfig = field(default_factory=PacingConfig)

    def validate(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigError("scenario", f"must be one of {SCENARIOS}")
        if self.adaptivity not in ADAPTIVITY_LEVELS:
            raise ConfigError("adaptivity", f"must be one of {ADAPTIVITY_LEVELS}")
        if self.regulator.power not in POWER_LEVELS:
            raise ConfigError("regulator.power", f"must be one of {POWER_LEVELS}")
        if self.dt <= 0:
            raise ConfigError("dt", "must be positive")
        if self.duration_s <= 0:
            raise ConfigError("duration_s", "must be positive")
        if self.scenario == "traffic":
            self._validate_traffic()
        else:
            self._validate_water()

    def _validate_traffic(self) -> None:
        t = self.traffic
        if t.car_count <= 0:
            raise ConfigError("traffic.car_count", "must be positive")
        net = t.network
        if len(net.nodes) < 2:
            raise ConfigError("traffic.network.nodes", "need at least two nodes")
        if t.sink_node not in net.nodes:
            raise ConfigError("traffic.sink_node", f"{t.sink_node!r} not in nodes")
        seen = set()
        for i, r in enumerate(net.roads):
            where = f"traffic.network.roads[{i}]"
            if r.from_node not in net.nodes or r.to_node not in net.nodes:
                raise ConfigError(where, "endpoint not in nodes")
            if r.from_node == r.to_node:
                raise ConfigError(where, "self-loops are not allowed")
            if (r.from_node, r.to_node) in seen:
                raise ConfigError(where, "duplicate road")
            seen.add((r.from_node, r.to_node))
            if r.capacity < 1:
                raise ConfigError(where + ".capacity", "must be >= 1")
            if r.length <= 0 or r.max_speed <= 0:
                raise ConfigError(where, "length and max_speed must be positive")
        for n in net.nodes:
            if n not in t.destination_bias:
                raise ConfigError("traffic.destination_bias", f"missing node {n!r}")
        if not _strongly_connected(net):
            raise ConfigError("traffic.network", "network must be strongly connected")

    def _validate_water(self) -> None:
        w = self.water
        if w.tenants <= 0:
            raise ConfigError("water.tenants", "must be positive")
        if len(w.refill) != w.periods_per_day:
            raise ConfigError("water.refill", "length must equal periods_per_day")
        if len(w.value_means) != w.periods_per_day:
            raise ConfigError("water.value_means", "length must equal periods_per_day")
        if w.tank_capacity < 1 or w.initial_level < 0:
            raise ConfigError("water.tank_capacity", "capacity >= 1, level >= 0")
        if w.price_increment <= 0:
            raise ConfigError("water.price_increment", "must be positive")
        if not (w.price_min <= w.initial_price <= w.price_max):
            raise ConfigError("water.initial_price", "outside [price_min, price_max]")
        if w.days < 1:
            raise ConfigError("water.days", "must be >= 1")
        lo, hi = w.metric_window_days
        if not (1 <= lo <= hi):
            raise ConfigError("water.metric_window_days", "must satisfy 1 <= lo <= hi")

    def ticks(self) -> int:
        """Total ticks for a headless run of the configured duration."""
        if self.scenario == "traffic":
            return round(self.duration_s / self.dt)
        return self.water.days * self.water.periods_per_day

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        cfg = _build(cls, data, path="")
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        with open(path) as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigError(path, f"not valid JSON: {e}") from e
        return cls.from_dict(data)


def _strongly_connected(net: NetworkConfig) -> bool:
    out: dict[str, list[str]] = {n: [] for n in net.nodes}
    back: dict[str, list[str]] = {n: [] for n in net.nodes}
    for r in net.roads:
        out[r.from_node].append(r.to_node)
        back[r.to_node].append(r.from_node)

    def reaches_all(adj: dict[str, list[str]]) -> bool:
        start = net.nodes[0]
        seen = {start}
        stack = [start]
        while stack:
            for nxt in adj[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return len(seen) == len(net.nodes)

    return reaches_all(out) and reaches_all(back)


def _build(cls: type, data: Any, path: str):
    """Recursively build a dataclass from plain dicts, rejecting unknown keys."""
    if not dataclasses.is_dataclass(cls):
        return data
    if not isinstance(data, dict):
        raise ConfigError(path or "<root>", f"expected object, got {type(data).__name__}")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        if key not in fields:
            raise ConfigError(f"{path}{key}", "unknown field")
        f = fields[key]
        sub = f"{path}{key}."
        if f.type in ("RegulatorConfig",):
            kwargs[key] = _build(RegulatorConfig, value, sub)
        elif f.type in ("TrafficConfig",):
            kwargs[key] = _build(TrafficConfig, value, sub)
        elif f.type in ("WaterConfig",):
            kwargs[key] = _build(WaterConfig, value, sub)
        elif f.type in ("ForecastConfig",):
            kwargs[key] = _build(ForecastConfig, value, sub)
        elif f.type in ("PacingConfig",):
            kwargs[key] = _build(PacingConfig, value, sub)
        elif f.type in ("NetworkConfig",):
            kwargs[key] = _build(NetworkConfig, value, sub)
        elif key == "roads":
            if not isinstance(value, list):
                raise ConfigError(f"{path}roads", "expected a list")
            kwargs[key] = [_build(RoadConfig, v, f"{path}roads[{i}].")
                           for i, v in enumerate(value)]
        else:
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise ConfigError(path or "<root>", str(e)) from e
