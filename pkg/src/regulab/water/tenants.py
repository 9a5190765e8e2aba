"""Tenant activities and device decision rules.

Each tenant has one potential activity per period of the day, fixed across
days.  Simple devices run an activity exactly when its utility at the posted
price is positive and the tank holds enough water.  Adaptive devices shift
the whole daily schedule by 0-5 periods, using per-period water-level and
price estimates built from previous days; activities shifted past the end of
the day are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..config import WaterConfig
from ..rng import StreamRng


@dataclass(frozen=True)
class Activity:
    tenant: int
    home: int                 # 1-based period the activity belongs to
    size: int                 # water units
    value: float              # money for completing it
    window: tuple[int, int] = (0, 0)  # [start, end); defaults to [home, home+1)

    def __post_init__(self):
        if self.window == (0, 0):
            object.__setattr__(self, "window", (self.home, self.home + 1))


def simple_decide(value: float, size: int, price: float, available: int) -> bool:
    """Execute iff utility is positive and the tank can cover the activity."""
    return value - size * price > 0 and size <= available


def estimate_level(history: list[int]) -> float:
    """Mean start-of-period level over all previous days (>= 1 observation)."""
    if not history:
        raise ValueError("level estimate needs at least one prior day")
    return sum(history) / len(history)


def estimate_prices(yesterday: list[float]) -> list[float]:
    """Tomorrow's expected prices are yesterday's realized prices, verbatim."""
    return list(yesterday)


def choose_shift(acts_by_home: dict[int, Activity], level_est: list[float],
                 price_est: list[float], periods: int = 6) -> int:
    """Schedule shift maximizing estimated positive utility.

    level_est and price_est are indexed 1..periods (index 0 unused).  An
    activity with home h contributes at execution period h + t when the
    estimated level exceeds its size; shifts past the last period contribute
    nothing.  Ties prefer the smaller (less disruptive) shift.
    """
    best_t = 0
    best_sum: float | None = None
    for t in range(periods):
        total = 0.0
        for tau in range(1, periods + 1):
            act = acts_by_home.get(tau - t)
            if act is None:
                continue
            if level_est[tau] > act.size:
                total += max(0.0, act.value - act.size * price_est[tau])
        if best_sum is None or total > best_sum:
            best_t, best_sum = t, total
    return best_t


@dataclass
class TenantState:
    tenant_id: int
    mode: str                                  # simple | adaptive
    activities: dict[int, Activity]            # keyed by home period
    shift: int = 0                             # today's schedule shift
    cumulative_utility: float = 0.0
    shed_count: int = 0
    shed_value: float = 0.0

    def shed(self, activity: Activity) -> None:
        self.shed_count += 1
        self.shed_value += activity.value


def generate_activities(cfg: WaterConfig, rng: StreamRng) -> list[Activity]:
    """Draw the fixed daily activity table.

    Sizes are uniform random integers rescaled (largest-remainder) so the
    whole building's daily demand is exactly cfg.daily_demand.  Values follow
    the per-period means with multiplicative noise, so mornings and evenings
    carry the high-valued activities.
    """
    if cfg.activity_table is not None:
        return [Activity(int(a["tenant"]), int(a["home"]), int(a["size"]),
                         float(a["value"]),
                         tuple(a.get("window", (0, 0))))  # type: ignore[arg-type]
                for a in cfg.activity_table]

    slots = [(t, h) for t in range(cfg.tenants)
             for h in range(1, cfg.periods_per_day + 1)]
    raw = [rng.randint(cfg.size_raw_min, cfg.size_raw_max) for _ in slots]
    sizes = _apportion(raw, cfg.daily_demand)
    activities = []
    for (tenant, home), size in zip(slots, sizes):
        noise = rng.uniform(1.0 - cfg.value_noise, 1.0 + cfg.value_noise)
        value = cfg.value_means[home - 1] * noise
        activities.append(Activity(tenant, home, size, value))
    return activities


def _apportion(raw: list[int], target: int) -> list[int]:
    """Scale positive integers to sum exactly to target (largest remainder)."""
    total = sum(raw)
    quotas = [r * target / total for r in raw]
    out = [int(q) for q in quotas]
    shortfall = target - sum(out)
    order = sorted(range(len(raw)), key=lambda i: (-(quotas[i] - out[i]), i))
    for i in order[:shortfall]:
        out[i] += 1
    if any(s < 1 for s in out):
        raise ValueError("activity sizes must stay positive; adjust size_raw range")
    return out
