"""Shared-tank building scenario.

One tick is one period.  A period starts by crediting that period's refill
(bounded by tank capacity), then tenants attempt their scheduled activity for
the period in a freshly shuffled order.  Adaptive tenants pick a schedule
shift each morning from day 2 on; day 1 they behave exactly like simple ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..config import RunConfig
from ..rng import RngPool
from .tenants import (Activity, TenantState, choose_shift, estimate_level,
                      estimate_prices, generate_activities, simple_decide)


@dataclass
class PeriodEvents:
    day: int
    period: int
    level_start: int
    consumed: int = 0
    executed: list[tuple[int, int]] = field(default_factory=list)  # (tenant, size)


class WaterScenario:
    def __init__(self, config: RunConfig, rngs: RngPool, random_choices: bool = False):
        self.config = config
        self.params = config.water
        self.periods = self.params.periods_per_day
        self.random_choices = random_choices
        self.level = min(self.params.initial_level, self.params.tank_capacity)
        self.price_steps = [round(self.params.initial_price / self.params.price_increment)
                            ] * self.periods  # grid steps per period
        self._contention = rngs.stream("contention")
        self._tenant_rngs = [rngs.stream(f"tenant/{i}") for i in range(self.params.tenants)]

        table = generate_activities(self.params, rngs.stream("setup"))
        self.activity_table = table
        adaptive = config.adaptivity == "adaptive"
        self.tenants: list[TenantState] = []
        for t in range(self.params.tenants):
            acts = {a.home: a for a in table if a.tenant == t}
            self.tenants.append(TenantState(t, config.adaptivity, acts))
        self.adaptive = adaptive

        # Observation logs, indexed [day-1][period-1].
        self.level_log: list[list[int]] = []
        self.price_log: list[list[float]] = []
        self.consumption_log: list[list[int]] = []
        self.daily_utility: list[float] = []
        self.daily_value_executed: list[float] = []
        self.day = 1
        self.period = 1

    # -- interventions -------------------------------------------------------

    def apply_price_change(self, period: int, delta_steps: int) -> None:
        self.price_steps[period - 1] += delta_steps

    def price_of(self, period: int) -> float:
        return self.price_steps[period - 1] * self.params.price_increment

    # -- stepping --------------------------------------------------------------

    def step(self, tick: int) -> PeriodEvents:
        day, period = self.day, self.period
        if period == 1:
            self._begin_day(day)

        self.level = min(self.params.tank_capacity,
                         self.level + self.params.refill[period - 1])
        self.level_log[day - 1][period - 1] = self.level
        self.price_log[day - 1][period - 1] = self.price_of(period)
        events = PeriodEvents(day, period, self.level)

        order = list(range(len(self.tenants)))
        self._contention.shuffle(order)
        price = self.price_of(period)
        for idx in order:
            tenant = self.tenants[idx]
            act = self._activity_for(tenant, period)
            if act is None:
                continue
            if self._decide(tenant, act, price):
                self.level -= act.size
                gained = act.value - act.size * price
                tenant.cumulative_utility += gained
                self.daily_utility[day - 1] += gained
                self.daily_value_executed[day - 1] += act.value
                events.consumed += act.size
                events.executed.append((tenant.tenant_id, act.size))
            else:
                tenant.shed(act)
        self.consumption_log[day - 1][period - 1] = events.consumed

        if period == self.periods:
            self._end_day()
            self.day += 1
            self.period = 1
        else:
            self.period += 1
        return events

    def _decide(self, tenant: TenantState, act: Activity, price: float) -> bool:
        if self.random_choices:
            if act.size > self.level:
                return False
            return self._tenant_rngs[tenant.tenant_id].random() < 0.5
        return simple_decide(act.value, act.size, price, self.level)

    def _activity_for(self, tenant: TenantState, period: int) -> Activity | None:
        home = period - tenant.shift
        if not (1 <= home <= self.periods):
            return None
        return tenant.activities.get(home)

    def _begin_day(self, day: int) -> None:
        self.level_log.append([0] * self.periods)
        self.price_log.append([0.0] * self.periods)
        self.consumption_log.append([0] * self.periods)
        self.daily_utility.append(0.0)
        self.daily_value_executed.append(0.0)
        if self.adaptive and day >= 2 and not self.random_choices:
            price_est = [0.0] + estimate_prices(self.price_log[day - 2])
            level_est = [0.0] + [estimate_level([self.level_log[d][h]
                                                 for d in range(day - 1)])
                                 for h in range(self.periods)]
            for tenant in self.tenants:
                tenant.shift = choose_shift(tenant.activities, level_est,
                                            price_est, self.periods)

    def _end_day(self) -> None:
        # Activities shifted past the last period never ran today: shed them.
        for tenant in self.tenants:
            if tenant.shift > 0:
                for home in range(self.periods - tenant.shift + 1, self.periods + 1):
                    act = tenant.activities.get(home)
                    if act is not None:
                        tenant.shed(act)

    # -- observation ------------------------------------------------------------

    def sample(self, tick: int) -> dict:
        day = min(self.day, len(self.consumption_log))
        today = self.consumption_log[day - 1] if self.consumption_log else [0] * self.periods
        return {
            "day": self.day,
            "period": self.period,
            "level": self.level,
            "prices": [round(s * self.params.price_increment, 9) for s in self.price_steps],
            "consumption": list(today),
            "consumed_today": sum(today),
            "shed_count": sum(t.shed_count for t in self.tenants),
            "shed_value": round(sum(t.shed_value for t in self.tenants), 9),
            "happiness": [round(t.cumulative_utility, 9) for t in self.tenants],
            "aggregate_utility": round(sum(t.cumulative_utility for t in self.tenants), 9),
        }

    def utility_over_days(self, first_day: int, last_day: int) -> float:
        return sum(self.daily_utility[first_day - 1:last_day])

    def final_metrics(self, optimal_welfare: float | None) -> dict:
        lo, hi = self.params.metric_window_days
        window_utility = self.utility_over_days(lo, hi)
        metrics = {
            "days": len(self.daily_utility),
            "aggregate_utility": round(sum(self.daily_utility), 9),
            "window_days": [lo, hi],
            "window_utility": round(window_utility, 9),
            "daily_utility": [round(u, 9) for u in self.daily_utility],
            "shed_count": sum(t.shed_count for t in self.tenants),
            "shed_value": round(sum(t.shed_value for t in self.tenants), 9),
        }
        if optimal_welfare:
            metrics["optimal_welfare"] = optimal_welfare
            metrics["utility_pct"] = 100.0 * window_utility / optimal_welfare
        return metrics
