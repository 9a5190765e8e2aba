"""Regulatory power enforcement and intervention accounting.

All toll and price changes, human or scripted, pass through validate() and
apply() here; there is no other path into the world.  Budgets are integer
micro-dollars and tolls/prices integer grid steps, so the books never drift
and "balance never below zero" is enforceable exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .config import RunConfig
from .money import MICRO, micro_per_tick, to_grid

TOLL_KIND = "toll-change"
PRICE_KIND = "price-change"


class UnknownTargetError(KeyError):
    """Intervention names a road or period that does not exist: protocol bug."""


@dataclass(frozen=True)
class Intervention:
    kind: str                   # toll-change | price-change
    target: str | int           # road id, or period index (1-based)
    delta: float                # signed dollars (toll) or dollars/unit (price)
    delta_steps: int            # quantized grid steps, sign preserved
    issued_at_tick: int
    source: str = "human"       # "human" or a policy name
    client_tag: Optional[str] = None

    @staticmethod
    def toll(target: str, delta: float, tick: int, source: str = "human",
             client_tag: str | None = None) -> "Intervention":
        steps = to_grid(delta, 0.01)
        return Intervention(TOLL_KIND, target, delta, steps, tick, source, client_tag)

    @staticmethod
    def price(period: int, delta: float, tick: int, increment: float,
              source: str = "human", client_tag: str | None = None) -> "Intervention":
        steps = to_grid(delta, increment)
        return Intervention(PRICE_KIND, period, delta, steps, tick, source, client_tag)


@dataclass
class Decision:
    accepted: bool
    reason: str = ""            # power | budget | quota | bounds | increment | kind
    balance: float | None = None
    quota_used: int | None = None


@dataclass
class AppliedRecord:
    tick: int
    intervention: Intervention


@dataclass
class RegulatorState:
    power: str
    budget_micro: int = 0
    accrual_per_tick: int = 0
    quota_used: int = 0
    quota_max: int = 3
    history: list[AppliedRecord] = field(default_factory=list)

    @property
    def balance(self) -> float:
        return self.budget_micro / MICRO


class Regulator:
    """Validates and books interventions for one running scenario."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.scenario = config.scenario
        reg = config.regulator
        self.state = RegulatorState(power=reg.power, quota_max=reg.max_daily_changes)
        if config.scenario == "traffic":
            self.state.budget_micro = round(reg.budget_initial * MICRO)
            self.state.accrual_per_tick = micro_per_tick(reg.budget_rate, config.dt)
        self._toll_bounds = (0, 99)                      # cents
        w = config.water
        self._price_bounds = (to_grid(w.price_min, w.price_increment),
                              to_grid(w.price_max, w.price_increment))
        self._price_increment = w.price_increment

    # -- clock hooks --------------------------------------------------------

    def accrue(self) -> None:
        """Advance one tick of budget accrual (traffic limited power)."""
        if self.scenario == "traffic" and self.state.power == "limited":
            self.state.budget_micro += self.state.accrual_per_tick

    def day_boundary(self) -> None:
        self.state.quota_used = 0

    # -- validate / apply ----------------------------------------------------

    def validate(self, intervention: Intervention, current_steps: int) -> Decision:
        """Check an intervention against power, bounds and resources.

        `current_steps` is the target's present toll (cents) or price (grid
        steps); the caller resolves the target and raises UnknownTargetError
        for targets that do not exist.
        """
        st = self.state
        if st.power == "none":
            return self._reject("power")
        expected_kind = TOLL_KIND if self.scenario == "traffic" else PRICE_KIND
        if intervention.kind != expected_kind:
            return self._reject("kind")
        lo, hi = self._toll_bounds if intervention.kind == TOLL_KIND else self._price_bounds
        result = current_steps + intervention.delta_steps
        if not (lo <= result <= hi):
            return self._reject("bounds")
        if st.power == "limited":
            if self.scenario == "traffic":
                cost = abs(intervention.delta_steps) * 10_000  # cents -> micro
                if cost > st.budget_micro:
                    return self._reject("budget")
            else:
                if st.quota_used >= st.quota_max:
                    return self._reject("quota")
                if abs(intervention.delta_steps) != 1:
                    return self._reject("increment")
        return Decision(True, "", st.balance, st.quota_used)

    def apply(self, record_tick: int, intervention: Intervention) -> Decision:
        """Book an already-validated intervention."""
        st = self.state
        if st.power == "limited":
            if self.scenario == "traffic":
                st.budget_micro -= abs(intervention.delta_steps) * 10_000
            else:
                st.quota_used += 1
        st.history.append(AppliedRecord(record_tick, intervention))
        return Decision(True, "", st.balance, st.quota_used)

    def _reject(self, reason: str) -> Decision:
        return Decision(False, reason, self.state.balance, self.state.quota_used)


def interventions_per_second(history: list[AppliedRecord], window_s: float,
                             dt: float, start_s: float = 0.0) -> tuple[float, float]:
    """Applied-intervention rate and total absolute delta over a window."""
    if window_s <= 0:
        raise ValueError("window must have positive length")
    end_s = start_s + window_s
    count = 0
    total_abs = 0.0
    for rec in history:
        t = rec.tick * dt
        if start_s <= t < end_s:
            count += 1
            total_abs += abs(rec.intervention.delta)
    return count / window_s, total_abs
