from __future__ import annotations

import random

import pytest

from regulab.engine import Engine
from regulab.money import MICRO, micro_per_tick, to_cents, to_grid
from regulab.regulator import (Intervention, Regulator, UnknownTargetError,
                               interventions_per_second)

from conftest import traffic_config, water_config


def test_money_grid():
    assert to_cents(0.50) == 50
    assert to_grid(0.3, 0.1) == 3
    assert micro_per_tick(0.007, 0.1) == 700
    with pytest.raises(ValueError):
        to_cents(0.505)
    with pytest.raises(ValueError):
        to_grid(0.05, 0.1)


def test_power_none_rejects_everything():
    reg = Regulator(traffic_config())
    iv = Intervention.toll("A>B", 0.01, 0)
    decision = reg.validate(iv, 50)
    assert not decision.accepted
    assert decision.reason == "power"


def test_budget_shortfall_rejected():
    cfg = traffic_config(regulator={"power": "limited", "budget_initial": 0.05})
    reg = Regulator(cfg)
    decision = reg.validate(Intervention.toll("A>B", 0.10, 0), 50)
    assert (decision.accepted, decision.reason) == (False, "budget")
    assert reg.validate(Intervention.toll("A>B", 0.05, 0), 50).accepted


def test_toll_bounds_enforced_even_unlimited():
    reg = Regulator(traffic_config(regulator={"power": "unlimited"}))
    assert reg.validate(Intervention.toll("A>B", 0.50, 0), 50).reason == "bounds"
    assert reg.validate(Intervention.toll("A>B", -0.51, 0), 50).reason == "bounds"
    assert reg.validate(Intervention.toll("A>B", 0.49, 0), 50).accepted
    assert reg.validate(Intervention.toll("A>B", -0.50, 0), 50).accepted


def test_apply_subtracts_absolute_delta():
    cfg = traffic_config(regulator={"power": "limited"})
    reg = Regulator(cfg)
    iv = Intervention.toll("A>B", -0.01, 0)
    assert reg.validate(iv, 50).accepted
    reg.apply(0, iv)
    assert reg.state.balance == pytest.approx(0.29)


def test_accrual_reaches_1080_cents_after_1500s():
    cfg = traffic_config(regulator={"power": "limited"})
    reg = Regulator(cfg)
    for _ in range(15000):  # 1500 s at dt=0.1
        reg.accrue()
    assert reg.state.budget_micro == 10_800_000
    assert reg.state.balance == 10.80


def test_ten_rapid_clicks_cost_ten_cents():
    cfg = traffic_config(regulator={"power": "limited", "budget_initial": 0.30})
    reg = Regulator(cfg)
    toll = 50
    for i in range(10):
        delta = 0.01 if i % 2 == 0 else -0.01
        iv = Intervention.toll("A>B", delta, 0)
        assert reg.validate(iv, toll).accepted
        reg.apply(0, iv)
        toll += iv.delta_steps
    assert reg.state.balance == pytest.approx(0.20)


def test_budget_never_negative_under_random_sequences():
    rng = random.Random(1)
    cfg = traffic_config(regulator={"power": "limited", "budget_initial": 0.10})
    reg = Regulator(cfg)
    toll = 50
    for step in range(4000):
        if step % 7 == 0:
            reg.accrue()
        delta = rng.choice([-0.05, -0.01, 0.01, 0.05])
        iv = Intervention.toll("A>B", delta, step)
        decision = reg.validate(iv, toll)
        if decision.accepted:
            reg.apply(step, iv)
            toll += iv.delta_steps
        assert reg.state.budget_micro >= 0
        assert 0 <= toll <= 99


def test_water_quota():
    cfg = water_config(regulator={"power": "limited"})
    reg = Regulator(cfg)
    inc = cfg.water.price_increment
    for _ in range(3):
        iv = Intervention.price(2, inc, 0, inc)
        assert reg.validate(iv, 10).accepted
        reg.apply(0, iv)
    fourth = reg.validate(Intervention.price(2, inc, 0, inc), 10)
    assert (fourth.accepted, fourth.reason) == (False, "quota")
    reg.day_boundary()
    assert reg.validate(Intervention.price(2, inc, 0, inc), 10).accepted


def test_water_limited_must_be_single_increment():
    cfg = water_config(regulator={"power": "limited"})
    reg = Regulator(cfg)
    two_steps = Intervention.price(1, 0.2, 0, cfg.water.price_increment)
    assert reg.validate(two_steps, 10).reason == "increment"


def test_price_bounds():
    reg = Regulator(water_config(regulator={"power": "unlimited"}))
    inc = 0.1
    assert reg.validate(Intervention.price(1, 1.0, 0, inc), 10).accepted  # 1.0 -> 2.0
    assert reg.validate(Intervention.price(1, 1.1, 0, inc), 10).reason == "bounds"
    assert reg.validate(Intervention.price(1, -1.0, 0, inc), 10).accepted  # -> 0.0
    assert reg.validate(Intervention.price(1, -1.1, 0, inc), 10).reason == "bounds"


def test_off_grid_delta_rejected_at_construction():
    with pytest.raises(ValueError):
        Intervention.toll("A>B", 0.015, 0)
    with pytest.raises(ValueError):
        Intervention.price(1, 0.15, 0, 0.1)


def test_unknown_target_is_protocol_error():
    eng = Engine(traffic_config(regulator={"power": "unlimited"}), seed=1)
    eng.submit(Intervention.toll("A>Z", 0.01, 0))
    with pytest.raises(UnknownTargetError):
        eng.step()


def test_interventions_per_second():
    cfg = traffic_config(regulator={"power": "unlimited"})
    reg = Regulator(cfg)
    assert interventions_per_second(reg.state.history, 100.0, 0.1) == (0.0, 0.0)
    for i in range(90):
        iv = Intervention.toll("A>B", 0.01, i)
        reg.apply(i, iv)  # ticks 0..89 at dt=0.1 -> first 9 seconds
    rate, total = interventions_per_second(reg.state.history, 1500.0, 0.1)
    assert rate == pytest.approx(90 / 1500.0)
    assert total == pytest.approx(0.90)


def test_scripted_cadence_rate():
    # a policy emitting one change every 10 s measures 0.1/s
    from regulab.policies import RandomWalkPolicy
    cfg = traffic_config(duration_s=100.0, regulator={"power": "unlimited"})
    eng = Engine(cfg, seed=5, policy=RandomWalkPolicy(cadence_s=10.0))
    eng.run()
    rate, _ = interventions_per_second(eng.regulator.state.history, 100.0, 0.1)
    assert rate == pytest.approx(0.1)


def test_quota_resets_at_day_boundary_in_engine():
    cfg = water_config(regulator={"power": "limited"}, water={"days": 2})
    eng = Engine(cfg, seed=1)
    inc = cfg.water.price_increment
    results = []
    for period in range(6):
        eng.submit(Intervention.price(1, inc, period, inc),
                   on_result=lambda d: results.append(d))
        eng.step()
    day1_accepted = [d.accepted for d in results]
    assert day1_accepted == [True, True, True, False, False, False]
    eng.submit(Intervention.price(1, inc, 6, inc), on_result=lambda d: results.append(d))
    eng.step()  # first period of day 2: quota is fresh
    assert results[-1].accepted
