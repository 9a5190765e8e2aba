"""Integer money grids.

Tolls and budgets are accounted in integer cents, water prices in integer
tenths, budget accrual in integer micro-dollars.  Keeping every balance on an
integer grid makes replay bit-exact and rules out float drift in the
regulator's books.
"""

from __future__ import annotations

MICRO = 1_000_000  # micro-dollars per dollar


def to_cents(dollars: float) -> int:
    """Quantize a dollar amount to integer cents; raises if off-grid."""
    cents = round(dollars * 100)
    if abs(cents - dollars * 100) > 1e-6:
        raise ValueError(f"amount {dollars!r} is not on the cent grid")
    return cents


def to_grid(amount: float, increment: float) -> int:
    """Quantize to integer multiples of `increment`; raises if off-grid."""
    steps = round(amount / increment)
    if abs(steps * increment - amount) > 1e-9:
        raise ValueError(f"amount {amount!r} is not on the {increment} grid")
    return steps


def micro_per_tick(rate_per_second: float, dt: float) -> int:
    """Per-tick accrual in micro-dollars for a dollars-per-second rate."""
    return round(rate_per_second * dt * MICRO)
