"""Whole-device valuation: mortality-weighted sums of opportunity values,
reception-delay losses, the drift-extrapolation baseline, and sensitivity
sweeps over volatility and delivery delay.
"""

from __future__ import annotations

from dataclasses import dataclass

from .calibration import CalibrationContext
from .errors import DomainError
from .model import (
    MORTALITY_CUTOFF,
    AsicSpec,
    MarketModel,
    RandomWalkParams,
    ensure_valid,
    mortality_weight,
)
from .pricing import closed_form_value, opportunity_value, reward_terms


@dataclass(frozen=True)
class AsicQuote:
    """Device value plus its per-opportunity decomposition.

    ``breakdown`` holds (opportunity turn, mortality weight, opportunity
    value) triples; the quoted value is their weighted sum.
    """

    valuation_turn: int
    reception_turn: int
    spot: float
    value: float
    breakdown: tuple[tuple[int, float, float], ...]


@dataclass(frozen=True)
class SweepPoint:
    axis: float
    value: float
    percent_change: float


@dataclass(frozen=True)
class SweepResult:
    axis_label: str
    points: tuple[SweepPoint, ...]
    baseline: SweepPoint


def asic_value(
    s: int,
    t: int,
    price: float,
    asic: AsicSpec,
    market: MarketModel,
    walk: RandomWalkParams,
    method: str = "closed_form",
) -> AsicQuote:
    """Value at turn ``t`` of a device received at turn ``s`` >= ``t``.

    Sums mortality-weighted opportunity values over turns
    s .. s + lifetime_horizon, each priced at the valuation date on the
    lattice.  The sum stops early once the surviving fraction drops
    below the cutoff (it is non-increasing, so nothing is skipped).
    """
    if t > s:
        raise DomainError("valuation turn must not exceed reception turn")
    ensure_valid(walk)
    if method not in ("closed_form", "induction"):
        raise DomainError(f"unknown pricing method {method!r}")
    breakdown = []
    total = 0.0
    for u in range(s, s + asic.lifetime_horizon + 1):
        weight = mortality_weight(asic.mortality, u - s)
        if weight < MORTALITY_CUTOFF:
            break
        if method == "closed_form":
            value = closed_form_value(u, t, price, asic, market, walk)
        else:
            value = opportunity_value(u, t, price, asic, market, walk).value
        breakdown.append((u, weight, value))
        total += weight * value
    return AsicQuote(t, s, price, total, tuple(breakdown))


def reception_delay_loss(
    s: int,
    s_delayed: int,
    t: int,
    price: float,
    asic: AsicSpec,
    market: MarketModel,
    walk: RandomWalkParams,
    method: str = "closed_form",
) -> float:
    """Signed value change from receiving at ``s_delayed`` instead of ``s``.

    Negative whenever waiting pushes the opportunity window into worse
    per-turn economics (e.g. growing competition).
    """
    if s_delayed < s:
        raise DomainError("delayed reception must not precede the original")
    if s < t:
        raise DomainError("reception must not precede the valuation turn")
    delayed = asic_value(s_delayed, t, price, asic, market, walk, method)
    base = asic_value(s, t, price, asic, market, walk, method)
    return delayed.value - base.value


def naive_expected_value(
    s: int,
    t: int,
    price: float,
    growth_rate: float,
    asic: AsicSpec,
    market: MarketModel,
    gross_rate: float,
) -> float:
    """Point-forecast baseline: drift the spot, discount, ignore optionality.

    The exchange rate is extrapolated at a fixed per-turn growth rate and
    each turn's profit is discounted back; only the per-turn shutdown
    max(·, 0) survives from the option treatment.
    """
    if growth_rate <= 0:
        raise DomainError("growth rate must be > 0")
    if gross_rate <= 0:
        raise DomainError("gross rate must be > 0")
    if t > s:
        raise DomainError("valuation turn must not exceed reception turn")
    if price <= 0:
        raise DomainError("price must be > 0")
    total = 0.0
    for u in range(s, s + asic.lifetime_horizon + 1):
        weight = mortality_weight(asic.mortality, u - s)
        if weight < MORTALITY_CUTOFF:
            break
        coefficient, strike = reward_terms(u, asic, market)
        forecast = price * growth_rate ** (u - t)
        profit = max(coefficient * forecast - strike, 0.0)
        total += weight * profit / gross_rate ** (u - t)
    return total


def naive_branch_average(
    value_up: float, value_down: float, q: float, gross_rate: float
) -> float:
    """Probability-weighted branch average, discounted one turn.

    Coincides with the arbitrage-free one-step price exactly when ``q``
    equals the risk-neutral up weight; anywhere else it misprices.
    """
    if not 0 <= q <= 1:
        raise DomainError("probability must lie in [0, 1]")
    if gross_rate <= 0:
        raise DomainError("gross rate must be > 0")
    return (q * value_up + (1.0 - q) * value_down) / gross_rate


def _percent_points(axis_values, values, base: float) -> list[SweepPoint]:
    if base == 0:
        raise DomainError("baseline device value is 0; percent change undefined")
    return [
        SweepPoint(a, v, 100.0 * (v / base - 1.0))
        for a, v in zip(axis_values, values)
    ]


def volatility_sweep(
    sigma_grid,
    context: CalibrationContext,
    asic: AsicSpec,
    market: MarketModel,
    method: str = "closed_form",
) -> SweepResult:
    """Device value across a volatility grid, recalibrating the lattice
    factors per point; percent changes are against the first grid point."""
    grid = [float(s) for s in sigma_grid]
    if not grid:
        raise DomainError("volatility grid must not be empty")
    if any(s <= 0 for s in grid):
        raise DomainError("volatility grid must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("volatility grid must be strictly increasing")
    values = []
    for sigma in grid:
        walk = context.with_volatility(sigma).walk()
        quote = asic_value(
            asic.reception_turn, 0, market.spot_price, asic, market, walk, method
        )
        values.append(quote.value)
    points = _percent_points(grid, values, values[0])
    return SweepResult("volatility", tuple(points), points[0])


def delay_sweep(
    delay_grid,
    s: int,
    t: int,
    price: float,
    asic: AsicSpec,
    market: MarketModel,
    walk: RandomWalkParams,
    method: str = "closed_form",
) -> SweepResult:
    """Device value across reception delays; percent change vs no delay."""
    grid = [int(d) for d in delay_grid]
    if not grid:
        raise DomainError("delay grid must not be empty")
    if any(d < 0 for d in grid):
        raise DomainError("delays must be >= 0")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("delay grid must be strictly increasing")
    base = asic_value(s, t, price, asic, market, walk, method).value
    values = [
        asic_value(s + d, t, price, asic, market, walk, method).value for d in grid
    ]
    points = _percent_points(grid, values, base)
    return SweepResult("delay", tuple(points), SweepPoint(0.0, base, 0.0))
