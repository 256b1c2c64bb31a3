"""Coin-plus-bond portfolios that replicate mining revenue.

``imitating_weights`` builds the one-step replicating position; the
simulator maintains one sub-portfolio per future mining opportunity,
re-deriving target weights from the realized spot at every adjustment
date and liquidating each sub-portfolio at its opportunity's expiry.

Fee accounting: positions are kept self-financed (the bond leg absorbs
whatever the coin trade does not), while trading fees are charged as
external cash injections and deducted from the revenue series.  With
zero fees every cash injection after the initial purchase is therefore
exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from .errors import DataError, DegenerateLatticeError, DomainError, ShortSaleError
from .history import MarketHistory
from .model import (
    MORTALITY_CUTOFF,
    AsicSpec,
    MarketModel,
    RandomWalkParams,
    ensure_valid,
    mortality_weight,
)
from .pricing import closed_form_value, immediate_value, short_amount

WalkPolicy = Union[RandomWalkParams, Callable[[float], RandomWalkParams]]


@dataclass(frozen=True)
class ImitatingWeights:
    coins: float
    bonds: float


@dataclass(frozen=True)
class PortfolioState:
    """Holdings after a trade: ``mark_value = bonds + coins * price``."""

    turn: int
    coins: float
    bonds: float
    mark_value: float


@dataclass(frozen=True)
class TradeEntry:
    turn: int
    coin_delta: float
    bond_delta: float
    coin_fee: float
    bond_fee: float
    cash_injection: float


@dataclass(frozen=True)
class RevenueLeg:
    """Cumulative realized revenue of one backtest side, net of its costs."""

    label: str
    dates: tuple
    cumulative_revenue: tuple[float, ...]
    initial_cost: float
    total_fees: float = 0.0
    trade_log: tuple[TradeEntry, ...] = ()

    @property
    def final_total(self) -> float:
        return self.cumulative_revenue[-1]


@dataclass(frozen=True)
class BacktestReport:
    dates: tuple
    asic_revenue: tuple[float, ...]
    portfolio_revenue: tuple[float, ...]
    asic_initial_cost: float
    portfolio_initial_cost: float
    portfolio_fees: float

    @classmethod
    def combine(cls, asic_leg: RevenueLeg, portfolio_leg: RevenueLeg) -> "BacktestReport":
        if asic_leg.dates != portfolio_leg.dates:
            raise DataError("backtest legs cover different dates")
        return cls(
            dates=asic_leg.dates,
            asic_revenue=asic_leg.cumulative_revenue,
            portfolio_revenue=portfolio_leg.cumulative_revenue,
            asic_initial_cost=asic_leg.initial_cost,
            portfolio_initial_cost=portfolio_leg.initial_cost,
            portfolio_fees=portfolio_leg.total_fees,
        )


def imitating_weights(
    price: float,
    value_up: float,
    value_down: float,
    walk: RandomWalkParams,
) -> ImitatingWeights:
    """Coins and bonds matching the opportunity's value in both branches.

    The coin leg is identical to the risk-free construction's short
    amount; the bond leg is (Δ·V_down − δ·V_up)/(r·(Δ−δ)).
    """
    spread = walk.up_factor - walk.down_factor
    if spread == 0:
        raise DegenerateLatticeError("up and down factors are equal")
    if walk.gross_rate == 0:
        raise DomainError("gross rate must be nonzero")
    coins = short_amount(price, value_up, value_down, walk)
    bonds = (walk.up_factor * value_down - walk.down_factor * value_up) / (
        walk.gross_rate * spread
    )
    return ImitatingWeights(coins, bonds)


def imitating_value(weights: ImitatingWeights, price: float) -> float:
    """Mark the position: bonds plus coins at the current exchange rate."""
    return weights.bonds + weights.coins * price


def rebalance(
    current: PortfolioState,
    target: ImitatingWeights,
    price: float,
    turn: int,
    coin_fee_rate: float = 0.0,
    bond_fee_rate: float = 0.0,
    gross_rate: float = 1.0,
    steps_elapsed: int = 1,
) -> tuple[PortfolioState, TradeEntry]:
    """Trade the portfolio to the target weights at the given price.

    Bonds accrue the per-step gross rate for each elapsed lattice step
    before trading.  Fees are proportional to traded notionals; the cash
    injection is whatever the target position plus fees costs beyond the
    pre-trade wealth (negative means cash is withdrawn).
    """
    if not 0 <= coin_fee_rate < 1 or not 0 <= bond_fee_rate < 1:
        raise DomainError("fee rates must lie in [0, 1)")
    if steps_elapsed < 0:
        raise DomainError("steps elapsed must be >= 0")
    bonds_grown = current.bonds * gross_rate**steps_elapsed
    coin_delta = target.coins - current.coins
    bond_delta = target.bonds - bonds_grown
    coin_fee = coin_fee_rate * abs(coin_delta) * price
    bond_fee = bond_fee_rate * abs(bond_delta)
    pre_value = current.coins * price + bonds_grown
    mark_value = target.coins * price + target.bonds
    injection = mark_value + coin_fee + bond_fee - pre_value
    state = PortfolioState(turn, target.coins, target.bonds, mark_value)
    entry = TradeEntry(turn, coin_delta, bond_delta, coin_fee, bond_fee, injection)
    return state, entry


def _live_opportunities(asic: AsicSpec) -> list[tuple[int, float]]:
    out = []
    s = asic.reception_turn
    for u in range(s, s + asic.lifetime_horizon + 1):
        weight = mortality_weight(asic.mortality, u - s)
        if weight < MORTALITY_CUTOFF:
            break
        out.append((u, weight))
    return out


def _trade_turns(expiry: int, adjustments: int) -> list[int]:
    steps = min(adjustments, expiry)
    return sorted({int(round(i * expiry / steps)) for i in range(steps)})


def simulate_replication(
    history: MarketHistory,
    asic: AsicSpec,
    market: MarketModel,
    walk_policy: WalkPolicy,
    steps_per_opportunity: int = 25,
    turn_length: float = 1.0 / 365.0,
    allow_short: bool = False,
) -> RevenueLeg:
    """Run the replicating strategy along a realized price path.

    Turn ``i`` is the ``i``-th observation of ``history.prices``; the
    initial purchase happens at turn 0.  Each live opportunity gets its
    own sub-portfolio, adjusted at up to ``steps_per_opportunity``
    equally spaced turns.  When ``walk_policy`` is a callable it receives
    each opportunity's adjustment-step length in years and returns the
    per-step walk; a plain ``RandomWalkParams`` is used as-is for every
    opportunity.

    Weights are re-derived at every adjustment from the realized spot
    (which need not be a lattice node); remaining-horizon values use the
    closed form.  Revenue accrues at expiries (liquidation proceeds) and
    is reduced by every trading fee as it is paid; the initial purchase
    and its fees are capitalized in ``initial_cost`` instead.
    """
    if steps_per_opportunity < 1:
        raise DomainError("need at least one adjustment per opportunity")
    opportunities = _live_opportunities(asic)
    window = opportunities[-1][0]
    prices = history.prices
    if len(prices) < window + 1:
        raise DataError(
            f"history has {len(prices)} observations, window needs {window + 1}"
        )

    revenue_events = [0.0] * (window + 1)
    trade_log: list[TradeEntry] = []
    initial_cost = 0.0
    total_fees = 0.0
    coin_fee_rate = market.coin_trade_fee
    bond_fee_rate = market.bond_trade_fee

    for expiry, scale in opportunities:
        if expiry == 0:
            # expires at purchase: buy the payoff, collect it immediately
            payoff = scale * immediate_value(0, prices.values[0], asic, market)
            initial_cost += payoff
            revenue_events[0] += payoff
            continue
        steps = min(steps_per_opportunity, expiry)
        trade_turns = _trade_turns(expiry, steps_per_opportunity)
        if isinstance(walk_policy, RandomWalkParams):
            walk = walk_policy
        else:
            walk = walk_policy(expiry * turn_length / steps)
        ensure_valid(walk)

        state = PortfolioState(0, 0.0, 0.0, 0.0)
        for j, turn in enumerate(trade_turns):
            spot = prices.values[turn]
            remaining = steps - j
            value_up = closed_form_value(
                expiry,
                expiry - (remaining - 1),
                walk.up_factor * spot,
                asic,
                market,
                walk,
            )
            value_down = closed_form_value(
                expiry,
                expiry - (remaining - 1),
                walk.down_factor * spot,
                asic,
                market,
                walk,
            )
            raw = imitating_weights(spot, value_up, value_down, walk)
            coins = scale * raw.coins
            if coins < -1e-12 and not allow_short:
                raise ShortSaleError(
                    f"replication requires shorting {-coins} coins at turn {turn}"
                )
            if j == 0:
                target = ImitatingWeights(coins, scale * raw.bonds)
            else:
                wealth = state.coins * spot + state.bonds * walk.gross_rate
                target = ImitatingWeights(coins, wealth - coins * spot)
            state, entry = rebalance(
                state,
                target,
                spot,
                turn,
                coin_fee_rate,
                bond_fee_rate,
                walk.gross_rate,
                steps_elapsed=0 if j == 0 else 1,
            )
            trade_log.append(entry)
            fees = entry.coin_fee + entry.bond_fee
            total_fees += fees
            if j == 0:
                initial_cost += entry.cash_injection
            else:
                revenue_events[turn] -= fees

        # expiry: liquidate the sub-portfolio at the realized price
        spot = prices.values[expiry]
        bonds_grown = state.bonds * walk.gross_rate
        gross = state.coins * spot + bonds_grown
        liq_fees = coin_fee_rate * abs(state.coins) * spot + bond_fee_rate * abs(
            bonds_grown
        )
        total_fees += liq_fees
        revenue_events[expiry] += gross - liq_fees

    cumulative = []
    running = 0.0
    for amount in revenue_events:
        running += amount
        cumulative.append(running)
    return RevenueLeg(
        label="portfolio",
        dates=tuple(prices.dates[: window + 1]),
        cumulative_revenue=tuple(cumulative),
        initial_cost=initial_cost,
        total_fees=total_fees,
        trade_log=tuple(trade_log),
    )


def asic_realized_revenue(
    history: MarketHistory,
    asic: AsicSpec,
    market: MarketModel,
    initial_cost: float = 0.0,
) -> RevenueLeg:
    """Mining revenue along realized prices and hash-rates.

    Each live turn the device runs only when the realized reward covers
    the electricity bill; profits are weighted by the surviving hardware
    fraction.  Reward schedule, pool fee, and electricity come from the
    market model; exchange rate and competing hash-rate from history.
    """
    aligned = history.aligned()
    opportunities = _live_opportunities(asic)
    window = opportunities[-1][0]
    if len(aligned.prices) < window + 1:
        raise DataError(
            f"history has {len(aligned.prices)} aligned observations, "
            f"window needs {window + 1}"
        )
    h = asic.hash_rate
    revenue_events = [0.0] * (window + 1)
    for turn, weight in opportunities:
        spot = aligned.prices.values[turn]
        competing = aligned.hash_rates.values[turn]
        coefficient = h / (competing + h) * (1.0 - market.pool_fee) * (
            market.block_reward.at(turn)
        )
        strike = h * asic.energy_per_turn * market.electricity_price.at(turn)
        revenue_events[turn] += weight * max(coefficient * spot - strike, 0.0)
    cumulative = []
    running = 0.0
    for amount in revenue_events:
        running += amount
        cumulative.append(running)
    return RevenueLeg(
        label="asic",
        dates=tuple(aligned.prices.dates[: window + 1]),
        cumulative_revenue=tuple(cumulative),
        initial_cost=initial_cost,
    )
