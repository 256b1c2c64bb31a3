"""Resolve a run configuration plus optional market data into engine inputs.

This is the single place where calendar conventions, unit conversions,
and estimation fallbacks are decided, so every front end (HTTP service,
CLI) prices from identical objects and can echo identical provenance.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

from .calibration import (
    DAYS_PER_YEAR,
    CalibrationContext,
    annualized_volatility,
    calibrated_walk,
    exp_growth_fit,
)
from .data_io import RunConfig
from .errors import ConfigError, DataError
from .history import Series
from .model import (
    AsicSpec,
    BlockRewardSchedule,
    HashRateCurve,
    MarketModel,
    MortalityModel,
    PriceCurve,
    RandomWalkParams,
)


@dataclass(frozen=True)
class Resolved:
    config: RunConfig
    asic: AsicSpec
    market: MarketModel
    walk: RandomWalkParams
    context: CalibrationContext
    valuation_date: dt.date | None
    annual_volatility: float | None
    provenance: dict


def _mortality(config: RunConfig, lifetime_turns: int) -> MortalityModel:
    block = config.asic.mortality
    if block is None:
        return MortalityModel.step(lifetime_turns)
    if block.kind == "step":
        return MortalityModel.step(block.lifetime_turns)
    if block.kind == "exponential":
        return MortalityModel.exponential(block.decay_per_turn)
    return MortalityModel.table(block.weights)


def _block_reward(config: RunConfig) -> BlockRewardSchedule:
    block = config.market.block_reward
    if block.constant_coins is not None:
        return BlockRewardSchedule.constant(block.constant_coins)
    if block.schedule is not None:
        return BlockRewardSchedule.schedule(block.schedule)
    return BlockRewardSchedule.halving(block.initial_coins, block.halving_epoch_turns)


def _hash_curve(
    config: RunConfig,
    hashrates: Series | None,
    valuation_date: dt.date | None,
    turns_per_day: float,
) -> HashRateCurve:
    block = config.market.global_hashrate
    if block is not None:
        if block.table_hs is not None:
            return HashRateCurve.table(block.table_hs)
        return HashRateCurve.exponential(block.h0_hs, block.growth_per_turn)
    if hashrates is None:
        raise ConfigError(
            "no hash-rate forecast: set market.global_hashrate or provide a "
            "hash-rate history to fit"
        )
    if valuation_date is None:
        valuation_date = hashrates.dates[-1]
    window_days = config.calibration.hashrate_fit_window_years * DAYS_PER_YEAR
    start = valuation_date - dt.timedelta(days=round(window_days))
    window = hashrates.window(start, valuation_date)
    if len(window) < 2:
        raise DataError("hash-rate fit window holds fewer than 2 observations")
    turns = [(d - valuation_date).days * turns_per_day for d in window.dates]
    base, growth = exp_growth_fit(turns, window.values)
    return HashRateCurve.exponential(base, growth)


def resolve(
    config: RunConfig,
    prices: Series | None = None,
    hashrates: Series | None = None,
    valuation_date: dt.date | None = None,
    spot: float | None = None,
) -> Resolved:
    cal = config.calibration
    turns_per_day = cal.turns_per_day
    turn_length = 1.0 / (DAYS_PER_YEAR * turns_per_day)
    hours_per_turn = 24.0 / turns_per_day

    if valuation_date is None and prices is not None:
        valuation_date = prices.dates[-1]

    if spot is None:
        spot = config.market.spot_price_usd
    if spot is None and prices is not None:
        spot = prices.value_on_or_before(valuation_date)
    if spot is None:
        raise ConfigError(
            "no spot price: set market.spot_price_usd, pass --spot, or provide "
            "a price history"
        )

    asic_cfg = config.asic
    if asic_cfg.energy_wh_per_unit_hash_per_turn is not None:
        energy = asic_cfg.energy_wh_per_unit_hash_per_turn
    else:
        energy = asic_cfg.power_watts * hours_per_turn / asic_cfg.hash_rate_hs
    lifetime_turns = max(
        1, round(asic_cfg.lifetime_years * DAYS_PER_YEAR * turns_per_day)
    )
    mortality = _mortality(config, lifetime_turns)
    horizon = mortality.lifetime if mortality.kind == "step" else lifetime_turns
    asic = AsicSpec(
        hash_rate=asic_cfg.hash_rate_hs,
        energy_per_turn=energy,
        mortality=mortality,
        reception_turn=asic_cfg.reception_delay_turns,
        lifetime_horizon=horizon,
    )

    curve = _hash_curve(config, hashrates, valuation_date, turns_per_day)
    market = MarketModel(
        spot_price=spot,
        global_hash_rate=curve,
        block_reward=_block_reward(config),
        electricity_price=PriceCurve.constant(config.market.electricity.per_watt_hour),
        pool_fee=config.market.pool_fee,
        coin_trade_fee=config.market.coin_trade_fee,
        bond_trade_fee=config.market.bond_trade_fee,
    )

    sigma = cal.annual_volatility
    if sigma is None and prices is not None:
        window = prices.window(cal.volatility_window_start, valuation_date)
        if len(window) >= 3:
            sigma = annualized_volatility(window)
    if cal.walk is not None:
        walk = RandomWalkParams.checked(
            cal.walk.up_factor,
            cal.walk.down_factor,
            cal.walk.gross_rate,
            cal.walk.up_probability,
            mode=cal.walk.mode,
        )
    else:
        if sigma is None:
            raise ConfigError(
                "no random-walk parameters: set calibration.annual_volatility, "
                "calibration.walk, or provide a price history"
            )
        walk = calibrated_walk(sigma, config.market.annual_interest, turn_length)

    context = CalibrationContext(
        annual_volatility=sigma if sigma is not None else 0.0,
        calendar_horizon=horizon * turn_length,
        lattice_steps=horizon,
        annual_interest=config.market.annual_interest,
        turn_length=turn_length,
    )

    provenance = {
        "config": config.model_dump(mode="json"),
        "resolved": {
            "valuation_date": valuation_date.isoformat() if valuation_date else None,
            "spot_usd": spot,
            "turns_per_day": turns_per_day,
            "turn_length_years": turn_length,
            "annual_volatility": sigma,
            "walk": {
                "up_factor": walk.up_factor,
                "down_factor": walk.down_factor,
                "gross_rate_per_turn": walk.gross_rate,
                "mode": walk.mode,
            },
            "global_hash_rate": {
                "kind": curve.kind,
                "base_hs": curve.base,
                "growth_per_turn": curve.growth,
                "table_entries": len(curve.values),
            },
            "energy_wh_per_unit_hash_per_turn": energy,
            "lifetime_horizon_turns": horizon,
            "reception_turn": asic.reception_turn,
        },
    }
    return Resolved(
        config=config,
        asic=asic,
        market=market,
        walk=walk,
        context=context,
        valuation_date=valuation_date,
        annual_volatility=sigma,
        provenance=provenance,
    )
