"""Shared toy instances and randomized-instance builders.

The "unit payoff" market is wired so the reward coefficient is exactly 1
coin per activation (competing hash-rate equals the device's, reward 2
coins, no pool fee) with a $250 electricity strike; on it the worked
single-turn and two-turn examples come out in closed rationals.
"""

import random

import pytest

from asicval.model import (
    EXAMPLE_COMPAT,
    AsicSpec,
    BlockRewardSchedule,
    HashRateCurve,
    MarketModel,
    MortalityModel,
    PriceCurve,
    RandomWalkParams,
)


def make_unit_market(
    spot=200.0,
    pool_fee=0.0,
    coin_trade_fee=0.0,
    bond_trade_fee=0.0,
    electricity=1.0,
    reward=2.0,
):
    return MarketModel(
        spot_price=spot,
        global_hash_rate=HashRateCurve.table([1.0]),
        block_reward=BlockRewardSchedule.constant(reward),
        electricity_price=PriceCurve.constant(electricity),
        pool_fee=pool_fee,
        coin_trade_fee=coin_trade_fee,
        bond_trade_fee=bond_trade_fee,
    )


def make_unit_asic(lifetime=2, horizon=1, reception=0, energy=250.0):
    return AsicSpec(
        hash_rate=1.0,
        energy_per_turn=energy,
        mortality=MortalityModel.step(lifetime),
        reception_turn=reception,
        lifetime_horizon=horizon,
    )


@pytest.fixture
def unit_market():
    return make_unit_market()


@pytest.fixture
def unit_asic():
    return make_unit_asic()


@pytest.fixture
def example_walk():
    # doubling/halving walk with a unit gross rate (needs the relaxed mode)
    return RandomWalkParams.checked(2.0, 0.5, 1.0, mode=EXAMPLE_COMPAT)


def random_strict_walk(rng: random.Random) -> RandomWalkParams:
    down = rng.uniform(0.4, 0.95)
    up = rng.uniform(1.05, 2.5)
    gross = 1.0 + rng.uniform(0.05, 0.9) * (up - 1.0)
    return RandomWalkParams.checked(up, down, gross)


def random_instance(rng: random.Random, max_depth=12, min_depth=0):
    """A strict-valid pricing instance with randomized moneyness."""
    walk = random_strict_walk(rng)
    n = rng.randint(min_depth, max_depth)
    k = rng.randint(0, 3)
    t = k + n
    price = rng.uniform(1.0, 5000.0)
    h = rng.uniform(1.0, 1e6)
    competing = h * rng.uniform(0.5, 1e6)
    reward = rng.uniform(0.1, 50.0)
    pool_fee = rng.choice([0.0, 0.02, 0.05])
    market = MarketModel(
        spot_price=price,
        global_hash_rate=HashRateCurve.exponential(
            competing, rng.uniform(-0.001, 0.002)
        ),
        block_reward=BlockRewardSchedule.constant(reward),
        electricity_price=PriceCurve.constant(1.0),
        pool_fee=pool_fee,
    )
    coefficient = h / (market.global_hash_rate.at(t) + h) * (1 - pool_fee) * reward
    moneyness = rng.uniform(0.0, 2.0)
    energy = coefficient * price * moneyness / h
    asic = AsicSpec(
        hash_rate=h,
        energy_per_turn=energy,
        mortality=MortalityModel.step(2),
        reception_turn=0,
        lifetime_horizon=1,
    )
    return t, k, price, asic, market, walk
