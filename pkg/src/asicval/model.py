"""Domain types shared by the pricing, valuation, and replication modules.

Everything here is an immutable value object plus a handful of pure
lookup functions, so instances can be shared freely across threads.

Units used throughout the package:
    hash rates      hashes / second
    energy          watt-hours per unit hash-rate per turn (``energy_per_turn``)
    electricity     USD per watt-hour
    prices, values  USD
    block reward    coins per turn
    gross rate      dimensionless per-turn multiplier (1 + per-turn interest)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DegenerateLatticeError, DomainError, WalkValidationError

STRICT = "strict"
EXAMPLE_COMPAT = "example_compat"

#: mortality weights below this threshold truncate hardware-value sums
MORTALITY_CUTOFF = 1e-9


@dataclass(frozen=True)
class RandomWalkParams:
    """Multiplicative random-walk description of the exchange rate.

    Each turn the coin price is multiplied by ``up_factor`` or
    ``down_factor``; a risk-free bond grows by ``gross_rate``.
    ``up_probability`` is the (optional) real-world up-move probability; it
    is stored for documentation and path simulation but no pricing
    operation reads it.

    ``mode`` selects the validation regime: ``strict`` demands
    0 < down < 1 < gross < up (the no-arbitrage assumption), while
    ``example_compat`` relaxes the gross rate to >= 1 so that textbook
    instances with a unit interest rate stay representable.  The relaxed
    mode must always be requested explicitly.
    """

    up_factor: float
    down_factor: float
    gross_rate: float
    up_probability: float | None = None
    mode: str = STRICT

    @classmethod
    def checked(
        cls,
        up_factor: float,
        down_factor: float,
        gross_rate: float,
        up_probability: float | None = None,
        mode: str = STRICT,
    ) -> "RandomWalkParams":
        """Construct and validate in one step; raises on any violation."""
        walk = cls(up_factor, down_factor, gross_rate, up_probability, mode)
        ensure_valid(walk)
        return walk


def validate(walk: RandomWalkParams, mode: str | None = None) -> list[str]:
    """Check the no-arbitrage inequalities; total function, never raises.

    Returns an empty list when the parameters are acceptable, otherwise
    one message per violated inequality.
    """
    mode = walk.mode if mode is None else mode
    if mode not in (STRICT, EXAMPLE_COMPAT):
        return [f"unknown validation mode {mode!r}"]
    up, down, gross = walk.up_factor, walk.down_factor, walk.gross_rate
    violations = []
    if not down > 0:
        violations.append("δ > 0 fails")
    if mode == STRICT:
        if not down < 1:
            violations.append("δ < 1 fails")
        if not gross > 1:
            violations.append("r > 1 fails")
        if not gross < up:
            violations.append("r < Δ fails")
    else:
        if not down < up:
            violations.append("δ < Δ fails")
        if not gross >= 1:
            violations.append("r ≥ 1 fails")
        if not down < gross:
            violations.append("δ < r fails")
    if walk.up_probability is not None and not 0 <= walk.up_probability <= 1:
        violations.append("0 ≤ q ≤ 1 fails")
    return violations


def ensure_valid(walk: RandomWalkParams, mode: str | None = None) -> None:
    """Raise ``WalkValidationError`` listing every violated inequality."""
    violations = validate(walk, mode)
    if violations:
        raise WalkValidationError("; ".join(violations))


def risk_neutral_up_weight(walk: RandomWalkParams) -> float:
    """The weight (r−δ)/(Δ−δ) that makes discounted expectation arbitrage-free."""
    spread = walk.up_factor - walk.down_factor
    if spread == 0:
        raise DegenerateLatticeError("up and down factors are equal")
    return (walk.gross_rate - walk.down_factor) / spread


@dataclass(frozen=True)
class MortalityModel:
    """Fraction of hardware value surviving ``t`` turns after reception.

    Variants:
        step(lifetime)        1 before the lifetime, 0 from it onward
        exponential(decay)    exp(−decay·t)
        table(weights)        explicit per-turn weights; queries past the
                              end return the last entry (which may be > 0)
    """

    kind: str
    lifetime: int = 0
    decay: float = 0.0
    weights: tuple[float, ...] = ()

    @classmethod
    def step(cls, lifetime: int) -> "MortalityModel":
        if lifetime < 1:
            raise DomainError("step mortality needs lifetime >= 1 turn")
        return cls(kind="step", lifetime=lifetime)

    @classmethod
    def exponential(cls, decay: float) -> "MortalityModel":
        if decay < 0:
            raise DomainError("exponential mortality needs decay >= 0")
        return cls(kind="exponential", decay=decay)

    @classmethod
    def table(cls, weights) -> "MortalityModel":
        w = tuple(float(x) for x in weights)
        if not w:
            raise DomainError("mortality table must not be empty")
        if w[0] != 1.0:
            raise DomainError("mortality table must start at 1")
        if any(b > a for a, b in zip(w, w[1:])):
            raise DomainError("mortality table must be non-increasing")
        if any(x < 0 for x in w):
            raise DomainError("mortality weights must be >= 0")
        return cls(kind="table", weights=w)

    def weight(self, t: int) -> float:
        return mortality_weight(self, t)


def mortality_weight(model: MortalityModel, t: int) -> float:
    """Surviving fraction after ``t`` turns; 1 at t=0, non-increasing."""
    if t < 0:
        raise DomainError("turn offset must be >= 0")
    if model.kind == "step":
        return 1.0 if t < model.lifetime else 0.0
    if model.kind == "exponential":
        return math.exp(-model.decay * t)
    if model.kind == "table":
        return model.weights[min(t, len(model.weights) - 1)]
    raise DomainError(f"unknown mortality kind {model.kind!r}")


@dataclass(frozen=True)
class HashRateCurve:
    """Deterministic global hash-rate forecast, hashes/second per turn.

    Either an exponential curve base·exp(growth·t) or a per-turn table.
    Table lookups past the last entry return the last value; no
    extrapolation is attempted.
    """

    kind: str
    base: float = 0.0
    growth: float = 0.0
    values: tuple[float, ...] = ()

    @classmethod
    def exponential(cls, base: float, growth: float) -> "HashRateCurve":
        if base <= 0:
            raise DomainError("hash-rate base must be > 0")
        return cls(kind="exponential", base=base, growth=growth)

    @classmethod
    def table(cls, values) -> "HashRateCurve":
        v = tuple(float(x) for x in values)
        if not v or any(x <= 0 for x in v):
            raise DomainError("hash-rate table must be non-empty and positive")
        return cls(kind="table", values=v)

    def at(self, t: int) -> float:
        if t < 0:
            raise DomainError("turn must be >= 0")
        if self.kind == "exponential":
            return self.base * math.exp(self.growth * t)
        return self.values[min(t, len(self.values) - 1)]


@dataclass(frozen=True)
class BlockRewardSchedule:
    """Piecewise-constant coins-per-turn schedule, with optional halvings."""

    kind: str
    amount: float = 0.0
    epoch: int = 0
    breakpoints: tuple[tuple[int, float], ...] = ()

    @classmethod
    def constant(cls, coins: float) -> "BlockRewardSchedule":
        if coins < 0:
            raise DomainError("block reward must be >= 0")
        return cls(kind="constant", amount=coins)

    @classmethod
    def halving(cls, initial: float, epoch: int) -> "BlockRewardSchedule":
        if initial < 0:
            raise DomainError("block reward must be >= 0")
        if epoch < 1:
            raise DomainError("halving epoch must be >= 1 turn")
        return cls(kind="halving", amount=initial, epoch=epoch)

    @classmethod
    def schedule(cls, breakpoints) -> "BlockRewardSchedule":
        pts = tuple((int(t), float(b)) for t, b in breakpoints)
        if not pts or pts[0][0] != 0:
            raise DomainError("reward schedule must start at turn 0")
        if any(b[0] <= a[0] for a, b in zip(pts, pts[1:])):
            raise DomainError("reward schedule turns must strictly increase")
        if any(b < 0 for _, b in pts):
            raise DomainError("block reward must be >= 0")
        return cls(kind="schedule", breakpoints=pts)

    def at(self, t: int) -> float:
        if t < 0:
            raise DomainError("turn must be >= 0")
        if self.kind == "constant":
            return self.amount
        if self.kind == "halving":
            return self.amount / 2 ** (t // self.epoch)
        value = self.breakpoints[0][1]
        for start, coins in self.breakpoints:
            if t >= start:
                value = coins
            else:
                break
        return value


@dataclass(frozen=True)
class PriceCurve:
    """Constant-or-table curve for electricity price, USD per watt-hour."""

    kind: str
    amount: float = 0.0
    values: tuple[float, ...] = ()

    @classmethod
    def constant(cls, amount: float) -> "PriceCurve":
        if amount < 0:
            raise DomainError("price must be >= 0")
        return cls(kind="constant", amount=amount)

    @classmethod
    def table(cls, values) -> "PriceCurve":
        v = tuple(float(x) for x in values)
        if not v or any(x < 0 for x in v):
            raise DomainError("price table must be non-empty and >= 0")
        return cls(kind="table", values=v)

    def at(self, t: int) -> float:
        if t < 0:
            raise DomainError("turn must be >= 0")
        if self.kind == "constant":
            return self.amount
        return self.values[min(t, len(self.values) - 1)]


@dataclass(frozen=True)
class MarketModel:
    """Deterministic market forecasts anchored at the valuation turn.

    ``spot_price`` is the exchange rate at turn 0; everything else is a
    per-turn forecast.  Fees are fractions in [0, 1).
    """

    spot_price: float
    global_hash_rate: HashRateCurve
    block_reward: BlockRewardSchedule
    electricity_price: PriceCurve
    pool_fee: float = 0.0
    coin_trade_fee: float = 0.0
    bond_trade_fee: float = 0.0

    def __post_init__(self):
        if self.spot_price <= 0:
            raise DomainError("spot price must be > 0")
        for name in ("pool_fee", "coin_trade_fee", "bond_trade_fee"):
            fee = getattr(self, name)
            if not 0 <= fee < 1:
                raise DomainError(f"{name} must lie in [0, 1)")


def hash_rate_at(market: MarketModel, t: int) -> float:
    return market.global_hash_rate.at(t)


def block_reward_at(market: MarketModel, t: int) -> float:
    return market.block_reward.at(t)


def effective_block_reward(market: MarketModel, t: int) -> float:
    """Pool-fee-adjusted reward: the pool skims its cut before payout."""
    return (1.0 - market.pool_fee) * market.block_reward.at(t)


def electricity_price_at(market: MarketModel, t: int) -> float:
    return market.electricity_price.at(t)


@dataclass(frozen=True)
class AsicSpec:
    """Physical hardware description.

    ``energy_per_turn`` is watt-hours consumed per unit hash-rate per
    turn, so one turn of operation costs
    ``hash_rate * energy_per_turn * electricity_price`` USD.
    ``lifetime_horizon`` bounds the number of future turns summed when
    valuing the whole device.
    """

    hash_rate: float
    energy_per_turn: float
    mortality: MortalityModel
    reception_turn: int = 0
    lifetime_horizon: int = 1

    def __post_init__(self):
        if self.hash_rate <= 0:
            raise DomainError("hash rate must be > 0")
        if self.energy_per_turn < 0:
            raise DomainError("energy per turn must be >= 0")
        if self.reception_turn < 0:
            raise DomainError("reception turn must be >= 0")
        if self.lifetime_horizon < 1:
            raise DomainError("lifetime horizon must be >= 1")


@dataclass(frozen=True)
class LatticeState:
    """One recombining node: ``up_moves`` of ``turn − root_turn`` steps went up."""

    turn: int
    up_moves: int
    price: float


def state_price(
    walk: RandomWalkParams, root_price: float, up_moves: int, down_moves: int
) -> float:
    """Price after the given up/down moves, evaluated in log space.

    exp(a·lnΔ + b·lnδ)·P stays within 1e-12 of direct repeated
    multiplication while avoiding drift for deep lattices.
    """
    if up_moves < 0 or down_moves < 0:
        raise DomainError("move counts must be >= 0")
    if up_moves == down_moves == 0:
        return root_price
    return root_price * math.exp(
        up_moves * math.log(walk.up_factor) + down_moves * math.log(walk.down_factor)
    )
