"""Single-opportunity pricing on the recombining binomial lattice.

Three interchangeable routes price the opportunity expiring at turn ``t``
as seen from an earlier turn ``k``:

* ``opportunity_value``  — backward induction over the lattice,
* ``closed_form_value``  — direct binomial sum with log-space coefficients,
* ``path_oracle_value``  — brute-force enumeration of every up/down path,
  weighted by the risk-neutral up weight (only viable for shallow trees).

All three agree to floating-point tolerance; the oracle exists so tests
never have to trust the other two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DegenerateLatticeError, DomainError
from .model import (
    AsicSpec,
    MarketModel,
    RandomWalkParams,
    effective_block_reward,
    ensure_valid,
    hash_rate_at,
    electricity_price_at,
    risk_neutral_up_weight,
)

PATH_ORACLE_MAX_DEPTH = 25


@dataclass(frozen=True)
class OpportunityQuote:
    """Value of the opportunity expiring at ``opportunity_turn`` as seen
    from ``valuation_turn`` with the coin at ``spot``."""

    opportunity_turn: int
    valuation_turn: int
    spot: float
    value: float
    method: str


@dataclass(frozen=True)
class ValueLattice:
    """Opportunity values at every recombining node.

    ``levels[m][j]`` is the value at turn ``valuation_turn + m`` after
    ``j`` up moves; level ``m`` holds exactly ``m + 1`` entries.
    """

    opportunity_turn: int
    valuation_turn: int
    root_price: float
    levels: tuple[tuple[float, ...], ...]

    @property
    def root_value(self) -> float:
        return self.levels[0][0]

    def value_at(self, turn: int, up_moves: int) -> float:
        level = turn - self.valuation_turn
        return self.levels[level][up_moves]


def reward_terms(t: int, asic: AsicSpec, market: MarketModel) -> tuple[float, float]:
    """Per-opportunity payoff line: (reward coefficient, strike).

    The opportunity at turn ``t`` pays ``coefficient * price - strike``
    when activated: the coefficient is the miner's reward fraction times
    the pool-fee-adjusted block reward, the strike its electricity bill.
    Both are frozen at the opportunity's own turn; the exchange rate is
    the only quantity that moves on the lattice.
    """
    if t < 0:
        raise DomainError("turn must be >= 0")
    h = asic.hash_rate
    coefficient = h / (hash_rate_at(market, t) + h) * effective_block_reward(market, t)
    strike = h * asic.energy_per_turn * electricity_price_at(market, t)
    return coefficient, strike


def immediate_value(t: int, price: float, asic: AsicSpec, market: MarketModel) -> float:
    """Exercise-now value: max(reward − electricity cost, 0), never negative."""
    if price <= 0:
        raise DomainError("price must be > 0")
    coefficient, strike = reward_terms(t, asic, market)
    return max(coefficient * price - strike, 0.0)


def short_amount(
    price: float,
    value_up: float,
    value_down: float,
    walk: RandomWalkParams,
) -> float:
    """Coins to short against one opportunity so next turn's value is state-free.

    Independent of any move probability; equals the imitating portfolio's
    (long) coin leg.
    """
    if price <= 0:
        raise DomainError("price must be > 0")
    spread = walk.up_factor - walk.down_factor
    if spread == 0:
        raise DegenerateLatticeError("up and down factors are equal")
    return (value_up - value_down) / (price * spread)


def one_step_value(
    value_up: float, value_down: float, walk: RandomWalkParams
) -> float:
    """Arbitrage-free value one turn before a known up/down pair.

    Algebraically equal to the discounted risk-neutral expectation
    (q*·up + (1−q*)·down)/r with q* = (r−δ)/(Δ−δ).
    """
    ensure_valid(walk)
    up, down, r = walk.up_factor, walk.down_factor, walk.gross_rate
    spread = up - down
    if spread == 0:
        raise DegenerateLatticeError("up and down factors are equal")
    return value_up / r + (value_up - value_down) / spread * (1.0 - up / r)


def _check_quote_args(
    t: int, k: int, price: float, walk: RandomWalkParams
) -> None:
    if k > t:
        raise DomainError("valuation turn must not exceed the opportunity turn")
    if k < 0:
        raise DomainError("valuation turn must be >= 0")
    if price <= 0:
        raise DomainError("price must be > 0")
    ensure_valid(walk)


def _leaf_values(
    n: int, price: float, coefficient: float, strike: float, walk: RandomWalkParams
) -> np.ndarray:
    ups = np.arange(n + 1)
    log_up = math.log(walk.up_factor)
    log_down = math.log(walk.down_factor)
    prices = price * np.exp(ups * log_up + (n - ups) * log_down)
    return np.maximum(coefficient * prices - strike, 0.0)


def _induct(values: np.ndarray, walk: RandomWalkParams) -> np.ndarray:
    """One backward step: level m+1 values (by up-move count) to level m."""
    up, down, r = walk.up_factor, walk.down_factor, walk.gross_rate
    spread = up - down
    v_up = values[1:]
    v_down = values[:-1]
    return v_up / r + (v_up - v_down) / spread * (1.0 - up / r)


def opportunity_value(
    t: int,
    k: int,
    price: float,
    asic: AsicSpec,
    market: MarketModel,
    walk: RandomWalkParams,
) -> OpportunityQuote:
    """Backward-induction price of the turn-``t`` opportunity seen from ``k``.

    Leaves are exercise values over the terminal lattice prices; interior
    nodes come from ``one_step_value`` applied level by level.  Runs in
    O((t−k)²) time and O(t−k) memory.
    """
    _check_quote_args(t, k, price, walk)
    n = t - k
    coefficient, strike = reward_terms(t, asic, market)
    values = _leaf_values(n, price, coefficient, strike, walk)
    for _ in range(n):
        values = _induct(values, walk)
    return OpportunityQuote(t, k, price, float(values[0]), "induction")


def value_lattice(
    t: int,
    k: int,
    price: float,
    asic: AsicSpec,
    market: MarketModel,
    walk: RandomWalkParams,
) -> ValueLattice:
    """Full per-level value table for the turn-``t`` opportunity."""
    _check_quote_args(t, k, price, walk)
    n = t - k
    coefficient, strike = reward_terms(t, asic, market)
    values = _leaf_values(n, price, coefficient, strike, walk)
    levels = [tuple(float(v) for v in values)]
    for _ in range(n):
        values = _induct(values, walk)
        levels.append(tuple(float(v) for v in values))
    levels.reverse()
    return ValueLattice(t, k, price, tuple(levels))


def closed_form_value(
    t: int,
    k: int,
    price: float,
    asic: AsicSpec,
    market: MarketModel,
    walk: RandomWalkParams,
) -> float:
    """Direct binomial-sum price of the turn-``t`` opportunity seen from ``k``.

    Sums C(n,τ)·κ↑^τ·(−κ↓)^(n−τ) times the terminal exercise value over
    the in-the-money tail τ ≥ τ₀, where κ↓ = (1−Δ/r)/(Δ−δ) and
    κ↑ = κ↓ + 1/r.  Every coefficient is assembled in log space: the
    martingale identity κ↑·Δ + (−κ↓)·δ = 1 bounds each summand by 1, so
    arbitrarily deep lattices neither overflow nor drop binomial terms.
    −κ↓ < 0 (possible only in example-compat mode with r > Δ) falls back
    to explicit sign tracking.
    """
    _check_quote_args(t, k, price, walk)
    n = t - k
    coefficient, strike = reward_terms(t, asic, market)
    if n == 0:
        return max(coefficient * price - strike, 0.0)
    if coefficient <= 0.0:
        return 0.0

    up, down, r = walk.up_factor, walk.down_factor, walk.gross_rate
    spread = up - down
    if spread == 0:
        raise DegenerateLatticeError("up and down factors are equal")
    kappa_down = (1.0 - up / r) / spread
    kappa_up = kappa_down + 1.0 / r
    neg_kappa_down = -kappa_down

    log_up = math.log(up)
    log_down = math.log(down)
    tau0 = 0
    if strike > 0.0:
        # smallest up-move count whose terminal state is in the money
        log_ratio = math.log(strike) - (
            math.log(coefficient) + math.log(price) + n * log_down
        )
        tau0 = math.ceil(log_ratio / (log_up - log_down))
        if tau0 > n:
            return 0.0
        tau0 = max(tau0, 0)

    taus = np.arange(tau0, n + 1)
    log_binom = gammaln(n + 1) - gammaln(taus + 1) - gammaln(n - taus + 1)
    log_a = math.log(kappa_up)

    if neg_kappa_down < 0.0:
        # sign-alternating series; depths here are shallow in practice
        leaf_prices = price * np.exp(taus * log_up + (n - taus) * log_down)
        leaves = np.maximum(coefficient * leaf_prices - strike, 0.0)
        signs = np.where((n - taus) % 2 == 0, 1.0, -1.0)
        log_terms = (
            log_binom + taus * log_a + (n - taus) * math.log(-neg_kappa_down)
        )
        return max(float(np.sum(signs * np.exp(log_terms) * leaves)), 0.0)
    if neg_kappa_down == 0.0:
        # r == Δ: every down move kills the coefficient, only τ = n survives
        terminal = price * math.exp(n * log_up)
        return math.exp(n * log_a) * max(coefficient * terminal - strike, 0.0)

    log_b = math.log(neg_kappa_down)
    # split the in-the-money payoff: Σ w·(c·P_τ − K) = c·P·Σ w·(Δ^τ δ^{n−τ}) − K·Σ w
    reward_sum = np.sum(
        np.exp(log_binom + taus * (log_a + log_up) + (n - taus) * (log_b + log_down))
    )
    strike_sum = np.sum(np.exp(log_binom + taus * log_a + (n - taus) * log_b))
    return max(
        float(coefficient * price * reward_sum - strike * strike_sum), 0.0
    )


def path_oracle_value(
    t: int,
    k: int,
    price: float,
    asic: AsicSpec,
    market: MarketModel,
    walk: RandomWalkParams,
) -> float:
    """Brute-force check value: enumerate all 2^(t−k) paths explicitly.

    Each path is weighted by q*^ups·(1−q*)^downs and its terminal
    exercise value discounted by r^(t−k).  Refuses depths beyond
    ``PATH_ORACLE_MAX_DEPTH``; use the lattice for anything real.
    """
    _check_quote_args(t, k, price, walk)
    n = t - k
    if n > PATH_ORACLE_MAX_DEPTH:
        raise DomainError(
            f"path enumeration is capped at depth {PATH_ORACLE_MAX_DEPTH}"
        )
    q = risk_neutral_up_weight(walk)
    up, down = walk.up_factor, walk.down_factor
    total = 0.0
    for mask in range(1 << n):
        ups = mask.bit_count()
        downs = n - ups
        terminal = price * up**ups * down**downs
        total += q**ups * (1.0 - q) ** downs * immediate_value(
            t, terminal, asic, market
        )
    return total / walk.gross_rate**n


__all__ = [
    "OpportunityQuote",
    "ValueLattice",
    "PATH_ORACLE_MAX_DEPTH",
    "reward_terms",
    "immediate_value",
    "short_amount",
    "one_step_value",
    "opportunity_value",
    "value_lattice",
    "closed_form_value",
    "path_oracle_value",
]
