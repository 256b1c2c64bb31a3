"""Option-based valuation of proof-of-work mining hardware.

A mining rig is priced as a bundle of per-turn activation rights: each
future turn the owner may burn electricity to collect a fractional block
reward, which makes every turn a European call on the coin.  The package
prices those calls on a no-arbitrage binomial lattice, aggregates them
into whole-device values, constructs coin-plus-bond portfolios that
replicate the hardware's returns, and backtests both against historical
market data.
"""

from .errors import (
    AsicValError,
    CalibrationError,
    ConfigError,
    DataError,
    DegenerateLatticeError,
    DomainError,
    ShortSaleError,
    WalkValidationError,
)
from .model import (
    AsicSpec,
    BlockRewardSchedule,
    HashRateCurve,
    LatticeState,
    MarketModel,
    MortalityModel,
    PriceCurve,
    RandomWalkParams,
    mortality_weight,
    risk_neutral_up_weight,
    validate,
)
from .pricing import (
    OpportunityQuote,
    ValueLattice,
    closed_form_value,
    immediate_value,
    one_step_value,
    opportunity_value,
    path_oracle_value,
    short_amount,
    value_lattice,
)
from .calibration import (
    CalibrationContext,
    annualized_volatility,
    calibrated_walk,
    crr_factors,
    exp_growth_fit,
    rebalance_schedule,
    turn_grid,
)
from .history import MarketHistory, Series
from .valuation import (
    AsicQuote,
    SweepPoint,
    SweepResult,
    asic_value,
    delay_sweep,
    naive_branch_average,
    naive_expected_value,
    reception_delay_loss,
    volatility_sweep,
)
from .replication import (
    BacktestReport,
    ImitatingWeights,
    PortfolioState,
    RevenueLeg,
    TradeEntry,
    asic_realized_revenue,
    imitating_value,
    imitating_weights,
    rebalance,
    simulate_replication,
)

__version__ = "0.1.0"
