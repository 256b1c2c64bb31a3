"""Free-parameter estimation from market history.

Maps calendar conventions onto lattice turns and recovers the three
model inputs that are not quoted anywhere: annualized volatility, the
per-step up/down factors, and the exponential hash-rate growth rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import CalibrationError, DataError
from .history import Series
from .model import RandomWalkParams

DAYS_PER_YEAR = 365.0


@dataclass(frozen=True)
class CalibrationContext:
    """Calendar-to-lattice bridge.

    ``calendar_horizon`` years are covered by ``lattice_steps`` turns of
    ``turn_length`` years each; the per-turn gross bond return follows
    from the annual rate as (1+η)^turn_length.
    """

    annual_volatility: float
    calendar_horizon: float
    lattice_steps: int
    annual_interest: float
    turn_length: float

    def __post_init__(self):
        if self.annual_volatility < 0:
            raise CalibrationError("volatility must be >= 0")
        if self.calendar_horizon <= 0:
            raise CalibrationError("calendar horizon must be > 0")
        if self.lattice_steps < 1:
            raise CalibrationError("need at least one lattice step")
        if self.turn_length <= 0:
            raise CalibrationError("turn length must be > 0")

    @property
    def gross_rate(self) -> float:
        return (1.0 + self.annual_interest) ** self.turn_length

    def with_volatility(self, sigma: float) -> "CalibrationContext":
        return replace(self, annual_volatility=sigma)

    def walk(self, up_probability: float | None = None) -> RandomWalkParams:
        """Per-turn random walk implied by this context (strict-validated)."""
        up, down = crr_factors(
            self.annual_volatility, self.calendar_horizon, self.lattice_steps
        )
        return RandomWalkParams.checked(up, down, self.gross_rate, up_probability)


def annualized_volatility(prices: Series) -> float:
    """Sample standard deviation of log-returns, scaled to one year.

    The observation frequency is inferred from the mean date spacing;
    gaps in the calendar are treated as absent observations, not imputed.
    """
    if len(prices) < 3:
        raise DataError("volatility needs at least 3 observations")
    if any(p <= 0 for p in prices.values):
        raise DataError("volatility needs positive prices")
    values = np.asarray(prices.values)
    returns = np.diff(np.log(values))
    span_days = (prices.dates[-1] - prices.dates[0]).days
    mean_spacing = span_days / (len(prices) - 1)
    per_year = DAYS_PER_YEAR / mean_spacing
    return float(np.std(returns, ddof=1) * math.sqrt(per_year))


def crr_factors(sigma: float, years: float, steps: int) -> tuple[float, float]:
    """Up/down multipliers exp(±σ√(years/steps)); the product is exactly 1."""
    if sigma <= 0:
        raise CalibrationError(
            "volatility must be > 0: zero volatility collapses the lattice"
        )
    if years <= 0:
        raise CalibrationError("calendar horizon must be > 0")
    if steps < 1:
        raise CalibrationError("need at least one lattice step")
    up = math.exp(sigma * math.sqrt(years / steps))
    return up, 1.0 / up


def calibrated_walk(
    sigma: float,
    annual_interest: float,
    step_years: float,
    up_probability: float | None = None,
) -> RandomWalkParams:
    """Strict-valid per-step walk for a step spanning ``step_years``."""
    up, down = crr_factors(sigma, step_years, 1)
    gross = (1.0 + annual_interest) ** step_years
    return RandomWalkParams.checked(up, down, gross, up_probability)


def exp_growth_fit(turns, values) -> tuple[float, float]:
    """Least-squares exponential fit; returns (level at turn 0, per-turn rate).

    Exact on noiseless exponential inputs: the fit is a straight line
    through (turn, ln value).
    """
    turns = np.asarray(turns, dtype=float)
    values = np.asarray(values, dtype=float)
    if turns.shape != values.shape or turns.ndim != 1:
        raise DataError("turns and values must be 1-d and equally long")
    if len(turns) < 2:
        raise DataError("growth fit needs at least 2 observations")
    if np.any(values <= 0):
        raise DataError("growth fit needs positive values")
    growth, intercept = np.polyfit(turns, np.log(values), 1)
    return float(math.exp(intercept)), float(growth)


def turn_grid(
    window_years: float,
    turns_per_day: float = 1.0,
    annual_volatility: float = 0.0,
    annual_interest: float = 0.02,
    steps_per_opportunity: int = 25,
) -> tuple[CalibrationContext, tuple[int, ...]]:
    """Deterministic calendar-window to turn-index mapping.

    Returns the calibration context plus the equally spaced adjustment
    schedule for one opportunity spanning the whole window: the schedule
    holds ``steps_per_opportunity`` trade turns (the first is the initial
    purchase); expiry/liquidation happens at the final lattice step.
    """
    if window_years <= 0:
        raise DataError("calendar window must be > 0")
    if turns_per_day <= 0:
        raise DataError("turns per day must be > 0")
    steps = int(round(window_years * DAYS_PER_YEAR * turns_per_day))
    if steps < 1:
        raise DataError("window shorter than one turn")
    context = CalibrationContext(
        annual_volatility=annual_volatility,
        calendar_horizon=window_years,
        lattice_steps=steps,
        annual_interest=annual_interest,
        turn_length=1.0 / (DAYS_PER_YEAR * turns_per_day),
    )
    return context, rebalance_schedule(steps, steps_per_opportunity)


def rebalance_schedule(total_steps: int, adjustments: int) -> tuple[int, ...]:
    """Equally spaced trade turns over [0, total_steps), at most one per turn."""
    if total_steps < 1:
        raise DataError("schedule needs at least one step")
    if adjustments < 1:
        raise DataError("schedule needs at least one adjustment")
    adjustments = min(adjustments, total_steps)
    indices = sorted({int(round(i * total_steps / adjustments)) for i in range(adjustments)})
    return tuple(indices)
