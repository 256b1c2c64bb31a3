"""Pydantic request/response models for the pricing service.

Requests carry the run configuration inline plus any market data the
client loaded; responses are flat report payloads that the CLI (or any
other client) can render to CSV/JSON without further computation.
"""

from __future__ import annotations

import datetime as dt
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..data_io import RunConfig
from ..history import Series


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SeriesPayload(_Model):
    dates: list[dt.date]
    values: list[float]

    def to_series(self) -> Series:
        return Series(tuple(self.dates), tuple(self.values))

    @classmethod
    def from_series(cls, series: Series) -> "SeriesPayload":
        return cls(dates=list(series.dates), values=list(series.values))


class BaseRequest(_Model):
    config: RunConfig
    prices: Optional[SeriesPayload] = None
    hashrate: Optional[SeriesPayload] = None
    valuation_date: Optional[dt.date] = None
    spot: Optional[float] = Field(default=None, gt=0)
    reproducible: bool = False


class PriceRequest(BaseRequest):
    opportunity_turn: int = Field(ge=0)
    valuation_turn: int = Field(default=0, ge=0)


class AsicValueRequest(BaseRequest):
    method: Literal["closed_form", "induction"] = "closed_form"


class DelayRequest(BaseRequest):
    delay_turns: list[int]


class SensitivityRequest(BaseRequest):
    sigma_grid: list[float]


class ImitateRequest(BaseRequest):
    opportunity_turn: int = Field(ge=0)
    valuation_turn: int = Field(default=0, ge=0)


class BacktestRequest(BaseRequest):
    purchase_date: Optional[dt.date] = None
    steps_per_opportunity: Optional[int] = Field(default=None, ge=1)


class PriceResponse(_Model):
    kind: Literal["price"] = "price"
    opportunity_turn: int
    valuation_turn: int
    spot_usd: float
    value_induction_usd: float
    value_closed_form_usd: float
    abs_difference_usd: float
    methods_agree: bool
    provenance: dict


class BreakdownEntry(_Model):
    turn: int
    mortality_weight: float
    opportunity_value_usd: float


class AsicValueResponse(_Model):
    kind: Literal["asic_value"] = "asic_value"
    valuation_turn: int
    reception_turn: int
    spot_usd: float
    value_usd: float
    breakdown: list[BreakdownEntry]
    provenance: dict


class SweepPointModel(_Model):
    axis: float
    value_usd: float
    percent_change: float


class SweepResponse(_Model):
    kind: Literal["sweep"] = "sweep"
    axis_label: str
    baseline: SweepPointModel
    points: list[SweepPointModel]
    provenance: dict


class ImitateState(_Model):
    turn: int
    up_moves: int
    price_usd: float
    coins: float
    bonds_usd: float
    value_usd: float


class ImitateResponse(_Model):
    kind: Literal["imitate"] = "imitate"
    opportunity_turn: int
    valuation_turn: int
    spot_usd: float
    root_value_usd: float
    states: list[ImitateState]
    provenance: dict


class BacktestResponse(_Model):
    kind: Literal["backtest"] = "backtest"
    dates: list[dt.date]
    asic_revenue_usd: list[float]
    portfolio_revenue_usd: list[float]
    asic_initial_cost_usd: float
    portfolio_initial_cost_usd: float
    portfolio_fees_usd: float
    asic_final_usd: float
    portfolio_final_usd: float
    provenance: dict
