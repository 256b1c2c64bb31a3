"""File ingestion and report serialization.

CSV inputs are strict: exact headers, ISO-8601 dates, strictly
increasing calendars, positive quantities; any bad row fails loudly with
its line number.  Run configuration is a single JSON document validated
against a closed schema (unknown keys are rejected — typos in financial
configs must not pass silently).

All numeric output is written with 12 significant digits, so writing and
re-loading a report reproduces its values exactly at that precision.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigError, DataError
from .history import MarketHistory, Series


def _parse_series_csv(path, value_column: str, quantity: str) -> Series:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"{path}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise DataError(f"{path}: empty file")
    if rows[0] != ["date", value_column]:
        raise DataError(
            f"{path}:1: expected header 'date,{value_column}', got {','.join(rows[0])!r}"
        )
    dates: list[dt.date] = []
    values: list[float] = []
    for line, row in enumerate(rows[1:], start=2):
        if not row:
            raise DataError(f"{path}:{line}: blank line")
        if len(row) != 2:
            raise DataError(f"{path}:{line}: expected 2 columns, got {len(row)}")
        try:
            day = dt.date.fromisoformat(row[0].strip())
        except ValueError as exc:
            raise DataError(f"{path}:{line}: column 'date': {exc}") from exc
        try:
            value = float(row[1])
        except ValueError as exc:
            raise DataError(
                f"{path}:{line}: column {value_column!r}: {exc}"
            ) from exc
        if dates and day == dates[-1]:
            raise DataError(f"{path}:{line}: duplicate date {day.isoformat()}")
        if dates and day < dates[-1]:
            raise DataError(
                f"{path}:{line}: dates out of order ({day.isoformat()} after "
                f"{dates[-1].isoformat()})"
            )
        if value <= 0:
            raise DataError(f"{path}:{line}: non-positive {quantity} {value!r}")
        dates.append(day)
        values.append(value)
    if not dates:
        raise DataError(f"{path}: no data rows")
    return Series(tuple(dates), tuple(values))


def load_price_csv(path) -> Series:
    """Read a `date,price_usd` series (USD per coin)."""
    return _parse_series_csv(path, "price_usd", "price")


def load_hashrate_csv(path) -> Series:
    """Read a `date,hashrate_hs` series (hashes per second)."""
    return _parse_series_csv(path, "hashrate_hs", "hash-rate")


def load_history(price_path, hashrate_path) -> MarketHistory:
    return MarketHistory(load_price_csv(price_path), load_hashrate_csv(hashrate_path))


# --------------------------------------------------------------------------
# run configuration
# --------------------------------------------------------------------------


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MortalityBlock(_StrictModel):
    kind: Literal["step", "exponential", "table"]
    lifetime_turns: Optional[int] = Field(default=None, ge=1)
    decay_per_turn: Optional[float] = Field(default=None, ge=0)
    weights: Optional[list[float]] = None

    @model_validator(mode="after")
    def _check_fields(self):
        wanted = {
            "step": "lifetime_turns",
            "exponential": "decay_per_turn",
            "table": "weights",
        }[self.kind]
        if getattr(self, wanted) is None:
            raise ValueError(f"mortality kind {self.kind!r} requires {wanted!r}")
        return self


class AsicBlock(_StrictModel):
    hash_rate_hs: float = Field(gt=0)
    power_watts: Optional[float] = Field(default=None, ge=0)
    energy_wh_per_unit_hash_per_turn: Optional[float] = Field(default=None, ge=0)
    lifetime_years: float = Field(default=2.0, gt=0)
    mortality: Optional[MortalityBlock] = None
    reception_delay_turns: int = Field(default=0, ge=0)
    listed_price_usd: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _one_energy_spec(self):
        if (self.power_watts is None) == (
            self.energy_wh_per_unit_hash_per_turn is None
        ):
            raise ValueError(
                "exactly one of power_watts / energy_wh_per_unit_hash_per_turn"
            )
        return self


class ElectricityBlock(_StrictModel):
    """Electricity price with the unit spelled out explicitly.

    Quotes in the wild mix per-kWh and per-Wh conventions, and the
    difference is a factor of 1000; both keys exist so the config always
    says which one it means.
    """

    usd_per_kwh: Optional[float] = Field(default=None, ge=0)
    usd_per_wh: Optional[float] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _one_unit(self):
        if (self.usd_per_kwh is None) == (self.usd_per_wh is None):
            raise ValueError("exactly one of usd_per_kwh / usd_per_wh")
        return self

    @property
    def per_watt_hour(self) -> float:
        if self.usd_per_wh is not None:
            return self.usd_per_wh
        return self.usd_per_kwh / 1000.0


class BlockRewardBlock(_StrictModel):
    constant_coins: Optional[float] = Field(default=None, ge=0)
    initial_coins: Optional[float] = Field(default=None, ge=0)
    halving_epoch_turns: Optional[int] = Field(default=None, ge=1)
    schedule: Optional[list[tuple[int, float]]] = None

    @model_validator(mode="after")
    def _one_form(self):
        forms = [
            self.constant_coins is not None,
            self.initial_coins is not None or self.halving_epoch_turns is not None,
            self.schedule is not None,
        ]
        if sum(forms) != 1:
            raise ValueError(
                "exactly one of constant_coins / halving (initial_coins + "
                "halving_epoch_turns) / schedule"
            )
        if forms[1] and (self.initial_coins is None or self.halving_epoch_turns is None):
            raise ValueError("halving needs both initial_coins and halving_epoch_turns")
        return self


class HashRateForecastBlock(_StrictModel):
    h0_hs: Optional[float] = Field(default=None, gt=0)
    growth_per_turn: Optional[float] = None
    table_hs: Optional[list[float]] = None

    @model_validator(mode="after")
    def _one_form(self):
        exponential = self.h0_hs is not None or self.growth_per_turn is not None
        if exponential == (self.table_hs is not None):
            raise ValueError("exactly one of exponential (h0_hs + growth_per_turn) / table_hs")
        if exponential and (self.h0_hs is None or self.growth_per_turn is None):
            raise ValueError("exponential forecast needs h0_hs and growth_per_turn")
        return self


class WalkBlock(_StrictModel):
    up_factor: float = Field(gt=0)
    down_factor: float = Field(gt=0)
    gross_rate: float = Field(gt=0)
    up_probability: Optional[float] = Field(default=None, ge=0, le=1)
    mode: Literal["strict", "example_compat"] = "strict"


class MarketBlock(_StrictModel):
    spot_price_usd: Optional[float] = Field(default=None, gt=0)
    pool_fee: float = Field(default=0.02, ge=0, lt=1)
    coin_trade_fee: float = Field(default=0.01, ge=0, lt=1)
    bond_trade_fee: float = Field(default=0.01, ge=0, lt=1)
    annual_interest: float = Field(default=0.02, ge=0)
    electricity: ElectricityBlock = Field(
        default_factory=lambda: ElectricityBlock(usd_per_kwh=0.035)
    )
    block_reward: BlockRewardBlock = Field(
        default_factory=lambda: BlockRewardBlock(constant_coins=12.5)
    )
    global_hashrate: Optional[HashRateForecastBlock] = None


class CalibrationBlock(_StrictModel):
    turns_per_day: float = Field(default=1.0, gt=0)
    annual_volatility: Optional[float] = Field(default=None, gt=0)
    volatility_window_start: dt.date = dt.date(2013, 1, 1)
    hashrate_fit_window_years: float = Field(default=2.0, gt=0)
    steps_per_opportunity: int = Field(default=25, ge=1)
    walk: Optional[WalkBlock] = None


class RunConfig(_StrictModel):
    """Complete run description; defaults follow common desk conventions
    (2%/yr interest, 2% pool fee, 1% trading fees, 2-year hardware life,
    $0.035/kWh electricity, 25 adjustments per opportunity)."""

    asic: AsicBlock
    market: MarketBlock = Field(default_factory=MarketBlock)
    calibration: CalibrationBlock = Field(default_factory=CalibrationBlock)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return parse_config(raw, source=str(path))


def parse_config(raw: dict, source: str = "<config>") -> RunConfig:
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in exc.errors()
        )
        raise ConfigError(f"{source}: {problems}") from exc


# --------------------------------------------------------------------------
# report output
# --------------------------------------------------------------------------

SIGNIFICANT_DIGITS = 12


def format_number(x: float) -> str:
    return f"{x:.{SIGNIFICANT_DIGITS}g}"


def round_floats(value):
    """Round every float in a payload to the output precision."""
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return float(format_number(value))
    if isinstance(value, dict):
        return {k: round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(v) for v in value]
    return value


def payload_json(payload: dict) -> str:
    return json.dumps(round_floats(payload), indent=2) + "\n"


def _csv_text(header: list[str], rows) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return out.getvalue()


def payload_csv(payload: dict) -> str:
    kind = payload.get("kind")
    if kind == "price":
        header = [
            "opportunity_turn",
            "valuation_turn",
            "spot_usd",
            "value_induction_usd",
            "value_closed_form_usd",
            "abs_difference_usd",
        ]
        row = [
            payload["opportunity_turn"],
            payload["valuation_turn"],
            format_number(payload["spot_usd"]),
            format_number(payload["value_induction_usd"]),
            format_number(payload["value_closed_form_usd"]),
            format_number(payload["abs_difference_usd"]),
        ]
        return _csv_text(header, [row])
    if kind == "asic_value":
        rows = [
            (
                entry["turn"],
                format_number(entry["mortality_weight"]),
                format_number(entry["opportunity_value_usd"]),
            )
            for entry in payload["breakdown"]
        ]
        return _csv_text(["turn", "mortality_weight", "opportunity_value_usd"], rows)
    if kind == "sweep":
        rows = [
            (
                format_number(point["axis"]),
                format_number(point["value_usd"]),
                format_number(point["percent_change"]),
            )
            for point in payload["points"]
        ]
        return _csv_text(["axis", "value_usd", "percent_change"], rows)
    if kind == "imitate":
        rows = [
            (
                state["turn"],
                state["up_moves"],
                format_number(state["price_usd"]),
                format_number(state["coins"]),
                format_number(state["bonds_usd"]),
                format_number(state["value_usd"]),
            )
            for state in payload["states"]
        ]
        return _csv_text(
            ["turn", "up_moves", "price_usd", "coins", "bonds_usd", "value_usd"], rows
        )
    if kind == "backtest":
        rows = [
            (date, format_number(a), format_number(p))
            for date, a, p in zip(
                payload["dates"],
                payload["asic_revenue_usd"],
                payload["portfolio_revenue_usd"],
            )
        ]
        return _csv_text(["date", "asic_revenue_usd", "portfolio_revenue_usd"], rows)
    raise DataError(f"no CSV layout for report kind {kind!r}")


def write_report(payload: dict, fmt: str, path=None) -> str:
    """Render a report payload as `csv` or `json`; write it when a path
    is given, and return the text either way."""
    if fmt == "json":
        text = payload_json(payload)
    elif fmt == "csv":
        text = payload_csv(payload)
    else:
        raise DataError(f"unknown output format {fmt!r}")
    if path is not None:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise DataError(f"{path}: {exc}") from exc
    return text
