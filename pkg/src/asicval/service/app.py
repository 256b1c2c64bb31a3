"""HTTP face of the valuation engine.

Every endpoint takes the full run description in the request body, so
the service itself is stateless; identical requests produce identical
responses (set ``reproducible`` to drop the timestamp from provenance).
Engine errors map to HTTP 400 with a machine-readable ``error.kind`` of
``validation`` or ``data``.
"""

from __future__ import annotations

import datetime as dt
import hashlib

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..assemble import Resolved, resolve
from ..calibration import calibrated_walk
from ..errors import AsicValError, ConfigError, DataError
from ..history import MarketHistory
from ..model import state_price
from ..pricing import closed_form_value, opportunity_value, value_lattice
from ..replication import (
    BacktestReport,
    asic_realized_revenue,
    imitating_weights,
    simulate_replication,
)
from ..valuation import asic_value, delay_sweep, volatility_sweep
from . import schemas

SELF_CHECK_RELATIVE_TOLERANCE = 1e-6

app = FastAPI(title="asicval", version=__version__)


@app.exception_handler(AsicValError)
async def _engine_error(request: Request, exc: AsicValError):
    kind = "data" if isinstance(exc, DataError) else "validation"
    return JSONResponse(
        status_code=400, content={"error": {"kind": kind, "message": str(exc)}}
    )


def _resolved(req: schemas.BaseRequest) -> Resolved:
    prices = req.prices.to_series() if req.prices else None
    hashrates = req.hashrate.to_series() if req.hashrate else None
    return resolve(req.config, prices, hashrates, req.valuation_date, req.spot)


def _provenance(res: Resolved, reproducible: bool) -> dict:
    out = dict(res.provenance)
    if not reproducible:
        out["generated_at"] = dt.datetime.now(dt.timezone.utc).isoformat()
    return out


def _series_fingerprint(series) -> dict:
    # identifies the exact realized inputs without embedding them wholesale
    digest = hashlib.sha256()
    for day, value in zip(series.dates, series.values):
        digest.update(f"{day.isoformat()},{value!r};".encode())
    return {
        "first": series.dates[0].isoformat(),
        "last": series.dates[-1].isoformat(),
        "observations": len(series),
        "sha256": digest.hexdigest(),
    }


@app.get("/healthz")
def healthz():
    return {"status": "ok", "version": __version__}


@app.post("/price", response_model=schemas.PriceResponse)
def price(req: schemas.PriceRequest):
    res = _resolved(req)
    t, k = req.opportunity_turn, req.valuation_turn
    spot = res.market.spot_price
    induction = opportunity_value(t, k, spot, res.asic, res.market, res.walk).value
    closed = closed_form_value(t, k, spot, res.asic, res.market, res.walk)
    difference = abs(induction - closed)
    agree = difference <= SELF_CHECK_RELATIVE_TOLERANCE * max(1.0, abs(induction))
    return schemas.PriceResponse(
        opportunity_turn=t,
        valuation_turn=k,
        spot_usd=spot,
        value_induction_usd=induction,
        value_closed_form_usd=closed,
        abs_difference_usd=difference,
        methods_agree=agree,
        provenance=_provenance(res, req.reproducible),
    )


@app.post("/value-asic", response_model=schemas.AsicValueResponse)
def value_asic(req: schemas.AsicValueRequest):
    res = _resolved(req)
    quote = asic_value(
        res.asic.reception_turn,
        0,
        res.market.spot_price,
        res.asic,
        res.market,
        res.walk,
        method=req.method,
    )
    return schemas.AsicValueResponse(
        valuation_turn=quote.valuation_turn,
        reception_turn=quote.reception_turn,
        spot_usd=quote.spot,
        value_usd=quote.value,
        breakdown=[
            schemas.BreakdownEntry(
                turn=turn, mortality_weight=weight, opportunity_value_usd=value
            )
            for turn, weight, value in quote.breakdown
        ],
        provenance=_provenance(res, req.reproducible),
    )


def _sweep_response(sweep, provenance: dict) -> schemas.SweepResponse:
    return schemas.SweepResponse(
        axis_label=sweep.axis_label,
        baseline=schemas.SweepPointModel(
            axis=sweep.baseline.axis,
            value_usd=sweep.baseline.value,
            percent_change=sweep.baseline.percent_change,
        ),
        points=[
            schemas.SweepPointModel(
                axis=p.axis, value_usd=p.value, percent_change=p.percent_change
            )
            for p in sweep.points
        ],
        provenance=provenance,
    )


@app.post("/delay", response_model=schemas.SweepResponse)
def delay(req: schemas.DelayRequest):
    res = _resolved(req)
    sweep = delay_sweep(
        req.delay_turns,
        res.asic.reception_turn,
        0,
        res.market.spot_price,
        res.asic,
        res.market,
        res.walk,
    )
    return _sweep_response(sweep, _provenance(res, req.reproducible))


@app.post("/sensitivity", response_model=schemas.SweepResponse)
def sensitivity(req: schemas.SensitivityRequest):
    res = _resolved(req)
    sweep = volatility_sweep(req.sigma_grid, res.context, res.asic, res.market)
    return _sweep_response(sweep, _provenance(res, req.reproducible))


@app.post("/imitate", response_model=schemas.ImitateResponse)
def imitate(req: schemas.ImitateRequest):
    res = _resolved(req)
    t, k = req.opportunity_turn, req.valuation_turn
    spot = res.market.spot_price
    lattice = value_lattice(t, k, spot, res.asic, res.market, res.walk)
    states = []
    depth = t - k
    for level in range(depth + 1):
        for ups in range(level + 1):
            price_here = state_price(res.walk, spot, ups, level - ups)
            if level < depth:
                weights = imitating_weights(
                    price_here,
                    lattice.levels[level + 1][ups + 1],
                    lattice.levels[level + 1][ups],
                    res.walk,
                )
                coins, bonds = weights.coins, weights.bonds
            else:
                coins, bonds = 0.0, 0.0  # sold at expiry, nothing is held
            states.append(
                schemas.ImitateState(
                    turn=k + level,
                    up_moves=ups,
                    price_usd=price_here,
                    coins=coins,
                    bonds_usd=bonds,
                    value_usd=lattice.levels[level][ups],
                )
            )
    return schemas.ImitateResponse(
        opportunity_turn=t,
        valuation_turn=k,
        spot_usd=spot,
        root_value_usd=lattice.root_value,
        states=states,
        provenance=_provenance(res, req.reproducible),
    )


@app.post("/backtest", response_model=schemas.BacktestResponse)
def backtest(req: schemas.BacktestRequest):
    if req.prices is None or req.hashrate is None:
        raise DataError("backtest requires both price and hash-rate histories")
    full = MarketHistory(req.prices.to_series(), req.hashrate.to_series()).aligned()
    purchase = req.purchase_date or full.prices.dates[0]
    if purchase not in full.prices.dates:
        raise DataError(f"purchase date {purchase.isoformat()} has no aligned observation")
    window = full.aligned(start=purchase)

    res = resolve(
        req.config,
        req.prices.to_series(),
        req.hashrate.to_series(),
        valuation_date=purchase,
        spot=req.spot,
    )
    steps = req.steps_per_opportunity or req.config.calibration.steps_per_opportunity
    if req.config.calibration.walk is not None or res.annual_volatility is None:
        policy = res.walk
    else:
        sigma = res.annual_volatility
        interest = req.config.market.annual_interest

        def policy(step_years: float):
            return calibrated_walk(sigma, interest, step_years)

    portfolio_leg = simulate_replication(
        window,
        res.asic,
        res.market,
        policy,
        steps_per_opportunity=steps,
        turn_length=res.context.turn_length,
    )
    if req.config.asic.listed_price_usd is not None:
        asic_cost = req.config.asic.listed_price_usd
    else:
        asic_cost = asic_value(
            res.asic.reception_turn,
            0,
            res.market.spot_price,
            res.asic,
            res.market,
            res.walk,
        ).value
    asic_leg = asic_realized_revenue(window, res.asic, res.market, asic_cost)
    report = BacktestReport.combine(asic_leg, portfolio_leg)
    provenance = _provenance(res, req.reproducible)
    provenance["inputs"] = {
        "purchase_date": purchase.isoformat(),
        "steps_per_opportunity": steps,
        "prices": _series_fingerprint(window.prices),
        "hashrate": _series_fingerprint(window.hash_rates),
    }
    return schemas.BacktestResponse(
        dates=list(report.dates),
        asic_revenue_usd=list(report.asic_revenue),
        portfolio_revenue_usd=list(report.portfolio_revenue),
        asic_initial_cost_usd=report.asic_initial_cost,
        portfolio_initial_cost_usd=report.portfolio_initial_cost,
        portfolio_fees_usd=report.portfolio_fees,
        asic_final_usd=report.asic_revenue[-1],
        portfolio_final_usd=report.portfolio_revenue[-1],
        provenance=provenance,
    )
