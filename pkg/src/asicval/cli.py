"""Command-line front end.

The CLI is a thin client of the HTTP service: it loads local files,
marshals them into request models, posts to the service (in-process by
default, remotely with ``--server``), and renders the response payload
to CSV or JSON.  No pricing happens in this module.

Exit codes: 0 success, 2 validation/config failure, 3 data failure,
4 dual-method self-check failure.
"""

from __future__ import annotations

import argparse
import datetime as dt
import sys

from .data_io import load_config, load_hashrate_csv, load_price_csv, write_report
from .errors import AsicValError, ConfigError, DataError
from .service import schemas

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DATA = 3
EXIT_SELF_CHECK = 4


def _parse_grid(text: str) -> list[float]:
    """Accept `start:stop:step` or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid {text!r} must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ConfigError("grid step must be > 0")
        values = []
        x = start
        while x <= stop + 1e-12:
            values.append(round(x, 12))
            x += step
        return values
    return [float(p) for p in text.split(",") if p.strip()]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="run configuration JSON")
    parser.add_argument("--prices", help="historical price CSV (date,price_usd)")
    parser.add_argument("--hashrate", help="historical hash-rate CSV (date,hashrate_hs)")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="json")
    parser.add_argument("--date", help="valuation date (ISO-8601)")
    parser.add_argument("--spot", type=float, help="override spot price, USD")
    parser.add_argument(
        "--reproducible",
        action="store_true",
        help="omit the timestamp so identical inputs give identical bytes",
    )
    parser.add_argument("--server", help="remote service URL (default: in-process)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asicval",
        description="price proof-of-work mining hardware as a bundle of options",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("price", help="price one mining opportunity (dual-method)")
    _add_common(p)
    p.add_argument("--turn", type=int, required=True, help="opportunity turn")
    p.add_argument("--valuation-turn", type=int, default=0)

    p = sub.add_parser("value-asic", help="value the whole device")
    _add_common(p)
    p.add_argument("--method", choices=("closed_form", "induction"), default="closed_form")

    p = sub.add_parser("delay", help="value impact of delayed reception")
    _add_common(p)
    p.add_argument(
        "--delay-days", required=True, help="delays in days: start:stop:step or list"
    )

    p = sub.add_parser("sensitivity", help="device value across a volatility grid")
    _add_common(p)
    p.add_argument(
        "--sigma-grid", required=True, help="annual volatilities: start:stop:step or list"
    )

    p = sub.add_parser("imitate", help="replicating-portfolio weights per lattice state")
    _add_common(p)
    p.add_argument("--turn", type=int, required=True, help="opportunity turn")
    p.add_argument("--valuation-turn", type=int, default=0)

    p = sub.add_parser("backtest", help="ASIC vs replicating portfolio on history")
    _add_common(p)
    p.add_argument("--steps-per-opportunity", type=int)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _parse_date(text: str | None) -> dt.date | None:
    if text is None:
        return None
    try:
        return dt.date.fromisoformat(text)
    except ValueError as exc:
        raise ConfigError(f"bad --date {text!r}: {exc}") from exc


def _base_fields(args) -> dict:
    config = load_config(args.config)
    prices = (
        schemas.SeriesPayload.from_series(load_price_csv(args.prices))
        if args.prices
        else None
    )
    hashrate = (
        schemas.SeriesPayload.from_series(load_hashrate_csv(args.hashrate))
        if args.hashrate
        else None
    )
    return {
        "config": config,
        "prices": prices,
        "hashrate": hashrate,
        "spot": args.spot,
        "reproducible": args.reproducible,
    }


def _build_request(args) -> tuple[str, schemas.BaseRequest]:
    base = _base_fields(args)
    date = _parse_date(args.date)
    if args.command == "price":
        return "/price", schemas.PriceRequest(
            **base,
            valuation_date=date,
            opportunity_turn=args.turn,
            valuation_turn=args.valuation_turn,
        )
    if args.command == "value-asic":
        return "/value-asic", schemas.AsicValueRequest(
            **base, valuation_date=date, method=args.method
        )
    if args.command == "delay":
        turns_per_day = base["config"].calibration.turns_per_day
        delays = sorted(
            {int(round(d * turns_per_day)) for d in _parse_grid(args.delay_days)}
        )
        return "/delay", schemas.DelayRequest(
            **base, valuation_date=date, delay_turns=delays
        )
    if args.command == "sensitivity":
        return "/sensitivity", schemas.SensitivityRequest(
            **base, valuation_date=date, sigma_grid=_parse_grid(args.sigma_grid)
        )
    if args.command == "imitate":
        return "/imitate", schemas.ImitateRequest(
            **base,
            valuation_date=date,
            opportunity_turn=args.turn,
            valuation_turn=args.valuation_turn,
        )
    if args.command == "backtest":
        return "/backtest", schemas.BacktestRequest(
            **base,
            purchase_date=date,
            steps_per_opportunity=args.steps_per_opportunity,
        )
    raise ConfigError(f"unknown command {args.command!r}")


def _post(server: str | None, path: str, request: schemas.BaseRequest):
    body = request.model_dump(mode="json")
    if server:
        import httpx

        response = httpx.post(server.rstrip("/") + path, json=body, timeout=300.0)
        return response.status_code, response.json()
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import app

    with TestClient(app, raise_server_exceptions=True) as client:
        response = client.post(path, json=body)
        return response.status_code, response.json()


def _error_exit(status: int, payload: dict) -> int:
    if status == 422:
        print(f"request validation failed: {payload}", file=sys.stderr)
        return EXIT_VALIDATION
    error = payload.get("error", {}) if isinstance(payload, dict) else {}
    message = error.get("message", str(payload))
    kind = error.get("kind", "data")
    print(f"error ({kind}): {message}", file=sys.stderr)
    return EXIT_VALIDATION if kind == "validation" else EXIT_DATA


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        uvicorn.run("asicval.service.app:app", host=args.host, port=args.port)
        return EXIT_OK
    try:
        path, request = _build_request(args)
    except ConfigError as exc:
        print(f"error (validation): {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DataError as exc:
        print(f"error (data): {exc}", file=sys.stderr)
        return EXIT_DATA
    except AsicValError as exc:
        print(f"error (validation): {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    status, payload = _post(args.server, path, request)
    if status != 200:
        return _error_exit(status, payload)

    text = write_report(payload, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    if args.command == "price" and not payload.get("methods_agree", True):
        print(
            "self-check failed: induction and closed form disagree by "
            f"{payload['abs_difference_usd']}",
            file=sys.stderr,
        )
        return EXIT_SELF_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
