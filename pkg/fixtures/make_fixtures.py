#!/usr/bin/env python3
"""Regenerate the bundled synthetic market fixtures.

The fixtures are a seeded geometric random walk for the exchange rate
and a noisy exponential for the global hash-rate, long enough to hold a
calibration window before the backtest purchase date (2017-01-02).  The
generated CSVs are committed; rerunning this script must reproduce them
byte for byte.
"""

import csv
import datetime as dt
import math
from pathlib import Path

import numpy as np

HERE = Path(__file__).parent
SEED = 20160601
START = dt.date(2016, 6, 1)
DAYS = 500


def main() -> None:
    rng = np.random.default_rng(SEED)
    dates = [START + dt.timedelta(days=i) for i in range(DAYS)]

    sigma_daily = 0.55 / math.sqrt(365.0)
    drift_daily = 0.40 / 365.0
    log_steps = rng.normal(drift_daily, sigma_daily, DAYS - 1)
    prices = 900.0 * np.exp(np.concatenate([[0.0], np.cumsum(log_steps)]))

    growth_daily = math.log(2.0) / 365.0
    noise = rng.normal(0.0, 0.01, DAYS)
    hash_rates = 2.0e18 * np.exp(growth_daily * np.arange(DAYS) + noise)

    with open(HERE / "gbm_prices.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["date", "price_usd"])
        for day, price in zip(dates, prices):
            writer.writerow([day.isoformat(), f"{price:.12g}"])

    with open(HERE / "gbm_hashrate.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["date", "hashrate_hs"])
        for day, rate in zip(dates, hash_rates):
            writer.writerow([day.isoformat(), f"{rate:.12g}"])


if __name__ == "__main__":
    main()
