"""Dated market series used for calibration and backtesting."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

from .errors import DataError


@dataclass(frozen=True)
class Series:
    """Strictly-dated positive observations (exchange rate or hash-rate)."""

    dates: tuple[dt.date, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.dates) != len(self.values):
            raise DataError("dates and values must have equal length")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise DataError("dates must be strictly increasing")
        if any(v <= 0 for v in self.values):
            raise DataError("series values must be positive")

    def __len__(self) -> int:
        return len(self.dates)

    def window(self, start: dt.date | None, end: dt.date | None) -> "Series":
        pairs = [
            (d, v)
            for d, v in zip(self.dates, self.values)
            if (start is None or d >= start) and (end is None or d <= end)
        ]
        return Series(tuple(d for d, _ in pairs), tuple(v for _, v in pairs))

    def value_on_or_before(self, day: dt.date) -> float:
        value = None
        for d, v in zip(self.dates, self.values):
            if d <= day:
                value = v
            else:
                break
        if value is None:
            raise DataError(f"no observation on or before {day.isoformat()}")
        return value


@dataclass(frozen=True)
class MarketHistory:
    """Exchange-rate and global hash-rate histories, possibly on
    different calendars; ``aligned`` intersects them date-wise."""

    prices: Series
    hash_rates: Series

    def aligned(
        self, start: dt.date | None = None, end: dt.date | None = None
    ) -> "MarketHistory":
        p = self.prices.window(start, end)
        h = self.hash_rates.window(start, end)
        common = sorted(set(p.dates) & set(h.dates))
        if not common:
            raise DataError("price and hash-rate series share no dates in window")
        keep = set(common)
        return MarketHistory(
            Series(
                tuple(d for d in p.dates if d in keep),
                tuple(v for d, v in zip(p.dates, p.values) if d in keep),
            ),
            Series(
                tuple(d for d in h.dates if d in keep),
                tuple(v for d, v in zip(h.dates, h.values) if d in keep),
            ),
        )
