import datetime as dt

import pytest

from asicval.errors import DataError
from asicval.history import MarketHistory, Series


def make_series(day_offsets, values, start=dt.date(2020, 1, 1)):
    dates = tuple(start + dt.timedelta(days=d) for d in day_offsets)
    return Series(dates, tuple(values))


class TestSeries:
    def test_rejects_unsorted_dates(self):
        with pytest.raises(DataError):
            make_series([0, 2, 1], [1.0, 2.0, 3.0])

    def test_rejects_length_mismatch(self):
        with pytest.raises(DataError):
            make_series([0, 1], [1.0])

    def test_window_is_inclusive(self):
        series = make_series(range(10), range(1, 11))
        window = series.window(dt.date(2020, 1, 3), dt.date(2020, 1, 6))
        assert window.values == (3.0, 4.0, 5.0, 6.0)

    def test_rejects_non_positive_values(self):
        with pytest.raises(DataError):
            make_series([0, 1], [1.0, 0.0])

    def test_value_on_or_before(self):
        series = make_series([0, 2, 4], [1.0, 2.0, 3.0])
        assert series.value_on_or_before(dt.date(2020, 1, 4)) == 2.0
        with pytest.raises(DataError):
            series.value_on_or_before(dt.date(2019, 12, 31))


class TestMarketHistory:
    def test_aligned_intersects_dates(self):
        prices = make_series([0, 1, 2, 3], [10.0, 11.0, 12.0, 13.0])
        hashes = make_series([1, 2, 5], [1e18, 2e18, 3e18])
        aligned = MarketHistory(prices, hashes).aligned()
        assert aligned.prices.dates == aligned.hash_rates.dates
        assert aligned.prices.values == (11.0, 12.0)
        assert aligned.hash_rates.values == (1e18, 2e18)

    def test_aligned_window_bounds(self):
        prices = make_series(range(5), [10.0 + i for i in range(5)])
        hashes = make_series(range(5), [1e18] * 5)
        aligned = MarketHistory(prices, hashes).aligned(start=dt.date(2020, 1, 3))
        assert aligned.prices.dates[0] == dt.date(2020, 1, 3)

    def test_empty_intersection_rejected(self):
        prices = make_series([0, 1], [1.0, 2.0])
        hashes = make_series([5, 6], [1e18, 2e18])
        with pytest.raises(DataError):
            MarketHistory(prices, hashes).aligned()
