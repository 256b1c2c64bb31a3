import math

import pytest
from hypothesis import given, strategies as st

from asicval.errors import DomainError, WalkValidationError
from asicval.model import (
    EXAMPLE_COMPAT,
    BlockRewardSchedule,
    HashRateCurve,
    MarketModel,
    MortalityModel,
    PriceCurve,
    RandomWalkParams,
    mortality_weight,
    risk_neutral_up_weight,
    state_price,
    validate,
)

from conftest import random_strict_walk


strict_walks = st.builds(
    lambda down, up, frac: RandomWalkParams(up, down, 1.0 + frac * (up - 1.0)),
    down=st.floats(0.05, 0.99, exclude_max=True),
    up=st.floats(1.01, 10.0),
    frac=st.floats(0.01, 0.99),
)


class TestValidate:
    def test_textbook_parameters_pass(self):
        assert validate(RandomWalkParams(2.0, 0.5, 1.02)) == []

    def test_unit_gross_rate_fails_strict(self):
        report = validate(RandomWalkParams(2.0, 0.5, 1.0))
        assert report == ["r > 1 fails"]

    def test_down_factor_above_one_fails(self):
        report = validate(RandomWalkParams(1.5, 1.1, 1.02))
        assert "δ < 1 fails" in report

    def test_unit_gross_rate_passes_example_compat(self):
        walk = RandomWalkParams(2.0, 0.5, 1.0, mode=EXAMPLE_COMPAT)
        assert validate(walk) == []

    def test_mode_argument_overrides_stored_mode(self):
        walk = RandomWalkParams(2.0, 0.5, 1.0)
        assert validate(walk, mode=EXAMPLE_COMPAT) == []

    def test_bad_probability_reported(self):
        report = validate(RandomWalkParams(2.0, 0.5, 1.02, up_probability=1.5))
        assert "0 ≤ q ≤ 1 fails" in report

    def test_checked_raises_on_violation(self):
        with pytest.raises(WalkValidationError):
            RandomWalkParams.checked(2.0, 0.5, 1.0)

    def test_checked_relaxed_mode_is_explicit(self):
        walk = RandomWalkParams.checked(2.0, 0.5, 1.0, mode=EXAMPLE_COMPAT)
        assert walk.gross_rate == 1.0

    @given(strict_walks)
    def test_risk_neutral_weight_interior(self, walk):
        assert validate(walk) == []
        q = risk_neutral_up_weight(walk)
        assert 0.0 < q < 1.0


class TestMortality:
    def test_step_starts_at_one(self):
        assert mortality_weight(MortalityModel.step(730), 0) == 1.0

    def test_step_ends_after_lifetime(self):
        assert mortality_weight(MortalityModel.step(730), 730) == 0.0

    def test_exponential_closed_form(self):
        # e^{-0.1*10}: cross-check against repeated per-turn multiplication
        expected = 1.0
        for _ in range(10):
            expected *= math.exp(-0.1)
        weight = mortality_weight(MortalityModel.exponential(0.1), 10)
        assert weight == pytest.approx(math.exp(-1.0), rel=1e-12)
        assert weight == pytest.approx(expected, rel=1e-12)

    def test_table_extends_with_last_entry(self):
        model = MortalityModel.table([1.0, 0.5, 0.25])
        assert mortality_weight(model, 10) == 0.25

    def test_table_must_start_at_one(self):
        with pytest.raises(DomainError):
            MortalityModel.table([0.9, 0.5])

    def test_table_must_be_non_increasing(self):
        with pytest.raises(DomainError):
            MortalityModel.table([1.0, 0.5, 0.7])

    def test_negative_offset_rejected(self):
        with pytest.raises(DomainError):
            mortality_weight(MortalityModel.step(10), -1)

    @pytest.mark.parametrize(
        "model",
        [
            MortalityModel.step(30),
            MortalityModel.exponential(0.07),
            MortalityModel.table([1.0, 0.9, 0.9, 0.2, 0.0]),
        ],
    )
    def test_non_increasing(self, model):
        weights = [mortality_weight(model, t) for t in range(64)]
        assert all(b <= a for a, b in zip(weights, weights[1:]))
        assert weights[0] == 1.0


class TestCurves:
    def test_hash_rate_zero_growth(self):
        assert HashRateCurve.exponential(1e18, 0.0).at(100) == 1e18

    def test_hash_rate_doubling(self):
        curve = HashRateCurve.exponential(1.0, math.log(2.0))
        assert curve.at(3) == pytest.approx(8.0, rel=1e-12)

    def test_hash_rate_table_extends(self):
        assert HashRateCurve.table([5.0, 6.0, 7.0]).at(9) == 7.0

    def test_reward_constant(self):
        assert BlockRewardSchedule.constant(12.5).at(123456) == 12.5

    def test_reward_halving_boundary(self):
        schedule = BlockRewardSchedule.halving(12.5, 210000)
        assert schedule.at(210000) == 6.25
        assert schedule.at(0) == 12.5
        assert schedule.at(209999) == 12.5

    def test_reward_schedule_lookup(self):
        schedule = BlockRewardSchedule.schedule([(0, 50.0), (10, 25.0), (20, 12.5)])
        assert schedule.at(9) == 50.0
        assert schedule.at(10) == 25.0
        assert schedule.at(99) == 12.5

    def test_electricity_table(self):
        assert PriceCurve.table([0.1, 0.2]).at(5) == 0.2


class TestMarketLookups:
    def test_module_level_accessors(self, unit_market):
        from asicval.model import (
            block_reward_at,
            effective_block_reward,
            electricity_price_at,
            hash_rate_at,
        )

        assert hash_rate_at(unit_market, 5) == 1.0
        assert block_reward_at(unit_market, 5) == 2.0
        assert effective_block_reward(unit_market, 5) == 2.0
        assert electricity_price_at(unit_market, 5) == 1.0

    def test_pool_fee_scales_effective_reward(self):
        from asicval.model import effective_block_reward

        from conftest import make_unit_market

        market = make_unit_market(pool_fee=0.02)
        assert effective_block_reward(market, 0) == pytest.approx(1.96)


class TestMarketModel:
    def test_rejects_bad_fee(self, unit_market):
        with pytest.raises(DomainError):
            MarketModel(
                spot_price=100.0,
                global_hash_rate=unit_market.global_hash_rate,
                block_reward=unit_market.block_reward,
                electricity_price=unit_market.electricity_price,
                pool_fee=1.0,
            )

    def test_rejects_non_positive_spot(self, unit_market):
        with pytest.raises(DomainError):
            MarketModel(
                spot_price=0.0,
                global_hash_rate=unit_market.global_hash_rate,
                block_reward=unit_market.block_reward,
                electricity_price=unit_market.electricity_price,
            )


class TestStatePrice:
    @given(
        strict_walks,
        st.integers(0, 64),
        st.integers(0, 64),
        st.floats(0.01, 1e6),
    )
    def test_log_space_matches_repeated_multiplication(self, walk, ups, downs, price):
        if ups + downs > 64:
            downs = 64 - ups
        direct = price
        for _ in range(ups):
            direct *= walk.up_factor
        for _ in range(downs):
            direct *= walk.down_factor
        assert state_price(walk, price, ups, downs) == pytest.approx(
            direct, rel=1e-12
        )

    def test_seeded_builder_produces_valid_walks(self):
        import random

        rng = random.Random(7)
        for _ in range(50):
            assert validate(random_strict_walk(rng)) == []
