import math
import random
from dataclasses import replace

import pytest

from asicval.calibration import calibrated_walk, turn_grid
from asicval.errors import DomainError
from asicval.model import (
    EXAMPLE_COMPAT,
    AsicSpec,
    BlockRewardSchedule,
    HashRateCurve,
    MarketModel,
    MortalityModel,
    PriceCurve,
    RandomWalkParams,
    risk_neutral_up_weight,
)
from asicval.pricing import immediate_value, one_step_value, opportunity_value
from asicval.valuation import (
    asic_value,
    delay_sweep,
    naive_branch_average,
    naive_expected_value,
    reception_delay_loss,
    volatility_sweep,
)

from conftest import make_unit_asic, make_unit_market, random_instance


def flat_market(spot=1000.0):
    return MarketModel(
        spot_price=spot,
        global_hash_rate=HashRateCurve.table([1.0]),
        block_reward=BlockRewardSchedule.constant(2.0),
        electricity_price=PriceCurve.constant(1.0),
    )


def growth_market(spot=5000.0, doubling_years=1.0):
    return MarketModel(
        spot_price=spot,
        global_hash_rate=HashRateCurve.exponential(1e6, math.log(2.0) / (365.0 * doubling_years)),
        block_reward=BlockRewardSchedule.constant(2.0),
        electricity_price=PriceCurve.constant(1.0),
    )


class TestAsicValue:
    def test_single_opportunity_at_reception(self, unit_market, example_walk):
        asic = make_unit_asic(lifetime=1, horizon=1)
        quote = asic_value(3, 3, 800.0, asic, unit_market, example_walk)
        assert quote.value == immediate_value(3, 800.0, asic, unit_market)
        assert len(quote.breakdown) == 1

    def test_vanishing_hash_rate_vanishing_value(self, unit_market, example_walk):
        asic = AsicSpec(1e-12, 250.0, MortalityModel.step(3), 0, 3)
        quote = asic_value(0, 0, 800.0, asic, unit_market, example_walk)
        assert quote.value < 1e-6

    def test_two_opportunity_composition(self, unit_market, example_walk):
        # compose the module's own one-step pieces as an independent oracle:
        # V(1,0,200) from the immediate up/down pair, V(2,0,200) from the
        # two-turn tree root
        asic = make_unit_asic(lifetime=2, horizon=1)
        v1 = one_step_value(
            immediate_value(1, 400.0, asic, unit_market),
            immediate_value(1, 100.0, asic, unit_market),
            example_walk,
        )
        v2 = opportunity_value(2, 0, 200.0, asic, unit_market, example_walk).value
        quote = asic_value(1, 0, 200.0, asic, unit_market, example_walk)
        assert quote.value == pytest.approx(v1 + v2, rel=1e-12)
        assert v1 == pytest.approx(50.0, abs=1e-12)
        assert v2 == pytest.approx(550.0 / 9.0, abs=1e-12)

    def test_breakdown_sums_to_value(self):
        rng = random.Random(3)
        _, _, price, asic, market, walk = random_instance(rng, max_depth=6)
        asic = replace(asic, mortality=MortalityModel.exponential(0.2), lifetime_horizon=20)
        quote = asic_value(2, 0, price, asic, market, walk)
        total = sum(w * v for _, w, v in quote.breakdown)
        assert quote.value == pytest.approx(total, rel=1e-9, abs=1e-12)

    def test_methods_agree(self, unit_market, example_walk):
        asic = make_unit_asic(lifetime=4, horizon=4)
        closed = asic_value(2, 0, 200.0, asic, unit_market, example_walk)
        induction = asic_value(2, 0, 200.0, asic, unit_market, example_walk, "induction")
        assert closed.value == pytest.approx(induction.value, rel=1e-9)

    def test_valuation_after_reception_rejected(self, unit_asic, unit_market, example_walk):
        with pytest.raises(DomainError):
            asic_value(1, 2, 200.0, unit_asic, unit_market, example_walk)

    def test_unknown_method_rejected(self, unit_asic, unit_market, example_walk):
        with pytest.raises(DomainError):
            asic_value(0, 0, 200.0, unit_asic, unit_market, example_walk, "monte_carlo")

    def test_horizon_extension_never_decreases(self, unit_market, example_walk):
        short = make_unit_asic(lifetime=10, horizon=3)
        long = make_unit_asic(lifetime=10, horizon=8)
        a = asic_value(0, 0, 400.0, short, unit_market, example_walk).value
        b = asic_value(0, 0, 400.0, long, unit_market, example_walk).value
        assert b >= a - 1e-12

    def test_pointwise_larger_mortality_worth_more(self, unit_market, example_walk):
        dies_fast = make_unit_asic(lifetime=3, horizon=6)
        dies_slow = make_unit_asic(lifetime=6, horizon=6)
        a = asic_value(0, 0, 400.0, dies_fast, unit_market, example_walk).value
        b = asic_value(0, 0, 400.0, dies_slow, unit_market, example_walk).value
        assert b >= a


class TestReceptionDelay:
    def test_no_delay_no_loss(self, unit_market, example_walk):
        asic = make_unit_asic(lifetime=3, horizon=3)
        assert reception_delay_loss(1, 1, 0, 200.0, asic, unit_market, example_walk) == 0.0

    def test_growing_competition_makes_delay_costly(self):
        walk = calibrated_walk(0.6, 0.02, 1.0 / 365.0)
        market = growth_market()
        coefficient = 2.0 / (1e6 + 1.0)
        asic = AsicSpec(
            1.0, 0.3 * coefficient * 5000.0, MortalityModel.step(30), 5, 30
        )
        for d in (1, 5, 30):
            loss = reception_delay_loss(5, 5 + d, 0, 5000.0, asic, market, walk)
            assert loss < 0.0

    def test_flat_market_deep_in_the_money_translation_invariant(self):
        # flat rates (r = 1) and a strike below every reachable leaf make
        # every opportunity worth exactly coefficient*P - strike, so the
        # delayed and undelayed sums cancel term by term
        walk = RandomWalkParams.checked(1.25, 0.8, 1.0, mode=EXAMPLE_COMPAT)
        market = flat_market()
        asic = AsicSpec(1.0, 10.0, MortalityModel.step(5), 2, 4)
        base = asic_value(2, 0, 1000.0, asic, market, walk).value
        loss = reception_delay_loss(2, 5, 0, 1000.0, asic, market, walk)
        assert abs(loss) <= 1e-9 * max(1.0, base)

    def test_flat_market_zero_strike_translation_invariant(self):
        walk = RandomWalkParams.checked(1.2, 0.85, 1.05)
        market = flat_market()
        asic = AsicSpec(1.0, 0.0, MortalityModel.step(5), 2, 4)
        base = asic_value(2, 0, 1000.0, asic, market, walk).value
        loss = reception_delay_loss(2, 5, 0, 1000.0, asic, market, walk)
        assert abs(loss) <= 1e-9 * max(1.0, base)

    def test_ordering_violation_rejected(self, unit_asic, unit_market, example_walk):
        with pytest.raises(DomainError):
            reception_delay_loss(3, 2, 0, 200.0, unit_asic, unit_market, example_walk)


class TestNaiveBaselines:
    def test_drifted_price_single_opportunity(self, unit_market):
        # price drifts 400 -> 500 into the single live turn; no optionality
        asic = make_unit_asic(lifetime=1, horizon=1)
        value = naive_expected_value(1, 0, 400.0, 1.25, asic, unit_market, 1.0)
        assert value == pytest.approx(max(500.0 - 250.0, 0.0), rel=1e-12)
        assert value == 250.0

    def test_no_drift_zero_strike_sums_current_rewards(self):
        market = flat_market()
        asic = AsicSpec(1.0, 0.0, MortalityModel.step(4), 0, 4)
        gross = 1.05
        value = naive_expected_value(0, 0, 1000.0, 1.0, asic, market, gross)
        expected = sum(1000.0 / gross**u for u in range(4))
        assert value == pytest.approx(expected, rel=1e-12)

    def test_dead_turns_contribute_nothing(self, unit_market):
        short_lived = make_unit_asic(lifetime=2, horizon=10)
        long_lived = make_unit_asic(lifetime=2, horizon=2)
        a = naive_expected_value(0, 0, 400.0, 1.1, short_lived, unit_market, 1.02)
        b = naive_expected_value(0, 0, 400.0, 1.1, long_lived, unit_market, 1.02)
        assert a == b

    def test_branch_average_example(self):
        assert naive_branch_average(550.0, 0.0, 0.5, 1.0) == 275.0

    def test_branch_average_riskless(self):
        assert naive_branch_average(7.0, 7.0, 0.123, 1.4) == pytest.approx(5.0)

    def test_branch_average_at_risk_neutral_weight_is_fair(self, example_walk):
        q = risk_neutral_up_weight(example_walk)
        assert q == pytest.approx(1.0 / 3.0)
        fair = naive_branch_average(550.0, 0.0, q, example_walk.gross_rate)
        assert fair == pytest.approx(550.0 / 3.0, abs=1e-12)
        assert fair == pytest.approx(one_step_value(550.0, 0.0, example_walk), abs=1e-12)

    def test_branch_average_matches_one_step_on_random_instances(self):
        rng = random.Random(17)
        for _ in range(50):
            _, _, _, _, _, walk = random_instance(rng, max_depth=0)
            v_up, v_down = rng.uniform(0, 1e4), rng.uniform(0, 1e4)
            q = risk_neutral_up_weight(walk)
            lhs = naive_branch_average(v_up, v_down, q, walk.gross_rate)
            rhs = one_step_value(v_up, v_down, walk)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_bad_probability_rejected(self):
        with pytest.raises(DomainError):
            naive_branch_average(1.0, 0.0, 1.5, 1.0)


def desk_context(sigma=0.6):
    context, _ = turn_grid(2.0, annual_volatility=sigma, annual_interest=0.02)
    return context


def desk_asic(reception=40):
    # one live opportunity, `reception` turns out, positive strike
    return AsicSpec(1.0, 150.0, MortalityModel.step(1), reception, 1)


class TestVolatilitySweep:
    def test_single_point_grid(self):
        sweep = volatility_sweep([0.6], desk_context(), desk_asic(), flat_market(200.0))
        assert len(sweep.points) == 1
        assert sweep.points[0].percent_change == 0.0

    def test_value_non_decreasing_in_volatility(self):
        sweep = volatility_sweep(
            [0.3, 0.6, 1.2], desk_context(), desk_asic(), flat_market(200.0)
        )
        values = [p.value for p in sweep.points]
        assert all(b >= a - 1e-9 * max(1.0, a) for a, b in zip(values, values[1:]))

    def test_higher_volatility_strictly_raises_option_value(self):
        sweep = volatility_sweep(
            [0.3, 0.9], desk_context(), desk_asic(), flat_market(200.0)
        )
        assert sweep.points[1].value > sweep.points[0].value
        assert sweep.points[1].percent_change > 0.0

    def test_non_increasing_grid_rejected(self):
        with pytest.raises(DomainError):
            volatility_sweep([0.6, 0.6], desk_context(), desk_asic(), flat_market())

    def test_degenerate_sigma_propagates(self):
        from asicval.errors import CalibrationError

        with pytest.raises((CalibrationError, DomainError)):
            volatility_sweep([0.0, 0.5], desk_context(), desk_asic(), flat_market())


class TestDelaySweep:
    def test_zero_delay_zero_percent(self, unit_market, example_walk):
        asic = make_unit_asic(lifetime=3, horizon=3)
        sweep = delay_sweep([0, 1], 0, 0, 400.0, asic, unit_market, example_walk)
        assert sweep.points[0].percent_change == 0.0

    def test_growth_scenario_negative_percents(self):
        walk = calibrated_walk(0.6, 0.02, 1.0 / 365.0)
        market = growth_market()
        coefficient = 2.0 / (1e6 + 1.0)
        asic = AsicSpec(1.0, 0.3 * coefficient * 5000.0, MortalityModel.step(30), 5, 30)
        sweep = delay_sweep([7, 30], 5, 0, 5000.0, asic, market, walk)
        assert all(p.percent_change < 0.0 for p in sweep.points)

    def test_flat_scenario_zero_percents(self):
        walk = RandomWalkParams.checked(1.25, 0.8, 1.0, mode=EXAMPLE_COMPAT)
        asic = AsicSpec(1.0, 10.0, MortalityModel.step(5), 2, 4)
        sweep = delay_sweep([0, 3, 10], 2, 0, 1000.0, asic, flat_market(), walk)
        assert all(abs(p.percent_change) < 1e-9 for p in sweep.points)
