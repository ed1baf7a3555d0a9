from fractions import Fraction

import numpy as np
import pytest

from padd import (
    Affine,
    BoxDomain,
    Leontief,
    PowerSum,
    PreconditionError,
    PricingClass,
    Scale,
    best_concave_price,
    concave_fop_optimal,
    equivalence_check,
    fixed_bundle_optimal,
    overfit_scenario,
    seller_best_in_class,
)
from padd.concavepricing import OVERFIT_EPS_SWITCH, augmented_price_values
from padd.instances import capped_value_demo, convex_cost_demo, equivalence_suite

SQUARE = PowerSum((1.0,), (2.0,))
SQRT = PowerSum((1.0,), (0.5,))
BOX100 = BoxDomain(np.array([100.0]))


class TestBestConcavePrice:
    def test_anchored_commitment_trades_at_anchor(self):
        # u - c is zero at 0 and at the anchor; the payment tie-break
        # picks the trade over the empty bundle
        u = Leontief((16.0,), 4.0)
        res = best_concave_price(u, SQRT, BOX100)
        assert np.allclose(res.bundle, [16.0])
        assert abs(res.revenue) < 1e-12

    def test_zero_commitment_means_no_trade(self):
        res = best_concave_price(Affine((0.0,), 0.0), SQRT, BOX100)
        assert np.allclose(res.bundle, [0.0])
        assert res.revenue == 0.0

    def test_truthful_report_loses_everything(self):
        # seller extracts the entire surplus max 64 sqrt(x) - x^2; the
        # stationary point satisfies 32/sqrt(x) = 2x
        v, c, box = convex_cost_demo()
        res = best_concave_price(v, c, box)
        x = res.bundle[0]
        assert abs(32.0 / np.sqrt(x) - 2.0 * x) < 1e-6
        assert abs(res.revenue - (v.value(res.bundle) - c.value(res.bundle))) < 1e-12

    def test_price_function_is_the_report(self):
        u = Leontief((4.0,), 32.0)
        res = best_concave_price(u, SQUARE, BOX100)
        assert res.price is u
        assert np.allclose(res.bundle, [4.0])
        assert abs(res.revenue - 16.0) < 1e-9


class TestFopIdentity:
    def test_matches_fixed_bundle_exactly(self, rng):
        costs = [SQUARE, SQRT, Affine((2.0,), 0.0), Scale(0.5, PowerSum((1.0,), (3.0,))),
                 PowerSum((1.0, 0.5), (2.0, 2.0)), PowerSum((1.0, 1.0), (0.5, 0.5))]
        v1 = Scale(10.0, SQRT)
        v2 = PowerSum((5.0, 5.0), (0.5, 0.5))
        checked = 0
        while checked < 50:
            c = costs[checked % len(costs)]
            v = v1 if c.dim == 1 else v2
            xbar = rng.random(c.dim) * 5 + 0.2
            a = concave_fop_optimal(v, c, xbar)
            b = fixed_bundle_optimal(v, c, xbar)
            assert a.payment == b.imitative.payment
            assert np.array_equal(a.anchor, b.imitative.anchor)
            checked += 1

    def test_concave_cost_examples(self):
        imit = concave_fop_optimal(Scale(4.0, PowerSum((1.0,), (0.25,))), SQRT, (16.0,))
        assert imit.payment == 4.0 and imit.anchor.tolist() == [16.0]
        imit = concave_fop_optimal(Scale(64.0, SQRT), SQUARE, (4.0,))
        assert imit.payment == 32.0
        imit = concave_fop_optimal(Scale(2.0, SQRT), Affine((1.5,), 0.0), (2.0,))
        assert imit.payment == 3.0  # linear cost: payment equals the cost


class TestEquivalence:
    def test_suite_agrees(self):
        suite = equivalence_suite()
        assert len(suite) >= 10
        for name, v, c, box in suite:
            rep = equivalence_check(v, c, box)
            assert rep.equivalent, (name, rep)

    def test_no_trade_instance(self):
        rep = equivalence_check(SQRT, SQRT, BOX100)
        assert rep.equivalent
        assert not rep.linear.trade and rep.rich_revenue == 0.0

    def test_commitment_feasibility_sampled(self, rng):
        # the committed value never gives the seller a strictly better
        # bundle than the intended one
        for v, c, box in (convex_cost_demo(), capped_value_demo()):
            from padd import solve_auto

            out = solve_auto(v, c, box)
            u = concave_fop_optimal(v, c, out.bundle).to_expr()
            at_bundle = u.value(out.bundle) - c.value(out.bundle)
            zs = box.sample(rng, 1000)
            gaps = u.values(zs) - c.values(zs)
            assert np.all(gaps <= at_bundle + 1e-9)


class TestOverfitScenario:
    def test_reference_epsilon(self):
        r = overfit_scenario(0.05)
        assert abs(r.linear_bundle - 0.81) < 1e-12
        assert abs(r.linear_payment - 1.3122) < 1e-12
        assert abs(r.linear_revenue - 0.6561) < 1e-12
        assert abs(r.sqrt_linear_revenue - 0.1875) < 1e-15
        assert abs(r.rich_revenue - 0.1939) < 1e-6
        assert abs(r.rich_buyer_surplus - 7.25) < 1e-6
        assert r.chosen_price_tag == "augmented" and r.seller_prefers_augmented
        assert r.rich_revenue < r.linear_revenue
        assert r.rich_buyer_surplus > r.linear_buyer_surplus

    def test_rich_revenue_closed_form_exact(self):
        for eps in (0.01, 0.05, 0.12, 0.2):
            r = overfit_scenario(eps)
            expected = float(Fraction(2439, 10000) - Fraction(eps))
            assert r.rich_revenue == expected

    def test_large_epsilon_flags_linear_preference(self):
        r = overfit_scenario(0.10)
        assert abs(r.rich_revenue - 0.1439) < 1e-12
        assert r.chosen_price_tag == "linear"
        assert not r.seller_prefers_augmented
        r = overfit_scenario(0.2)
        assert abs(r.rich_revenue - 0.0439) < 1e-12
        assert not r.seller_prefers_augmented

    def test_switch_threshold(self):
        assert abs(OVERFIT_EPS_SWITCH - 0.0564) < 1e-15
        assert overfit_scenario(OVERFIT_EPS_SWITCH - 1e-4).seller_prefers_augmented
        assert not overfit_scenario(OVERFIT_EPS_SWITCH + 1e-4).seller_prefers_augmented

    def test_epsilon_range_enforced(self):
        for bad in (-1.0, 0.0, 0.2439, 0.3):
            with pytest.raises(PreconditionError):
                overfit_scenario(bad)

    def test_added_price_shape(self):
        # the added price is tangent-like: below sqrt near the kink, equal at 0
        xs = np.linspace(0.0, 1.0, 101)
        vals = augmented_price_values(0.05, xs)
        assert vals[0] == 0.0
        assert np.all(vals <= np.sqrt(xs) + 1e-12)
        assert abs(augmented_price_values(0.05, np.array([0.81]))[0] - 0.85) < 1e-12

    def test_csv_rows(self):
        rows = overfit_scenario(0.05).csv_rows()
        assert rows[0][0] == "linear" and rows[1][0] == "linear_plus_extra"
        assert float(rows[0][3]) == overfit_scenario(0.05).linear_revenue


class TestPricingClass:
    def test_validation(self):
        PricingClass("linear_only")
        PricingClass("all_concave")
        PricingClass("linear_plus_extra", extra=(SQRT,))
        with pytest.raises(PreconditionError):
            PricingClass("everything")
        with pytest.raises(PreconditionError):
            PricingClass("linear_plus_extra", extra=(SQUARE,))  # convex price
        with pytest.raises(PreconditionError):
            PricingClass("linear_only", extra=(SQRT,))

    def test_all_concave_charges_report(self):
        u = Leontief((4.0,), 32.0)
        tag, bundle, rev = seller_best_in_class(u, SQUARE, BOX100, PricingClass("all_concave"))
        assert tag == "concave"
        assert np.allclose(bundle, [4.0]) and abs(rev - 16.0) < 1e-9

    def test_ties_favor_linear(self):
        # charging the anchored report itself earns the same revenue as the
        # best linear price, so linear wins the tie
        u = Leontief((4.0,), 32.0)
        cls = PricingClass("linear_plus_extra", extra=(u,))
        tag, bundle, rev = seller_best_in_class(u, SQUARE, BOX100, cls)
        assert tag == "linear"
        assert abs(rev - 16.0) < 1e-9

    def test_strictly_better_extra_wins(self):
        # against a sqrt report, charging sqrt itself extracts the full
        # surplus max sqrt(x) - x^2 > 0.1875
        cls = PricingClass("linear_plus_extra", extra=(SQRT,))
        tag, bundle, rev = seller_best_in_class(SQRT, SQUARE, BoxDomain(np.array([10.0])), cls)
        assert tag == "extra:0"
        x = bundle[0]
        assert abs(0.5 / np.sqrt(x) - 2.0 * x) < 1e-6  # stationarity of sqrt(x) - x^2
        assert rev > 0.1875
