"""Analytic bounds: derivative bound, sensitivity factor, log-odds
interval propagation, exact root change, envelopes."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from belief_tuner.bounds import (analytic_query_derivative, derivative_bound,
                                 envelope, exact_root_change, log_odds,
                                 log_odds_distance, param_change_lower_bound,
                                 query_interval, sensitivity_factor)
from belief_tuner.errors import ValidationError
from belief_tuner.inference import joint_prob, posterior
from belief_tuner.network import (Event, MetaParameterRef, apply_change,
                                  list_meta_parameters)
from belief_tuner.random_networks import random_instantiation, random_network
from belief_tuner.sample_networks import agreement_network, fire_alarm
from belief_tuner.tuning import joint_slope

interior = st.floats(min_value=0.01, max_value=0.99)


class TestDerivativeBound:
    def test_direct_evaluation(self):
        assert derivative_bound(0.5, 0.02) \
            == pytest.approx(0.25 / 0.0196, abs=1e-9)

    def test_extreme_queries_give_zero(self):
        for p in (0.1, 0.5, 0.9):
            assert derivative_bound(0.0, p) == 0.0
            assert derivative_bound(1.0, p) == 0.0

    def test_boundary_parameter_rejected(self):
        with pytest.raises(ValidationError):
            derivative_bound(0.5, 0.0)
        with pytest.raises(ValidationError):
            derivative_bound(0.5, 1.0)

    def test_tight_on_agreement_network(self):
        net = agreement_network(0.3, 0.7)
        deriv = analytic_query_derivative(
            net, Event("Y", "true"), {"E": "true"},
            MetaParameterRef.make("X", "true"))
        assert deriv == pytest.approx(0.21 / 0.42 ** 2, abs=1e-12)
        q = posterior(net, Event("Y", "true"), {"E": "true"})
        assert abs(deriv) == pytest.approx(derivative_bound(q, 0.3), abs=1e-12)


class TestAnalyticDerivative:
    def test_symmetric_agreement_case(self):
        # theta_x = theta_y_bar = .25 makes the derivative 1/(4 p (1-p))
        net = agreement_network(0.25, 0.75)
        deriv = analytic_query_derivative(
            net, Event("Y", "true"), {"E": "true"},
            MetaParameterRef.make("X", "true"))
        assert deriv == pytest.approx(1.0 / (4 * 0.25 * 0.75), abs=1e-12)

    def test_quotient_rule_cross_check(self):
        # d(Pr(y,e)/Pr(e)) = (slope_ye * Pr(e) - Pr(y,e) * slope_e) / Pr(e)^2
        rng = np.random.default_rng(17)
        checked = 0
        while checked < 40:
            net = random_network(rng, n_vars=int(rng.integers(3, 8)))
            params = [e for e in list_meta_parameters(net) if e.tunable]
            if not params:
                continue
            entry = params[int(rng.integers(len(params)))]
            evidence = random_instantiation(rng, net, max_vars=2)
            free = [v for v in net.variables if v.name not in evidence]
            if not free:
                continue
            yvar = free[int(rng.integers(len(free)))]
            y = Event(yvar.name, yvar.states[0])
            p_e = joint_prob(net, evidence)
            if p_e <= 1e-9:
                continue
            ext = {**evidence, y.variable: y.state}
            quotient = (joint_slope(net, ext, entry.ref) * p_e
                        - joint_prob(net, ext) * joint_slope(net, evidence, entry.ref)
                        ) / p_e ** 2
            direct = analytic_query_derivative(net, y, evidence, entry.ref)
            assert direct == pytest.approx(quotient, abs=1e-10)
            # the query event may name the tuned variable itself
            y_self = Event(entry.ref.variable, entry.ref.state)
            if y_self.variable not in evidence:
                ext = {**evidence, y_self.variable: y_self.state}
                quotient = (joint_slope(net, ext, entry.ref) * p_e
                            - joint_prob(net, ext)
                            * joint_slope(net, evidence, entry.ref)) / p_e ** 2
                direct = analytic_query_derivative(net, y_self, evidence,
                                                   entry.ref)
                assert direct == pytest.approx(quotient, abs=1e-10)
            checked += 1

    def test_never_exceeds_bound(self):
        rng = np.random.default_rng(23)
        checked = 0
        while checked < 60:
            net = random_network(rng, n_vars=int(rng.integers(3, 8)))
            params = [e for e in list_meta_parameters(net) if e.tunable]
            if not params:
                continue
            entry = params[int(rng.integers(len(params)))]
            evidence = random_instantiation(rng, net, max_vars=2)
            free = [v for v in net.variables if v.name not in evidence]
            if not free or joint_prob(net, evidence) <= 1e-9:
                continue
            yvar = free[int(rng.integers(len(free)))]
            y = Event(yvar.name, yvar.states[0])
            deriv = analytic_query_derivative(net, y, evidence, entry.ref)
            q = posterior(net, y, evidence)
            assert abs(deriv) <= derivative_bound(q, entry.tau) + 1e-12
            checked += 1

    def test_matches_finite_differences(self):
        net = fire_alarm()
        evidence = {"report": "true", "smoke": "false"}
        y = Event("fire", "true")
        h = 1e-6
        for entry in list_meta_parameters(net):
            if y.variable == entry.ref.variable:
                continue
            deriv = analytic_query_derivative(net, y, evidence, entry.ref)
            up = posterior(apply_change(net, entry.ref, entry.tau + h),
                           y, evidence)
            down = posterior(apply_change(net, entry.ref, entry.tau - h),
                             y, evidence)
            fd = (up - down) / (2 * h)
            assert deriv == pytest.approx(fd, rel=1e-5, abs=1e-9)


class TestSensitivityFactor:
    def test_never_exceeds_two(self):
        for q in np.linspace(0.0, 1.0, 21):
            for p in np.linspace(0.01, 0.5, 20):
                assert sensitivity_factor(float(q), float(p)) <= 2.0 + 1e-12

    def test_extreme_query_is_insensitive(self):
        assert sensitivity_factor(1.0, 0.3) == 0.0

    def test_large_parameter_rejected(self):
        with pytest.raises(ValidationError):
            sensitivity_factor(0.5, 0.51)

    def test_derivative_level_form(self):
        # |dq/dtau| * tau / q <= (1-q)/(1-tau) <= 2 whenever tau <= 1/2
        rng = np.random.default_rng(29)
        checked = 0
        while checked < 40:
            net = random_network(rng, n_vars=int(rng.integers(3, 7)))
            params = [e for e in list_meta_parameters(net)
                      if e.tunable and e.tau <= 0.5]
            if not params:
                continue
            entry = params[int(rng.integers(len(params)))]
            evidence = random_instantiation(rng, net, max_vars=2)
            free = [v for v in net.variables if v.name not in evidence]
            if not free or joint_prob(net, evidence) <= 1e-9:
                continue
            yvar = free[int(rng.integers(len(free)))]
            y = Event(yvar.name, yvar.states[0])
            q = posterior(net, y, evidence)
            if q <= 1e-9:
                continue
            deriv = analytic_query_derivative(net, y, evidence, entry.ref)
            relative = abs(deriv) * entry.tau / q
            assert relative <= sensitivity_factor(q, entry.tau) + 1e-9
            assert relative <= 2.0 + 1e-9
            checked += 1

    def test_finite_change_breaks_the_infinitesimal_bound(self):
        # tau .5 -> .6 is a 20% relative change; the query moves by 49%,
        # more than twice as much, showing the factor-2 bound is for
        # infinitesimal changes only
        net = agreement_network(0.5, 0.01)
        y, e = Event("Y", "true"), {"E": "true"}
        before = posterior(net, y, e)
        assert before == pytest.approx(0.01, abs=1e-12)
        after = posterior(
            apply_change(net, MetaParameterRef.make("X", "true"), 0.6), y, e)
        relative_query = abs(after - before) / before
        assert relative_query == pytest.approx(0.4925, abs=0.0005)
        assert relative_query > 2 * 0.2


class TestQueryInterval:
    def test_paper_range(self):
        iv = query_interval(0.029, 0.616)
        assert iv.low == pytest.approx(0.016, abs=0.001)
        assert iv.high == pytest.approx(0.053, abs=0.001)

    def test_zero_budget(self):
        iv = query_interval(0.42, 0.0)
        assert (iv.low, iv.high) == (pytest.approx(0.42), pytest.approx(0.42))

    def test_degenerate_flag(self):
        iv = query_interval(1.0, 0.5)
        assert iv.degenerate and iv.low == iv.high == 1.0

    def test_exact_value_lies_inside(self, alarm_net, report_no_smoke):
        ref = MetaParameterRef.make("tampering", "true")
        new_prior = exact_root_change(0.02, 0.50, 0.65)
        changed = apply_change(alarm_net, ref, new_prior)
        exact = posterior(changed, Event("fire", "true"), report_no_smoke)
        assert exact == pytest.approx(0.021, abs=0.002)
        iv = query_interval(0.029, 0.616)
        assert iv.contains(exact)

    @given(q=interior, b1=st.floats(0, 3), b2=st.floats(0, 3))
    def test_widens_monotonically(self, q, b1, b2):
        lo, hi = sorted((b1, b2))
        narrow, wide = query_interval(q, lo), query_interval(q, hi)
        assert wide.low <= narrow.low + 1e-12
        assert wide.high >= narrow.high - 1e-12
        assert narrow.contains(q, tol=1e-12)


class TestLogOddsDistance:
    def test_paper_values(self):
        assert log_odds_distance(0.90, 0.95) == pytest.approx(0.7472, abs=0.0005)
        assert log_odds_distance(0.90, 0.85) == pytest.approx(0.4626, abs=0.0005)

    def test_identity(self):
        assert log_odds_distance(0.37, 0.37) == 0.0

    def test_boundaries_rejected(self):
        with pytest.raises(ValidationError):
            log_odds_distance(0.0, 0.5)
        with pytest.raises(ValidationError):
            log_odds_distance(0.5, 1.0)

    @given(p=interior, q=interior)
    def test_symmetry(self, p, q):
        assert log_odds_distance(p, q) == pytest.approx(
            log_odds_distance(q, p), rel=1e-12)


class TestParamChangeLowerBound:
    def test_consistent_with_exact_recommendation(self):
        budget, p_new = param_change_lower_bound(0.25, 0.50, 0.01)
        assert budget == pytest.approx(math.log(3.0), abs=1e-9)
        assert p_new == pytest.approx(0.0294, abs=0.0005)
        # a valid lower bound: below the exact answer near .03
        assert p_new <= 0.0301

    def test_no_change_needed(self):
        budget, p_new = param_change_lower_bound(0.4, 0.4, 0.2)
        assert budget == 0.0 and p_new == 0.2

    def test_root_self_query_matches_exact_change(self):
        budget, p_new = param_change_lower_bound(0.50, 0.65, 0.02)
        assert p_new == pytest.approx(exact_root_change(0.02, 0.50, 0.65),
                                      abs=1e-12)
        assert p_new == pytest.approx(0.0365, abs=0.0005)


class TestExactRootChange:
    def test_example_value(self):
        assert exact_root_change(0.02, 0.50, 0.65) \
            == pytest.approx(0.036, abs=0.001)

    def test_identity(self):
        assert exact_root_change(0.02, 0.44, 0.44) == pytest.approx(0.02)

    def test_reinference_reaches_target(self, alarm_net, report_no_smoke):
        # uses the actual fixture posterior, not the rounded .50, so the
        # re-run lands on .65 and not merely near it
        y = Event("tampering", "true")
        current = posterior(alarm_net, y, report_no_smoke)
        new_prior = exact_root_change(0.02, current, 0.65)
        changed = apply_change(alarm_net,
                               MetaParameterRef.make("tampering", "true"),
                               new_prior)
        assert posterior(changed, y, report_no_smoke) \
            == pytest.approx(0.65, abs=1e-9)

    def test_odds_ratio_invariance(self, alarm_net, report_no_smoke):
        # for a root, O(x|e)/O(x) does not depend on the prior
        y = Event("tampering", "true")
        ref = MetaParameterRef.make("tampering", "true")
        ratios = []
        for prior in np.linspace(0.1, 0.9, 9):
            changed = apply_change(alarm_net, ref, float(prior))
            q = posterior(changed, y, report_no_smoke)
            ratios.append(math.exp(log_odds(q) - log_odds(float(prior))))
        assert max(ratios) - min(ratios) \
            <= 1e-9 * abs(sum(ratios) / len(ratios))


class TestLogOddsContraction:
    def test_random_perturbations(self):
        # query log-odds never move farther than parameter log-odds
        rng = np.random.default_rng(37)
        checked = 0
        while checked < 120:
            net = random_network(rng, n_vars=int(rng.integers(3, 9)))
            params = [e for e in list_meta_parameters(net) if e.tunable]
            if not params:
                continue
            entry = params[int(rng.integers(len(params)))]
            evidence = random_instantiation(rng, net, max_vars=2)
            free = [v for v in net.variables if v.name not in evidence]
            if not free or joint_prob(net, evidence) <= 1e-9:
                continue
            yvar = free[int(rng.integers(len(free)))]
            y = Event(yvar.name, yvar.states[int(rng.integers(len(yvar.states)))])
            new_tau = float(rng.uniform(0.02, 0.98))
            before = posterior(net, y, evidence)
            after = posterior(apply_change(net, entry.ref, new_tau),
                              y, evidence)
            if not (0 < before < 1 and 0 < after < 1):
                continue
            assert log_odds_distance(before, after) \
                <= log_odds_distance(entry.tau, new_tau) + 1e-9
            checked += 1


class TestEnvelope:
    def test_frozen_point(self):
        (pt,) = envelope(0.90, 0.85, 0.95, [0.5])
        assert pt.delta_plus_outer == pytest.approx(0.1786, abs=0.0005)
        assert pt.delta_plus_inner == pytest.approx(0.1136, abs=0.0005)
        # solving (0.5+d)/(0.5-d) = exp(budget) directly
        for budget, delta in ((log_odds_distance(0.90, 0.95), pt.delta_plus_outer),
                              (log_odds_distance(0.90, 0.85), pt.delta_plus_inner)):
            assert (0.5 + delta) / (0.5 - delta) \
                == pytest.approx(math.exp(budget), rel=1e-9)

    def test_deltas_vanish_at_extremes(self):
        points = envelope(0.90, 0.85, 0.95, [1e-6, 1 - 1e-6])
        for pt in points:
            for value in (pt.delta_plus_outer, pt.delta_plus_inner,
                          pt.delta_minus_outer, pt.delta_minus_inner):
                assert 0.0 <= value < 1e-4

    def test_less_extreme_query_allows_less(self):
        grid = [x / 20 for x in range(1, 20)]
        robust = envelope(0.90, 0.85, 0.95, grid)
        fragile = envelope(0.60, 0.55, 0.65, grid)
        for a, b in zip(fragile, robust):
            assert a.delta_plus_outer < b.delta_plus_outer
            assert a.delta_plus_inner < b.delta_plus_inner
            assert a.delta_minus_outer < b.delta_minus_outer
            assert a.delta_minus_inner < b.delta_minus_inner

    def test_deltas_recheck_their_budget(self):
        grid = [x / 50 for x in range(1, 50)]
        b_out = log_odds_distance(0.90, 0.95)
        b_in = log_odds_distance(0.90, 0.85)
        for pt in envelope(0.90, 0.85, 0.95, grid):
            assert log_odds_distance(pt.p, pt.p + pt.delta_plus_outer) \
                == pytest.approx(b_out, abs=1e-9)
            assert log_odds_distance(pt.p, pt.p + pt.delta_plus_inner) \
                == pytest.approx(b_in, abs=1e-9)
            assert log_odds_distance(pt.p, pt.p - pt.delta_minus_outer) \
                == pytest.approx(b_out, abs=1e-9)
            assert log_odds_distance(pt.p, pt.p - pt.delta_minus_inner) \
                == pytest.approx(b_in, abs=1e-9)
            assert pt.safe_delta_plus == min(pt.delta_plus_outer,
                                             pt.delta_plus_inner)

    def test_band_must_contain_query(self):
        with pytest.raises(ValidationError):
            envelope(0.5, 0.6, 0.7, [0.5])
