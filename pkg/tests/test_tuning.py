"""Tuner: linear coefficients, constraint solving, verification.

The completeness tests use a grid-search oracle built from first
principles: a world's probability contains the tuned CPT entry as a
single factor of its product, so Pr(i) at any tau is the convex
combination tau * Pr(i; row pinned to 1) + (1 - tau) * Pr(i; row pinned
to 0), both ends evaluated by the brute-force enumeration oracle. No
part of the solver's coefficient algebra is reused.
"""

import math

import numpy as np
import pytest

from belief_tuner.errors import (NonTunableParameter, ValidationError,
                                 ZeroEvidenceProbability)
from belief_tuner.inference import (enumerate_joint_oracle, joint_prob,
                                    posterior)
from belief_tuner.network import (Cpt, Event, MetaParameterRef, Network,
                                  Variable, apply_change,
                                  list_meta_parameters)
from belief_tuner.random_networks import random_instantiation, random_network
from belief_tuner.tuning import (Constraint, ConstraintKind, ParameterStatus,
                                 Recommendation, analyze, constraint_margin,
                                 joint_slope, solve, verify)

# Example values frozen from the enumeration oracle (test_fixture_slope
# and the recommendation tests re-derive the inputs they rest on)
E11_SLOPE_TAMPERING = 0.5415059921154
E11_TAMPERING_DELTA = 0.0164048535527
E11_REPORT_DELTA = -0.0052952734022
E21_THRESHOLDS = {
    "fire": 0.0299773421227,
    "smoke": 0.0032685381597,
    "tampering": 0.8014486843958,
    "report": 0.7764560414768,
    "leaving": 0.9231355947253,
}


def example_11_constraint() -> Constraint:
    # printed as Pr(t|e) - Pr(t|e) >= .30 in the source scenario, an
    # evident typo; read as Pr(t|e) - Pr(not t|e) >= .30, which is the
    # reading that reproduces both published recommendations
    return Constraint(ConstraintKind.DIFFERENCE,
                      Event("tampering", "true"), Event("tampering", "false"),
                      0.30)


def example_21_constraint() -> Constraint:
    return Constraint(ConstraintKind.AT_LEAST, Event("fire", "true"),
                      epsilon=0.50)


class TestJointSlope:
    def test_fixture_value(self, alarm_net, report_no_smoke):
        ref = MetaParameterRef.make("tampering", "true")
        slope = joint_slope(alarm_net, report_no_smoke, ref)
        assert slope == pytest.approx(E11_SLOPE_TAMPERING, abs=1e-10)
        # Pr(i, x) / tau - Pr(i, not x) / (1 - tau), from enumeration
        p_t = enumerate_joint_oracle(alarm_net,
                                     {**report_no_smoke, "tampering": "true"})
        p_f = enumerate_joint_oracle(alarm_net,
                                     {**report_no_smoke, "tampering": "false"})
        assert slope == pytest.approx(p_t / 0.02 - p_f / 0.98, abs=1e-12)

    def test_empty_instantiation_slope_is_zero(self, alarm_net):
        for name in ("fire", "leaving"):
            for entry in list_meta_parameters(alarm_net):
                if entry.ref.variable != name:
                    continue
                assert joint_slope(alarm_net, {}, entry.ref) \
                    == pytest.approx(0.0, abs=1e-12)

    def test_matches_finite_differences(self, alarm_net, report_no_smoke):
        h = 1e-6
        for entry in list_meta_parameters(alarm_net):
            slope = joint_slope(alarm_net, report_no_smoke, entry.ref)
            up = joint_prob(apply_change(alarm_net, entry.ref, entry.tau + h),
                            report_no_smoke)
            down = joint_prob(apply_change(alarm_net, entry.ref, entry.tau - h),
                              report_no_smoke)
            fd = (up - down) / (2 * h)
            assert slope == pytest.approx(fd, rel=1e-6, abs=1e-9)

    def test_non_tunable_rejected(self):
        net = Network(
            (Variable("a", ("t", "f")),),
            (Cpt("a", ((0.0, 1.0),)),))
        with pytest.raises(NonTunableParameter):
            joint_slope(net, {}, MetaParameterRef.make("a", "t"))


class TestSolveExample11:
    def test_exactly_two_recommendations(self, alarm_net, report_no_smoke):
        recs = solve(alarm_net, report_no_smoke, example_11_constraint())
        assert len(recs) == 2
        first, second = recs
        assert first.param == MetaParameterRef.make("tampering", "true")
        assert first.minimal_delta == pytest.approx(E11_TAMPERING_DELTA, abs=1e-9)
        assert first.new_tau >= 0.036
        assert second.param == MetaParameterRef.make(
            "report", "true", {"leaving": "false"})
        assert second.minimal_delta == pytest.approx(E11_REPORT_DELTA, abs=1e-9)
        assert second.new_tau <= 0.005
        # ranked by log-odds distance
        assert first.log_odds_distance < second.log_odds_distance
        assert first.log_odds_distance == pytest.approx(0.616, abs=0.005)

    def test_other_parameters_cannot_enforce(self, alarm_net, report_no_smoke):
        outcomes = analyze(alarm_net, report_no_smoke, example_11_constraint())
        for o in outcomes:
            if o.ref.variable in ("fire", "smoke", "leaving", "alarm"):
                assert o.status in (ParameterStatus.IRRELEVANT,
                                    ParameterStatus.INFEASIBLE)
                assert o.recommendation is None

    def test_feasible_interval_endpoints(self, alarm_net, report_no_smoke):
        for rec in solve(alarm_net, report_no_smoke, example_11_constraint()):
            lo, hi = rec.feasible_interval
            assert lo <= rec.new_tau <= hi
            assert rec.new_tau in (lo, hi)
            # the new value is the endpoint nearest the current one
            inside = min((abs(lo - rec.current_tau), lo),
                         (abs(hi - rec.current_tau), hi))[1]
            assert rec.new_tau == inside


class TestSolveExample21:
    def test_five_recommendations(self, alarm_net, smoke_no_report):
        recs = solve(alarm_net, smoke_no_report, example_21_constraint())
        assert len(recs) == 5
        by_var = {r.param.variable: r for r in recs}
        for name, threshold in E21_THRESHOLDS.items():
            assert by_var[name].new_tau == pytest.approx(threshold, abs=1e-9)
        # ascending log-odds distance puts the cheap changes first
        assert [r.param.variable for r in recs] \
            == ["fire", "smoke", "tampering", "report", "leaving"]
        assert by_var["smoke"].param.parent_instantiation == {"fire": "false"}
        assert by_var["smoke"].minimal_delta < 0

    def test_verify_reaches_the_target(self, alarm_net, smoke_no_report):
        recs = solve(alarm_net, smoke_no_report, example_21_constraint())
        result = verify(alarm_net, smoke_no_report, example_21_constraint(),
                        recs[0])
        assert result.satisfied
        changed = apply_change(alarm_net, recs[0].param, recs[0].new_tau)
        assert posterior(changed, Event("fire", "true"), smoke_no_report) \
            == pytest.approx(0.50, abs=1e-6)


class TestVerify:
    def test_example_11_posterior(self, alarm_net, report_no_smoke):
        recs = solve(alarm_net, report_no_smoke, example_11_constraint())
        result = verify(alarm_net, report_no_smoke, example_11_constraint(),
                        recs[0])
        assert result.satisfied and result.slack >= -1e-9
        changed = apply_change(alarm_net, recs[0].param, recs[0].new_tau)
        assert posterior(changed, Event("tampering", "true"), report_no_smoke) \
            == pytest.approx(0.65, abs=1e-6)

    def test_halved_delta_fails(self, alarm_net, report_no_smoke):
        constraint = example_11_constraint()
        for rec in solve(alarm_net, report_no_smoke, constraint):
            weaker = Recommendation(
                param=rec.param,
                current_tau=rec.current_tau,
                minimal_delta=rec.minimal_delta / 2,
                new_tau=rec.current_tau + rec.minimal_delta / 2,
                log_odds_distance=0.0,
                feasible_interval=rec.feasible_interval,
            )
            assert not verify(alarm_net, report_no_smoke, constraint,
                              weaker).satisfied


class TestSolveGeneral:
    def test_satisfied_constraint_yields_nothing(self, alarm_net,
                                                 report_no_smoke):
        c = Constraint(ConstraintKind.AT_LEAST, Event("tampering", "true"),
                       epsilon=0.10)
        assert constraint_margin(alarm_net, report_no_smoke, c) >= 0
        assert solve(alarm_net, report_no_smoke, c) == []

    def test_at_most_mirrors_at_least(self, alarm_net, report_no_smoke):
        c = Constraint(ConstraintKind.AT_MOST, Event("tampering", "true"),
                       epsilon=0.20)
        recs = solve(alarm_net, report_no_smoke, c)
        assert recs
        for rec in recs:
            result = verify(alarm_net, report_no_smoke, c, rec)
            assert result.satisfied
            changed = apply_change(alarm_net, rec.param, rec.new_tau)
            assert posterior(changed, Event("tampering", "true"),
                             report_no_smoke) <= 0.20 + 1e-9

    def test_ratio_constraint(self, alarm_net, report_no_smoke):
        c = Constraint(ConstraintKind.RATIO, Event("tampering", "true"),
                       Event("fire", "true"), epsilon=40.0)
        current = (posterior(alarm_net, Event("tampering", "true"), report_no_smoke)
                   / posterior(alarm_net, Event("fire", "true"), report_no_smoke))
        assert current < 40.0
        recs = solve(alarm_net, report_no_smoke, c)
        assert recs
        for rec in recs:
            assert verify(alarm_net, report_no_smoke, c, rec).satisfied
            changed = apply_change(alarm_net, rec.param, rec.new_tau)
            ratio = (posterior(changed, Event("tampering", "true"), report_no_smoke)
                     / posterior(changed, Event("fire", "true"), report_no_smoke))
            assert ratio >= 40.0 - 1e-6

    def test_constraint_validation(self):
        y = Event("a", "t")
        with pytest.raises(ValidationError):
            Constraint(ConstraintKind.DIFFERENCE, y, None, 0.1)
        with pytest.raises(ValidationError):
            Constraint(ConstraintKind.AT_LEAST, y, Event("b", "t"), 0.1)
        with pytest.raises(ValidationError):
            Constraint(ConstraintKind.RATIO, y, Event("b", "t"), -1.0)
        with pytest.raises(ValidationError):
            Constraint(ConstraintKind.AT_LEAST, y, epsilon=math.nan)

    def test_event_inside_evidence_rejected(self, alarm_net, report_no_smoke):
        c = Constraint(ConstraintKind.AT_LEAST, Event("report", "true"),
                       epsilon=0.5)
        with pytest.raises(ValidationError):
            solve(alarm_net, report_no_smoke, c)

    def test_zero_evidence_rejected(self):
        net = Network(
            (Variable("a", ("t", "f")), Variable("b", ("t", "f"))),
            (Cpt("a", ((0.0, 1.0),)), Cpt("b", ((0.5, 0.5),))))
        c = Constraint(ConstraintKind.AT_LEAST, Event("b", "t"), epsilon=0.9)
        with pytest.raises(ZeroEvidenceProbability):
            solve(net, {"a": "t"}, c)


# -- grid-search oracle -----------------------------------------------------

GRID = np.arange(1, 1000) / 1000.0


def grid_satisfaction(net, ref, evidence, constraint) -> np.ndarray:
    """Constraint satisfaction over GRID values of one parameter, from
    two enumeration-oracle evaluations per instantiation."""
    hi = apply_change(net, ref, 1.0)
    lo = apply_change(net, ref, 0.0)

    def affine(inst):
        a = enumerate_joint_oracle(hi, inst)
        b = enumerate_joint_oracle(lo, inst)
        return a * GRID + b * (1.0 - GRID)

    y = constraint.y
    p_e = affine(evidence)
    p_y = affine({**evidence, y.variable: y.state})
    eps = constraint.epsilon
    if constraint.kind is ConstraintKind.DIFFERENCE:
        z = constraint.z
        p_z = affine({**evidence, z.variable: z.state})
        ok = p_y - p_z - eps * p_e >= 0
    elif constraint.kind is ConstraintKind.RATIO:
        z = constraint.z
        p_z = affine({**evidence, z.variable: z.state})
        ok = p_y - eps * p_z >= 0
    elif constraint.kind is ConstraintKind.AT_LEAST:
        ok = p_y - eps * p_e >= 0
    else:
        ok = eps * p_e - p_y >= 0
    return ok & (p_e > 0)


def random_violated_instance(rng):
    net = random_network(rng, n_vars=int(rng.integers(3, 9)))
    evidence = random_instantiation(rng, net, max_vars=2)
    free = [v for v in net.variables if v.name not in evidence]
    kind = list(ConstraintKind)[int(rng.integers(4))]
    yv = free[int(rng.integers(len(free)))]
    y = Event(yv.name, yv.states[int(rng.integers(len(yv.states)))])
    q = posterior(net, y, evidence)
    if kind is ConstraintKind.AT_LEAST:
        c = Constraint(kind, y, epsilon=q + 0.2)
    elif kind is ConstraintKind.AT_MOST:
        c = Constraint(kind, y, epsilon=max(q - 0.2, 1e-6))
        if constraint_margin(net, evidence, c) >= 0:
            c = Constraint(kind, y, epsilon=q / 2)
    else:
        zv = free[int(rng.integers(len(free)))]
        z = Event(zv.name, zv.states[int(rng.integers(len(zv.states)))])
        if z == y:
            z = Event(zv.name, zv.states[(zv.states.index(z.state) + 1)
                                         % len(zv.states)])
        qz = posterior(net, z, evidence)
        if kind is ConstraintKind.DIFFERENCE:
            c = Constraint(kind, y, z, q - qz + 0.15)
        else:
            c = Constraint(kind, y, z, (q / qz) * 1.5 if qz > 0 else 2.0)
    if constraint_margin(net, evidence, c) >= 0:
        return None
    return net, evidence, c


def check_completeness_instance(net, evidence, constraint):
    """Solver and grid search must agree on which parameters can enforce
    the constraint, and on the minimal change within the grid pitch."""
    outcomes = analyze(net, evidence, constraint)
    for o in outcomes:
        if o.status is ParameterStatus.NON_TUNABLE:
            continue
        mask = grid_satisfaction(net, o.ref, evidence, constraint)
        if o.recommendation is not None:
            lo, hi = o.recommendation.feasible_interval
            strict = (GRID >= lo + 1e-9) & (GRID <= hi - 1e-9)
            loose = (GRID >= lo - 1e-9) & (GRID <= hi + 1e-9)
            if strict.any():
                assert mask.any(), \
                    f"solver feasible but grid found nothing for {o.ref}"
            if not loose.any():
                assert not mask.any(), \
                    f"solver interval misses the grid but grid satisfied {o.ref}"
            if mask.any():
                grid_delta = np.abs(GRID[mask] - o.current_tau).min()
                assert abs(grid_delta - abs(o.recommendation.minimal_delta)) \
                    <= 0.002
        else:
            assert not mask.any(), \
                f"grid enforces via {o.ref} but solver reported {o.status}"
            if o.status is ParameterStatus.IRRELEVANT:
                assert abs(o.slope) <= 1e-12


class TestCompletenessAgainstGrid:
    def test_random_instances(self):
        rng = np.random.default_rng(271828)
        done = 0
        while done < 12:
            instance = random_violated_instance(rng)
            if instance is None:
                continue
            check_completeness_instance(*instance)
            done += 1

    def test_fixture_instances(self, alarm_net, report_no_smoke,
                               smoke_no_report):
        check_completeness_instance(alarm_net, report_no_smoke,
                                    example_11_constraint())
        check_completeness_instance(alarm_net, smoke_no_report,
                                    example_21_constraint())


class TestSoundnessAndMinimality:
    def test_random_recommendations(self):
        rng = np.random.default_rng(31415)
        done = 0
        while done < 10:
            instance = random_violated_instance(rng)
            if instance is None:
                continue
            net, evidence, constraint = instance
            recs = solve(net, evidence, constraint)
            for rec in recs:
                result = verify(net, evidence, constraint, rec)
                assert result.satisfied and result.slack >= -1e-9
                # shrinking the change toward zero must break enforcement,
                # unless the recommendation binds at a domain boundary
                shrunk = abs(rec.minimal_delta) - 1e-4
                if shrunk <= 0:
                    continue
                direction = math.copysign(1.0, rec.minimal_delta)
                weaker = Recommendation(
                    param=rec.param, current_tau=rec.current_tau,
                    minimal_delta=direction * shrunk,
                    new_tau=rec.current_tau + direction * shrunk,
                    log_odds_distance=0.0,
                    feasible_interval=rec.feasible_interval)
                assert not verify(net, evidence, constraint, weaker).satisfied
            done += 1
