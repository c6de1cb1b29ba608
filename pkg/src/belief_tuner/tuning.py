"""Single-parameter changes that enforce a posterior constraint.

Joint probabilities are affine in every meta parameter, so the effect of
a change delta on a constraint reduces to one linear inequality
``margin >= delta * slope`` per parameter, where the margin is the
current shortfall of the constraint in joint-probability units and the
slope combines the per-parameter derivatives of the involved joints.
Solving that inequality over the admissible range of the parameter gives
either an empty set (the parameter cannot enforce the constraint) or an
interval whose nearest endpoint is the minimal change.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import NonTunableParameter, ValidationError, ZeroEvidenceProbability
from .inference import (Instantiation, family_marginals, family_table,
                        joint_prob)
from .network import (Event, MetaParameterRef, Network, apply_change,
                      list_meta_parameters)


class ConstraintKind(enum.Enum):
    DIFFERENCE = "difference"   # Pr(y|e) - Pr(z|e) >= eps
    RATIO = "ratio"             # Pr(y|e) / Pr(z|e) >= eps
    AT_LEAST = "at_least"       # Pr(y|e) >= eps
    AT_MOST = "at_most"         # Pr(y|e) <= eps


_TWO_EVENT_KINDS = (ConstraintKind.DIFFERENCE, ConstraintKind.RATIO)


@dataclass(frozen=True)
class Constraint:
    kind: ConstraintKind
    y: Event
    z: Event | None = None
    epsilon: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.epsilon):
            raise ValidationError("constraint threshold must be finite")
        if self.kind in _TWO_EVENT_KINDS and self.z is None:
            raise ValidationError(f"{self.kind.value} needs a second event")
        if self.kind not in _TWO_EVENT_KINDS and self.z is not None:
            raise ValidationError(f"{self.kind.value} takes a single event")
        if self.kind is ConstraintKind.RATIO and self.epsilon <= 0:
            raise ValidationError("ratio threshold must be positive")

    def describe(self) -> str:
        y = f"P({self.y.variable}={self.y.state})"
        if self.kind is ConstraintKind.AT_LEAST:
            return f"{y} >= {self.epsilon:g}"
        if self.kind is ConstraintKind.AT_MOST:
            return f"{y} <= {self.epsilon:g}"
        z = f"P({self.z.variable}={self.z.state})"
        op = "-" if self.kind is ConstraintKind.DIFFERENCE else "/"
        return f"{y} {op} {z} >= {self.epsilon:g}"


@dataclass(frozen=True)
class LinearCoefficients:
    """Slopes of Pr(e), Pr(y,e) and Pr(z,e) in one meta parameter."""

    evidence_slope: float
    y_slope: float
    z_slope: float | None = None


@dataclass(frozen=True)
class Recommendation:
    """One parameter change that enforces the constraint."""

    param: MetaParameterRef
    current_tau: float
    minimal_delta: float
    new_tau: float
    log_odds_distance: float
    feasible_interval: tuple[float, float]

    @property
    def saturates(self) -> bool:
        """True when applying the change parks the parameter at 0 or 1,
        making it non-tunable afterwards."""
        return self.new_tau in (0.0, 1.0)


class ParameterStatus(enum.Enum):
    RECOMMENDED = "recommended"    # a minimal enforcing change exists
    IRRELEVANT = "irrelevant"      # the constraint does not move with tau
    INFEASIBLE = "infeasible"      # moves, but no tau in [0, 1] enforces
    NON_TUNABLE = "non_tunable"    # tau currently at 0 or 1
    NOT_NEEDED = "not_needed"      # the constraint already holds


@dataclass(frozen=True)
class ParameterOutcome:
    ref: MetaParameterRef
    current_tau: float
    status: ParameterStatus
    slope: float | None = None
    recommendation: Recommendation | None = None


@dataclass(frozen=True)
class VerifyResult:
    satisfied: bool
    slack: float


def joint_slope(net: Network, inst: Instantiation, ref: MetaParameterRef) -> float:
    """Derivative of Pr(inst) with respect to one meta parameter.

    Pr(inst) is affine in tau, so this is the constant
    Pr(inst, x, u)/theta_x - Pr(inst, x_bar, u)/theta_x_bar computed from
    the family's joint marginal.
    """
    tau = net.parameter_value(ref)
    if not (0.0 < tau < 1.0):
        raise NonTunableParameter(
            f"{ref.describe()} equals {tau}; slope undefined at 0 or 1")
    table = family_table(net, inst, ref.variable)
    return _slope_from_table(net, table, ref, tau)


def _slope_from_table(net, table, ref: MetaParameterRef, tau: float) -> float:
    s = net.state_index(ref.variable, ref.state)
    row = net.row_index(ref.variable, ref.parent_instantiation)
    return float(table[s, row]) / tau - float(table[1 - s, row]) / (1.0 - tau)


def _extended(evidence: Instantiation, event: Event) -> dict[str, str]:
    if event.variable in evidence:
        raise ValidationError(
            f"constraint event {event.variable!r} appears in the evidence")
    return {**evidence, event.variable: event.state}


def constraint_margin(net: Network, evidence: Instantiation,
                      constraint: Constraint) -> float:
    """Current slack of the constraint in joint-probability units.

    Non-negative exactly when the constraint already holds. This is the
    quantity the linear solver drives to zero.
    """
    p_e = joint_prob(net, evidence)
    if p_e <= 0.0:
        raise ZeroEvidenceProbability("evidence has probability zero")
    p_ye = joint_prob(net, _extended(evidence, constraint.y))
    p_ze = (joint_prob(net, _extended(evidence, constraint.z))
            if constraint.z else None)
    return _margin(constraint, p_e, p_ye, p_ze)


def _margin(c: Constraint, p_e: float, p_ye: float, p_ze: float | None) -> float:
    if c.kind is ConstraintKind.DIFFERENCE:
        return p_ye - p_ze - c.epsilon * p_e
    if c.kind is ConstraintKind.RATIO:
        return p_ye - c.epsilon * p_ze
    if c.kind is ConstraintKind.AT_LEAST:
        return p_ye - c.epsilon * p_e
    return c.epsilon * p_e - p_ye  # AT_MOST


def _margin_slope(c: Constraint, co: LinearCoefficients) -> float:
    """Rate at which the margin DECREASES per unit of parameter change:
    the constraint holds after a change delta iff margin >= delta * slope."""
    if c.kind is ConstraintKind.DIFFERENCE:
        return -co.y_slope + co.z_slope + c.epsilon * co.evidence_slope
    if c.kind is ConstraintKind.RATIO:
        return -co.y_slope + c.epsilon * co.z_slope
    if c.kind is ConstraintKind.AT_LEAST:
        return -co.y_slope + c.epsilon * co.evidence_slope
    return co.y_slope - c.epsilon * co.evidence_slope  # AT_MOST


def parameter_log_odds(tau: float, new_tau: float) -> float:
    """Log-odds distance between two parameter values; infinite when the
    new value saturates at 0 or 1."""
    if not (0.0 < new_tau < 1.0):
        return math.inf
    return abs(math.log(new_tau / (1.0 - new_tau))
               - math.log(tau / (1.0 - tau)))


def analyze(net: Network, evidence: Instantiation,
            constraint: Constraint) -> list[ParameterOutcome]:
    """Classify every meta parameter against the constraint.

    Returns one outcome per parameter in declaration order. When the
    constraint already holds every tunable parameter comes back
    NOT_NEEDED; otherwise each is RECOMMENDED (with the minimal change),
    IRRELEVANT (the constraint expression does not move with it) or
    INFEASIBLE (no admissible value enforces the constraint).
    """
    p_e = joint_prob(net, evidence)
    if p_e <= 0.0:
        raise ZeroEvidenceProbability("evidence has probability zero")
    ext_y = _extended(evidence, constraint.y)
    p_ye = joint_prob(net, ext_y)
    if constraint.z is not None:
        ext_z = _extended(evidence, constraint.z)
        p_ze = joint_prob(net, ext_z)
    else:
        ext_z, p_ze = None, None

    margin = _margin(constraint, p_e, p_ye, p_ze)
    if margin >= 0.0:
        return [ParameterOutcome(
            e.ref, e.tau,
            ParameterStatus.NOT_NEEDED if e.tunable else ParameterStatus.NON_TUNABLE)
            for e in list_meta_parameters(net)]

    fm_e = family_marginals(net, evidence)
    fm_y = family_marginals(net, ext_y)
    fm_z = family_marginals(net, ext_z) if ext_z is not None else None

    outcomes = []
    for entry in list_meta_parameters(net):
        ref, tau = entry.ref, entry.tau
        if not entry.tunable:
            outcomes.append(ParameterOutcome(ref, tau, ParameterStatus.NON_TUNABLE))
            continue
        coeffs = LinearCoefficients(
            evidence_slope=_slope_from_table(net, fm_e[ref.variable], ref, tau),
            y_slope=_slope_from_table(net, fm_y[ref.variable], ref, tau),
            z_slope=(_slope_from_table(net, fm_z[ref.variable], ref, tau)
                     if fm_z is not None else None),
        )
        slope = _margin_slope(constraint, coeffs)
        if slope == 0.0:
            outcomes.append(ParameterOutcome(
                ref, tau, ParameterStatus.IRRELEVANT, slope))
            continue
        delta = margin / slope
        new_tau = tau + delta
        if new_tau < -1e-12 or new_tau > 1.0 + 1e-12:
            outcomes.append(ParameterOutcome(
                ref, tau, ParameterStatus.INFEASIBLE, slope))
            continue
        new_tau = min(1.0, max(0.0, new_tau))
        delta = new_tau - tau
        # The posterior must stay defined at the recommended endpoint.
        # When the evidence probability vanishes at the same point where
        # the joint-form inequality binds (both are affine in tau), the
        # posterior-space constraint is never actually met, so compare
        # against the rounding noise of the affine prediction rather
        # than against exact zero.
        p_e_new = p_e + coeffs.evidence_slope * delta
        noise = 1e-12 * (abs(p_e) + abs(coeffs.evidence_slope * delta))
        if p_e_new <= noise:
            outcomes.append(ParameterOutcome(
                ref, tau, ParameterStatus.INFEASIBLE, slope))
            continue
        interval = (0.0, new_tau) if slope > 0 else (new_tau, 1.0)
        rec = Recommendation(
            param=ref,
            current_tau=tau,
            minimal_delta=delta,
            new_tau=new_tau,
            log_odds_distance=parameter_log_odds(tau, new_tau),
            feasible_interval=interval,
        )
        outcomes.append(ParameterOutcome(
            ref, tau, ParameterStatus.RECOMMENDED, slope, rec))
    return outcomes


def solve(net: Network, evidence: Instantiation,
          constraint: Constraint) -> list[Recommendation]:
    """All single-parameter changes enforcing the constraint, one minimal
    change per parameter, sorted by ascending log-odds distance.

    Empty when the constraint already holds, and also when no single
    parameter can enforce it (use :func:`constraint_margin` to tell the
    two apart).
    """
    outcomes = analyze(net, evidence, constraint)
    recs = [(o.recommendation, i) for i, o in enumerate(outcomes)
            if o.recommendation is not None]
    recs.sort(key=lambda pair: (pair[0].log_odds_distance, pair[1]))
    return [r for r, _ in recs]


def verify(net: Network, evidence: Instantiation, constraint: Constraint,
           rec: Recommendation) -> VerifyResult:
    """Apply a recommendation and re-check the constraint by exact
    inference. The slack is reported in posterior units: the achieved
    constraint expression minus the threshold (or the reverse for
    AT_MOST; for RATIO it is Pr(y|e) - eps * Pr(z|e))."""
    changed = apply_change(net, rec.param, rec.new_tau)
    p_e = joint_prob(changed, evidence)
    if p_e <= 0.0:
        raise ZeroEvidenceProbability(
            "evidence has probability zero after the change")
    p_ye = joint_prob(changed, _extended(evidence, constraint.y))
    p_ze = (joint_prob(changed, _extended(evidence, constraint.z))
            if constraint.z else None)
    c = constraint
    if c.kind is ConstraintKind.DIFFERENCE:
        slack = (p_ye - p_ze) / p_e - c.epsilon
    elif c.kind is ConstraintKind.RATIO:
        slack = (p_ye - c.epsilon * p_ze) / p_e
    elif c.kind is ConstraintKind.AT_LEAST:
        slack = p_ye / p_e - c.epsilon
    else:
        slack = c.epsilon - p_ye / p_e
    return VerifyResult(satisfied=slack >= -1e-9, slack=slack)
