"""Analytic sensitivity bounds for posterior queries.

Everything here is closed form. The central quantity is the log-odds
distance |ln O(p') - ln O(p)| between two probabilities: the change any
posterior query can undergo, measured this way, never exceeds the
log-odds distance applied to a (binary) network parameter. That single
inequality yields guaranteed query intervals, constant-time lower bounds
on required parameter changes, an exact solution for root priors, and
permissible-change envelopes as a function of the current parameter
value.

Alongside these, the derivative of a query with respect to a meta
parameter is available exactly (a per-network closed form over family
marginals) and as a network-independent bound q(1-q)/(p(1-p)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NonTunableParameter, ValidationError, ZeroEvidenceProbability
from .inference import Instantiation, family_table, joint_prob
from .network import Event, MetaParameterRef, Network


@dataclass(frozen=True)
class QueryInterval:
    """Guaranteed range of a query after a bounded parameter change."""

    low: float
    high: float
    degenerate: bool = False

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.low - tol <= value <= self.high + tol


@dataclass(frozen=True)
class EnvelopePoint:
    """Permissible parameter changes at one current value p.

    ``outer`` deltas keep the query at or below the band's upper edge,
    ``inner`` deltas keep it at or above the lower edge. The change that
    is safe against both edges is the smaller magnitude per direction.
    """

    p: float
    delta_plus_outer: float
    delta_plus_inner: float
    delta_minus_outer: float
    delta_minus_inner: float

    @property
    def safe_delta_plus(self) -> float:
        return min(self.delta_plus_outer, self.delta_plus_inner)

    @property
    def safe_delta_minus(self) -> float:
        return min(self.delta_minus_outer, self.delta_minus_inner)


def _check_interior(value: float, what: str) -> None:
    if not (0.0 < value < 1.0):
        raise ValidationError(f"{what} must lie strictly inside (0, 1), got {value!r}")


def log_odds(p: float) -> float:
    _check_interior(p, "probability")
    return math.log(p / (1.0 - p))


def logistic(x: float) -> float:
    # saturates cleanly at the float boundaries for large |x|
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def log_odds_distance(p: float, p_new: float) -> float:
    """|ln O(p_new) - ln O(p)|, the distance under which query changes
    are bounded by parameter changes."""
    return abs(log_odds(p_new) - log_odds(p))


def derivative_bound(q: float, p: float) -> float:
    """Network-independent bound on |d Pr(y|e) / d tau| for a binary
    variable with Pr(x|u) = p and query value q = Pr(y|e)."""
    _check_interior(p, "parameter value")
    if not (0.0 <= q <= 1.0):
        raise ValidationError(f"query value {q!r} outside [0, 1]")
    return q * (1.0 - q) / (p * (1.0 - p))


def sensitivity_factor(q: float, p: float) -> float:
    """Tight factor bounding the relative query change per relative
    parameter change, for infinitesimal changes: |dq/q| <= factor * |dt/t|.

    Requires p <= 1/2 (otherwise re-normalize to the complement
    parameter); the factor never exceeds 2 on that range.
    """
    if not (0.0 < p <= 0.5):
        raise ValidationError(
            f"parameter value {p!r} outside (0, 0.5]; "
            "use the complement state's parameter instead")
    if not (0.0 <= q <= 1.0):
        raise ValidationError(f"query value {q!r} outside [0, 1]")
    return (1.0 - q) / (1.0 - p)


def query_interval(q: float, budget: float) -> QueryInterval:
    """Guaranteed interval for a query currently at q, when the applied
    parameter change has log-odds distance at most ``budget``.

    A query at 0 or 1 cannot move at all; the interval then degenerates
    to the point itself and is flagged.
    """
    if budget < 0:
        raise ValidationError(f"budget must be non-negative, got {budget!r}")
    if q in (0.0, 1.0):
        return QueryInterval(q, q, degenerate=True)
    _check_interior(q, "query value")
    if math.isinf(budget):
        return QueryInterval(0.0, 1.0)
    lo = log_odds(q)
    return QueryInterval(logistic(lo - budget), logistic(lo + budget))


def param_change_lower_bound(q: float, q_target: float,
                             p: float) -> tuple[float, float]:
    """Constant-time lower bound on the parameter change required to move
    a query from q to q_target.

    Returns (budget, p_new): the log-odds distance the query must travel,
    and the parameter value at exactly that distance from p in the
    target's direction. No smaller parameter change can achieve the
    query change, so |p_new - p| underestimates the true minimal change.
    """
    _check_interior(p, "parameter value")
    _check_interior(q, "query value")
    _check_interior(q_target, "target query value")
    budget = log_odds_distance(q, q_target)
    if q_target == q:
        return 0.0, p
    sign = 1.0 if q_target > q else -1.0
    return budget, logistic(log_odds(p) + sign * budget)


def exact_root_change(prior: float, posterior: float,
                      target_posterior: float) -> float:
    """New prior for a root variable that moves its own posterior to the
    target exactly.

    For a root X and query Pr(x|e), the ratio O(x|e)/O(x) does not depend
    on the prior, so the required prior solves
    O(new)/O(prior) = O(target)/O(posterior) in closed form. No search
    over inference coefficients is needed in this special case.
    """
    _check_interior(prior, "prior")
    _check_interior(posterior, "posterior")
    _check_interior(target_posterior, "target posterior")
    shift = log_odds(target_posterior) - log_odds(posterior)
    return logistic(log_odds(prior) + shift)


def analytic_query_derivative(net: Network, y: Event, evidence: Instantiation,
                              ref: MetaParameterRef) -> float:
    """Exact d Pr(y|e) / d tau for one meta parameter.

    Closed form over the family's posterior marginals:

        [ Pr(y,x,u|e) - Pr(y|e) Pr(x,u|e)
          - p (Pr(y,u|e) - Pr(y|e) Pr(u|e)) ] / (p (1-p))

    with p the current parameter value. Always within the
    :func:`derivative_bound` in magnitude.
    """
    tau = net.parameter_value(ref)
    if not (0.0 < tau < 1.0):
        raise NonTunableParameter(
            f"{ref.describe()} equals {tau}; derivative undefined at 0 or 1")
    p_e = joint_prob(net, evidence)
    if p_e <= 0.0:
        raise ZeroEvidenceProbability("evidence has probability zero")
    if y.variable in evidence:
        raise ValidationError(
            f"query variable {y.variable!r} appears in the evidence")

    s = net.state_index(ref.variable, ref.state)
    row = net.row_index(ref.variable, ref.parent_instantiation)
    table_e = family_table(net, evidence, ref.variable)
    table_ye = family_table(net, {**evidence, y.variable: y.state}, ref.variable)

    q = float(table_ye.sum()) / p_e             # Pr(y | e)
    p_xu = float(table_e[s, row]) / p_e         # Pr(x, u | e)
    p_yxu = float(table_ye[s, row]) / p_e       # Pr(y, x, u | e)
    p_u = float(table_e[:, row].sum()) / p_e    # Pr(u | e)
    p_yu = float(table_ye[:, row].sum()) / p_e  # Pr(y, u | e)

    return (p_yxu - q * p_xu - tau * (p_yu - q * p_u)) / (tau * (1.0 - tau))


def envelope(q0: float, band_low: float, band_high: float,
             grid: list[float]) -> list[EnvelopePoint]:
    """Permissible-change envelopes for keeping a query inside a band.

    For each current parameter value p in ``grid``, the outer deltas
    exhaust the log-odds budget to the band's upper edge and the inner
    deltas the budget to the lower edge; each is solved in closed form
    via the logistic transform, so re-checking any emitted delta against
    its budget with :func:`log_odds_distance` is exact.
    """
    _check_interior(q0, "query value")
    _check_interior(band_low, "band edge")
    _check_interior(band_high, "band edge")
    if not (band_low <= q0 <= band_high):
        raise ValidationError(
            f"band [{band_low}, {band_high}] must contain the query {q0}")
    budget_outer = log_odds_distance(q0, band_high)
    budget_inner = log_odds_distance(q0, band_low)
    points = []
    for p in grid:
        _check_interior(p, "grid value")
        lo = log_odds(p)
        points.append(EnvelopePoint(
            p=p,
            delta_plus_outer=logistic(lo + budget_outer) - p,
            delta_plus_inner=logistic(lo + budget_inner) - p,
            delta_minus_outer=p - logistic(lo - budget_outer),
            delta_minus_inner=p - logistic(lo - budget_inner),
        ))
    return points
