"""Tuning and sensitivity bounds for discrete belief networks.

The package answers two questions about a network, fixed evidence and a
posterior query:

* which single-parameter changes enforce a given constraint on the
  query, and what is the minimal magnitude of each (``tuning``);
* how far can the query move at all under a parameter change, measured
  in log-odds, without running inference (``bounds``).

Exact inference (``inference``) and the immutable network model
(``network``) support both. A command line (``cli``) and an HTTP service
(``service``) expose the same operations.
"""

from .bounds import (EnvelopePoint, QueryInterval, analytic_query_derivative,
                     derivative_bound, envelope, exact_root_change,
                     log_odds_distance, param_change_lower_bound,
                     query_interval, sensitivity_factor)
from .errors import (BeliefTunerError, FormatError, NonTunableParameter,
                     StateSpaceTooLarge, UnknownElement, ValidationError,
                     ZeroEvidenceProbability)
from .inference import (enumerate_joint_oracle, family_marginals,
                        family_table, joint_prob, posterior)
from .network import (Cpt, Event, MetaParameterRef, Network, ParameterEntry,
                      Variable, apply_change, list_meta_parameters,
                      parse_network, same_structure, serialize_network)
from .querylang import parse_constraint, parse_evidence
from .sample_networks import agreement_network, fire_alarm, fire_alarm_document
from .tuning import (Constraint, ConstraintKind, LinearCoefficients,
                     ParameterOutcome, ParameterStatus, Recommendation,
                     VerifyResult, analyze, constraint_margin, joint_slope,
                     solve, verify)

__version__ = "0.1.0"

__all__ = [
    "BeliefTunerError", "Constraint", "ConstraintKind", "Cpt",
    "EnvelopePoint", "Event", "FormatError", "LinearCoefficients",
    "MetaParameterRef", "Network", "NonTunableParameter", "ParameterEntry",
    "ParameterOutcome", "ParameterStatus", "QueryInterval", "Recommendation",
    "StateSpaceTooLarge", "UnknownElement", "ValidationError", "Variable",
    "VerifyResult", "ZeroEvidenceProbability", "agreement_network",
    "analytic_query_derivative", "analyze", "apply_change",
    "constraint_margin", "derivative_bound", "enumerate_joint_oracle",
    "envelope", "exact_root_change", "family_marginals", "family_table",
    "fire_alarm", "fire_alarm_document", "joint_prob", "joint_slope",
    "list_meta_parameters", "log_odds_distance", "param_change_lower_bound",
    "parse_constraint", "parse_evidence", "parse_network", "posterior",
    "query_interval", "same_structure", "sensitivity_factor",
    "serialize_network", "solve", "verify",
]
