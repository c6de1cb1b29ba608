"""Networks bundled for demos and tests.

``fire_alarm`` is the six-variable alarm scenario: tampering or fire may
trigger the alarm, fire produces smoke, the alarm makes people leave,
and leaving prompts a report. All variables are binary with states
true/false.

``agreement_network`` is the minimal worst-case for derivative bounds:
two independent binary roots X and Y and a deterministic child E that is
true exactly when X and Y agree. Conditioning on E = true makes the
query Pr(y | e) exactly as sensitive to the prior of X as the
network-independent bound allows.
"""

from __future__ import annotations

from .network import Cpt, Network, Variable, serialize_network

_TF = ("true", "false")


def fire_alarm() -> Network:
    variables = (
        Variable("tampering", _TF),
        Variable("fire", _TF),
        Variable("alarm", _TF, ("fire", "tampering")),
        Variable("smoke", _TF, ("fire",)),
        Variable("leaving", _TF, ("alarm",)),
        Variable("report", _TF, ("leaving",)),
    )
    cpts = (
        Cpt("tampering", ((0.02, 0.98),)),
        Cpt("fire", ((0.01, 0.99),)),
        # rows: (fire, tampering) = (t,t), (t,f), (f,t), (f,f)
        Cpt("alarm", ((0.5, 0.5), (0.99, 0.01), (0.85, 0.15), (0.0001, 0.9999))),
        Cpt("smoke", ((0.9, 0.1), (0.01, 0.99))),
        Cpt("leaving", ((0.88, 0.12), (0.001, 0.999))),
        Cpt("report", ((0.75, 0.25), (0.01, 0.99))),
    )
    return Network(variables, cpts)


def fire_alarm_document() -> str:
    """The fixture in the canonical file format."""
    return serialize_network(fire_alarm())


def agreement_network(theta_x: float, theta_y: float) -> Network:
    """Binary roots X, Y and a child E with E = true iff X = Y."""
    variables = (
        Variable("X", _TF),
        Variable("Y", _TF),
        Variable("E", _TF, ("X", "Y")),
    )
    cpts = (
        Cpt("X", ((theta_x, 1.0 - theta_x),)),
        Cpt("Y", ((theta_y, 1.0 - theta_y),)),
        # rows: (X, Y) = (t,t), (t,f), (f,t), (f,f)
        Cpt("E", ((1.0, 0.0), (0.0, 1.0), (0.0, 1.0), (1.0, 0.0))),
    )
    return Network(variables, cpts)
