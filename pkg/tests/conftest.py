"""Shared fixtures and the pure-python reference oracle.

``brute_joint`` sums CPT products over explicitly enumerated worlds with
no numpy and no elimination: the slowest, most literal reading of the
joint distribution. It anchors the faster oracles, which in turn anchor
the engine.
"""

from __future__ import annotations

import pytest

from belief_tuner.network import Network, iter_assignments
from belief_tuner.sample_networks import fire_alarm


def brute_joint(net: Network, inst: dict[str, str]) -> float:
    total = 0.0
    names = tuple(v.name for v in net.variables)
    for world in iter_assignments(net, names):
        if any(world[k] != v for k, v in inst.items()):
            continue
        p = 1.0
        for var in net.variables:
            row = net.row_index(var.name,
                                {q: world[q] for q in var.parents})
            p *= net.cpt(var.name).rows[row][var.states.index(world[var.name])]
        total += p
    return total


@pytest.fixture(scope="session")
def alarm_net() -> Network:
    return fire_alarm()


@pytest.fixture(scope="session")
def report_no_smoke() -> dict[str, str]:
    return {"report": "true", "smoke": "false"}


@pytest.fixture(scope="session")
def smoke_no_report() -> dict[str, str]:
    return {"smoke": "true", "report": "false"}
