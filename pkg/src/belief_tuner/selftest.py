"""Randomized self-checks behind the ``selftest`` CLI subcommand.

Each suite cross-checks one computation path against an independent one
on seeded random networks: variable elimination against brute-force
enumeration, parse/serialize round trips, analytic query derivatives
against central finite differences, and the log-odds contraction of
queries under parameter changes.
"""

from __future__ import annotations

import math
import sys
from typing import TextIO

import numpy as np

from .bounds import analytic_query_derivative, log_odds_distance
from .inference import enumerate_joint_oracle, joint_prob, posterior
from .network import (Event, apply_change, list_meta_parameters,
                      parse_network, same_structure, serialize_network)
from .random_networks import random_instantiation, random_network


def _check_roundtrip(rng) -> int:
    for _ in range(25):
        net = random_network(rng, n_vars=int(rng.integers(1, 9)))
        again = parse_network(serialize_network(net))
        assert same_structure(net, again), "round trip changed the network"
    return 25


def _check_oracle(rng) -> int:
    for _ in range(40):
        net = random_network(rng, n_vars=int(rng.integers(2, 9)))
        inst = random_instantiation(rng, net)
        a = joint_prob(net, inst)
        b = enumerate_joint_oracle(net, inst)
        assert abs(a - b) <= 1e-10, f"VE {a} vs enumeration {b}"
    return 40


def _check_derivative(rng) -> int:
    checked = 0
    while checked < 25:
        net = random_network(rng, n_vars=int(rng.integers(3, 8)),
                             allow_multivalued=False)
        params = [e for e in list_meta_parameters(net) if e.tunable]
        entry = params[int(rng.integers(len(params)))]
        evidence = random_instantiation(rng, net, max_vars=2)
        free = [v.name for v in net.variables if v.name not in evidence]
        if not free or joint_prob(net, evidence) <= 1e-12:
            continue
        yvar = free[int(rng.integers(len(free)))]
        y = Event(yvar, net.variable(yvar).states[0])
        exact = analytic_query_derivative(net, y, evidence, entry.ref)
        h = 1e-6
        up = posterior(apply_change(net, entry.ref, entry.tau + h), y, evidence)
        down = posterior(apply_change(net, entry.ref, entry.tau - h), y, evidence)
        fd = (up - down) / (2 * h)
        assert abs(exact - fd) <= 1e-5 * max(1.0, abs(exact)), \
            f"derivative {exact} vs finite difference {fd}"
        checked += 1
    return checked


def _check_log_odds_contraction(rng) -> int:
    checked = 0
    while checked < 60:
        net = random_network(rng, n_vars=int(rng.integers(3, 8)),
                             allow_multivalued=False)
        params = [e for e in list_meta_parameters(net) if e.tunable]
        entry = params[int(rng.integers(len(params)))]
        evidence = random_instantiation(rng, net, max_vars=2)
        free = [v.name for v in net.variables if v.name not in evidence]
        if not free or joint_prob(net, evidence) <= 1e-12:
            continue
        yvar = free[int(rng.integers(len(free)))]
        y = Event(yvar, net.variable(yvar).states[0])
        new_tau = float(rng.uniform(0.02, 0.98))
        before = posterior(net, y, evidence)
        after = posterior(apply_change(net, entry.ref, new_tau), y, evidence)
        if not (0 < before < 1 and 0 < after < 1):
            continue
        lhs = log_odds_distance(before, after)
        rhs = log_odds_distance(entry.tau, new_tau)
        assert lhs <= rhs + 1e-9, f"query moved {lhs} > parameter {rhs}"
        checked += 1
    return checked


_SUITES = (
    ("parse/serialize round trip", _check_roundtrip),
    ("elimination vs enumeration", _check_oracle),
    ("derivative vs finite differences", _check_derivative),
    ("log-odds contraction", _check_log_odds_contraction),
)


def run_selftest(seed: int = 0, out: TextIO = sys.stdout) -> bool:
    ok = True
    for name, suite in _SUITES:
        rng = np.random.default_rng(seed)
        try:
            cases = suite(rng)
        except AssertionError as exc:
            print(f"FAIL {name}: {exc}", file=out)
            ok = False
        else:
            print(f"ok {name} ({cases} cases)", file=out)
    return ok
