"""Seeded random networks for property tests and the selftest command."""

from __future__ import annotations

import numpy as np

from .network import Cpt, Network, Variable


def random_network(rng: np.random.Generator, n_vars: int = 8,
                   max_parents: int = 3, allow_multivalued: bool = True,
                   min_prob: float = 0.05) -> Network:
    """A random DAG with interior CPT entries.

    Parents are drawn from earlier variables, so the declaration order is
    topological. Entries are kept away from 0 and 1 (at least
    ``min_prob`` before normalization) so posteriors stay well defined
    under parameter sweeps.
    """
    variables = []
    cpts = []
    names = [f"v{i}" for i in range(n_vars)]
    n_states = {}
    for i, name in enumerate(names):
        k = int(rng.integers(2, 4)) if allow_multivalued and rng.random() < 0.3 else 2
        n_states[name] = k
        count = int(rng.integers(0, min(max_parents, i) + 1))
        parents = tuple(names[j] for j in sorted(
            rng.choice(i, size=count, replace=False))) if count else ()
        rows = []
        n_rows = int(np.prod([n_states[p] for p in parents])) if parents else 1
        for _ in range(n_rows):
            raw = rng.uniform(min_prob, 1.0, size=k)
            row = raw / raw.sum()
            rows.append(tuple(float(x) for x in row))
        states = tuple(f"s{j}" for j in range(k)) if k != 2 else ("true", "false")
        variables.append(Variable(name, states, parents))
        cpts.append(Cpt(name, tuple(rows)))
    return Network(tuple(variables), tuple(cpts))


def random_instantiation(rng: np.random.Generator, net: Network,
                         max_vars: int = 3,
                         exclude: set[str] | None = None) -> dict[str, str]:
    """A random partial instantiation over up to ``max_vars`` variables."""
    pool = [v for v in net.variables if not exclude or v.name not in exclude]
    count = int(rng.integers(0, min(max_vars, len(pool)) + 1))
    picked = rng.choice(len(pool), size=count, replace=False) if count else []
    out = {}
    for i in sorted(int(j) for j in picked):
        var = pool[i]
        out[var.name] = var.states[int(rng.integers(len(var.states)))]
    return out
