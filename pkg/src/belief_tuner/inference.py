"""Exact inference by variable elimination.

Joint probabilities, posteriors, and per-family joint marginals
Pr(i, x, u) for every family (X, U) of the network. The family marginals
are what the tuning machinery consumes: three calls (for e, for y+e and
for z+e) provide every quantity the linear constraint solver needs.

Variables are eliminated in a min-fill order computed on the evidence-
reduced factor graph. Probabilities are plain 64-bit floats; desk-scale
networks do not underflow.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .errors import StateSpaceTooLarge, UnknownElement, ZeroEvidenceProbability
from .network import Event, Network

Instantiation = Mapping[str, str]

_ORACLE_CELL_LIMIT = 2 ** 24


class _Factor:
    """A table over an ordered tuple of variables."""

    __slots__ = ("vars", "table")

    def __init__(self, vars: tuple[str, ...], table: np.ndarray):
        self.vars = vars
        self.table = table


def _check_instantiation(net: Network, inst: Instantiation) -> dict[str, int]:
    """Map an instantiation to state indices, rejecting unknown names."""
    out = {}
    for name, state in inst.items():
        out[name] = net.state_index(name, state)
    return out


def _family_factors(net: Network, observed: dict[str, int]) -> list[_Factor]:
    """One factor per family, with observed variables sliced out."""
    factors = []
    for var in net.variables:
        shape = tuple(len(net.variable(p).states) for p in var.parents) \
            + (len(var.states),)
        table = np.asarray(net.cpt(var.name).rows, dtype=float).reshape(shape)
        names = var.parents + (var.name,)
        keep_names, idx = [], []
        for name in names:
            if name in observed:
                idx.append(observed[name])
            else:
                keep_names.append(name)
                idx.append(slice(None))
        factors.append(_Factor(tuple(keep_names), table[tuple(idx)]))
    return factors


def _multiply(a: _Factor, b: _Factor, rank: dict[str, int]) -> _Factor:
    merged = tuple(sorted(set(a.vars) | set(b.vars), key=rank.__getitem__))
    return _Factor(merged, _expand(a, merged) * _expand(b, merged))


def _expand(f: _Factor, merged: tuple[str, ...]) -> np.ndarray:
    present = [v for v in merged if v in f.vars]
    table = f.table.transpose([f.vars.index(v) for v in present])
    shape = tuple(table.shape[present.index(v)] if v in f.vars else 1
                  for v in merged)
    return table.reshape(shape)


def _sum_out(f: _Factor, name: str) -> _Factor:
    axis = f.vars.index(name)
    return _Factor(f.vars[:axis] + f.vars[axis + 1:], f.table.sum(axis=axis))


def _min_fill_order(scopes: list[set[str]], to_eliminate: set[str],
                    rank: dict[str, int]) -> list[str]:
    # Greedy: repeatedly remove the variable whose elimination adds the
    # fewest edges to the interaction graph; ties break on declaration order.
    neighbors: dict[str, set[str]] = {}
    for clique in scopes:
        for v in clique:
            neighbors.setdefault(v, set()).update(clique - {v})
    order = []
    remaining = set(to_eliminate)
    while remaining:
        best, best_cost = None, None
        for v in sorted(remaining, key=rank.__getitem__):
            around = list(neighbors[v])
            cost = sum(1
                       for i in range(len(around))
                       for j in range(i + 1, len(around))
                       if around[j] not in neighbors[around[i]])
            if best_cost is None or cost < best_cost:
                best, best_cost = v, cost
        order.append(best)
        remaining.discard(best)
        around = neighbors.pop(best)
        for u in around:
            neighbors[u] |= around - {u}
            neighbors[u].discard(best)
    return order


def _eliminate_down_to(net: Network, factors: list[_Factor],
                       keep: set[str]) -> _Factor:
    """Multiply/sum-out until only ``keep`` variables remain, then combine."""
    rank = {v.name: i for i, v in enumerate(net.variables)}
    in_scope = set().union(*(f.vars for f in factors)) if factors else set()
    order = _min_fill_order([set(f.vars) for f in factors],
                            in_scope - keep, rank)
    work = list(factors)
    for name in order:
        bucket = [f for f in work if name in f.vars]
        work = [f for f in work if name not in f.vars]
        prod = bucket[0]
        for f in bucket[1:]:
            prod = _multiply(prod, f, rank)
        work.append(_sum_out(prod, name))
    result = _Factor((), np.float64(1.0))
    for f in work:
        result = _multiply(result, f, rank)
    return result


def joint_prob(net: Network, inst: Instantiation) -> float:
    """Exact probability of a (partial) instantiation."""
    observed = _check_instantiation(net, inst)
    factors = _family_factors(net, observed)
    return float(_eliminate_down_to(net, factors, set()).table)


def posterior(net: Network, event: Event, evidence: Instantiation) -> float:
    """Exact Pr(event | evidence); the evidence must be possible."""
    if event.variable in evidence:
        raise UnknownElement(
            f"query variable {event.variable!r} appears in the evidence")
    p_e = joint_prob(net, evidence)
    if p_e <= 0.0:
        raise ZeroEvidenceProbability(
            "evidence has probability zero; the posterior is undefined")
    p_ye = joint_prob(net, {**evidence, event.variable: event.state})
    return p_ye / p_e


def family_table(net: Network, inst: Instantiation, name: str) -> np.ndarray:
    """Joint marginal of one family: table[s, r] = Pr(inst, X=s, U=row r).

    Shape is (state count of X, CPT row count of X); rows follow the CPT
    row order. Cells that contradict the instantiation are zero.
    """
    observed = _check_instantiation(net, inst)
    var = net.variable(name)
    members = (name,) + var.parents
    keep = {m for m in members if m not in observed}
    reduced = _eliminate_down_to(net, _family_factors(net, observed), keep)

    n_states = len(var.states)
    n_rows = len(net.cpt(name).rows)
    out = np.zeros((n_states, n_rows))
    for r in range(n_rows):
        assignment = net.row_assignment(name, r)
        if any(p in inst and inst[p] != s for p, s in assignment.items()):
            continue
        for s in range(n_states):
            if name in inst and inst[name] != var.states[s]:
                continue
            coords = []
            for v in reduced.vars:
                coords.append(s if v == name
                              else net.state_index(v, assignment[v]))
            out[s, r] = reduced.table[tuple(coords)]
    return out


def family_marginals(net: Network, inst: Instantiation) -> dict[str, np.ndarray]:
    """Per-family joint marginals Pr(inst, x, u) for every variable.

    Each table sums to Pr(inst): the cells partition the instantiation's
    probability mass over the family's joint states.
    """
    return {v.name: family_table(net, inst, v.name) for v in net.variables}


def enumerate_joint_oracle(net: Network, inst: Instantiation) -> float:
    """Pr(inst) by brute force: the defining sum over all complete worlds.

    Multiplies every CPT over the full state space (observed axes pinned)
    and sums, with no elimination ordering or intermediate marginals.
    Kept as an independent cross-check for the variable-elimination path;
    guarded against blowing up on large state spaces.
    """
    observed = _check_instantiation(net, inst)
    cells = 1
    for var in net.variables:
        cells *= len(var.states)
        if cells > _ORACLE_CELL_LIMIT:
            raise StateSpaceTooLarge(
                f"joint state space exceeds {_ORACLE_CELL_LIMIT} worlds")
    free = [v.name for v in net.variables if v.name not in observed]
    axis = {name: i for i, name in enumerate(free)}
    total = np.ones(tuple(len(net.variable(name).states) for name in free))
    for var in net.variables:
        shape = tuple(len(net.variable(p).states) for p in var.parents) \
            + (len(var.states),)
        table = np.asarray(net.cpt(var.name).rows, dtype=float).reshape(shape)
        idx, out_axes = [], []
        for name in var.parents + (var.name,):
            if name in observed:
                idx.append(observed[name])
            else:
                idx.append(slice(None))
                out_axes.append(axis[name])
        sliced = table[tuple(idx)]
        # transpose surviving axes into free-variable order, then broadcast
        perm = sorted(range(len(out_axes)), key=out_axes.__getitem__)
        sliced = sliced.transpose(perm)
        expanded = [1] * len(free)
        for pos, i in enumerate(perm):
            expanded[out_axes[i]] = sliced.shape[pos]
        total = total * sliced.reshape(expanded)
    return float(total.sum())
