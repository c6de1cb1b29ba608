"""Discrete belief-network data model.

A network is an immutable value: variables with ordered state lists, a
conditional probability table per variable, and a version stamp that is
bumped on every parameter change. CPT rows are ordered with the LAST
parent's state index varying fastest, and each row lists one probability
per owner state in declared state order.

Binary variables expose meta parameters: a single knob tau that sets the
probability of a distinguished state to tau and of the complement state
to 1 - tau, so a row always keeps summing to one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping

from .errors import FormatError, NonTunableParameter, UnknownElement, ValidationError

ROW_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Variable:
    name: str
    states: tuple[str, ...]
    parents: tuple[str, ...] = ()

    @property
    def is_binary(self) -> bool:
        return len(self.states) == 2


@dataclass(frozen=True)
class Cpt:
    """One probability row per parent instantiation, last parent fastest."""

    owner: str
    rows: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class Event:
    """A single variable/state pair, e.g. the query event of a constraint."""

    variable: str
    state: str


@dataclass(frozen=True)
class MetaParameterRef:
    """Identifies one tunable knob: a binary variable, its distinguished
    state, and a complete parent instantiation.

    The parent instantiation is stored sorted by parent name so that two
    refs describing the same knob compare equal regardless of how they
    were built.
    """

    variable: str
    state: str
    parent_states: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parent_states",
                           tuple(sorted(self.parent_states)))

    @classmethod
    def make(cls, variable: str, state: str,
             parents: Mapping[str, str] | None = None) -> "MetaParameterRef":
        return cls(variable, state, tuple((parents or {}).items()))

    @property
    def parent_instantiation(self) -> dict[str, str]:
        return dict(self.parent_states)

    def describe(self) -> str:
        if not self.parent_states:
            return f"P({self.variable}={self.state})"
        cond = ", ".join(f"{p}={s}" for p, s in self.parent_states)
        return f"P({self.variable}={self.state} | {cond})"


@dataclass(frozen=True)
class ParameterEntry:
    """A meta parameter together with its current value."""

    ref: MetaParameterRef
    tau: float

    @property
    def tunable(self) -> bool:
        return 0.0 < self.tau < 1.0


@dataclass(frozen=True)
class Network:
    variables: tuple[Variable, ...]
    cpts: tuple[Cpt, ...]
    version: int = 0
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index",
                           {v.name: i for i, v in enumerate(self.variables)})
        _validate(self)

    # -- lookups ---------------------------------------------------------

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def variable(self, name: str) -> Variable:
        try:
            return self.variables[self._index[name]]
        except KeyError:
            raise UnknownElement(f"unknown variable {name!r}") from None

    def cpt(self, name: str) -> Cpt:
        return self.cpts[self.declaration_index(name)]

    def declaration_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownElement(f"unknown variable {name!r}") from None

    def state_index(self, name: str, state: str) -> int:
        var = self.variable(name)
        try:
            return var.states.index(state)
        except ValueError:
            raise UnknownElement(
                f"variable {name!r} has no state {state!r} "
                f"(states are {list(var.states)})") from None

    def row_index(self, name: str, assignment: Mapping[str, str]) -> int:
        """Row of ``name``'s CPT selected by a complete parent assignment."""
        var = self.variable(name)
        extra = set(assignment) - set(var.parents)
        if extra:
            raise ValidationError(
                f"{sorted(extra)} are not parents of {name!r}")
        idx = 0
        for parent in var.parents:
            if parent not in assignment:
                raise ValidationError(
                    f"parent instantiation for {name!r} misses {parent!r}")
            idx = idx * len(self.variable(parent).states) \
                + self.state_index(parent, assignment[parent])
        return idx

    def row_assignment(self, name: str, row: int) -> dict[str, str]:
        """Inverse of :meth:`row_index`."""
        var = self.variable(name)
        out: dict[str, str] = {}
        for parent in reversed(var.parents):
            states = self.variable(parent).states
            row, s = divmod(row, len(states))
            out[parent] = states[s]
        return {p: out[p] for p in var.parents}

    def parameter_value(self, ref: MetaParameterRef) -> float:
        """Current tau of a meta parameter."""
        var = self.variable(ref.variable)
        if not var.is_binary:
            raise NonTunableParameter(
                f"{ref.variable!r} has {len(var.states)} states; "
                "meta parameters exist for binary variables only")
        s = self.state_index(ref.variable, ref.state)
        row = self.row_index(ref.variable, ref.parent_instantiation)
        return self.cpt(ref.variable).rows[row][s]


def _validate(net: Network) -> None:
    if len(net.variables) != len(net.cpts):
        raise ValidationError("one CPT required per variable")
    names = [v.name for v in net.variables]
    if len(set(names)) != len(names):
        dup = sorted({n for n in names if names.count(n) > 1})
        raise ValidationError(f"duplicate variable names {dup}")
    for var, cpt in zip(net.variables, net.cpts):
        if cpt.owner != var.name:
            raise ValidationError(
                f"CPT owner {cpt.owner!r} does not match variable {var.name!r}")
        if len(var.states) < 2:
            raise ValidationError(f"variable {var.name!r} needs >= 2 states")
        if len(set(var.states)) != len(var.states):
            raise ValidationError(f"variable {var.name!r} repeats a state label")
        for parent in var.parents:
            if parent not in net:
                raise ValidationError(
                    f"variable {var.name!r} names missing parent {parent!r}")
        expected_rows = 1
        for parent in var.parents:
            expected_rows *= len(net.variable(parent).states)
        if len(cpt.rows) != expected_rows:
            raise ValidationError(
                f"CPT of {var.name!r} has {len(cpt.rows)} rows, "
                f"expected {expected_rows}")
        for r, row in enumerate(cpt.rows):
            if len(row) != len(var.states):
                raise ValidationError(
                    f"CPT of {var.name!r}, row {r}: {len(row)} entries "
                    f"for {len(var.states)} states")
            for p in row:
                if not (0.0 <= p <= 1.0):
                    raise ValidationError(
                        f"CPT of {var.name!r}, row {r}: entry {p!r} "
                        "outside [0, 1]")
            total = math.fsum(row)
            if abs(total - 1.0) > ROW_SUM_TOL:
                raise ValidationError(
                    f"CPT of {var.name!r}, row {r} sums to {total!r}, not 1")
    cycle = _find_cycle(net)
    if cycle:
        raise ValidationError("parent graph has a cycle: " + " -> ".join(cycle))


def _find_cycle(net: Network) -> list[str] | None:
    # Depth-first search over parent edges; returns a closed walk if found.
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v.name: WHITE for v in net.variables}
    stack: list[str] = []

    def visit(name: str) -> list[str] | None:
        color[name] = GRAY
        stack.append(name)
        for parent in net.variable(name).parents:
            if color[parent] == GRAY:
                i = stack.index(parent)
                return stack[i:] + [parent]
            if color[parent] == WHITE:
                found = visit(parent)
                if found:
                    return found
        stack.pop()
        color[name] = BLACK
        return None

    for v in net.variables:
        if color[v.name] == WHITE:
            found = visit(v.name)
            if found:
                return found
    return None


# -- canonical document format -------------------------------------------

_VARIABLE_FIELDS = ("name", "states", "parents", "cpt")


def parse_network(text: str) -> Network:
    """Parse a canonical-format document into a validated :class:`Network`.

    The document is a single JSON object ``{"variables": [...]}`` where
    each entry carries exactly the fields name, states, parents and cpt.
    Unknown fields are rejected.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"syntax error: {exc.msg}",
                          line=exc.lineno, column=exc.colno) from None
    if not isinstance(doc, dict):
        raise FormatError("document root must be an object")
    unknown = set(doc) - {"variables"}
    if unknown:
        raise FormatError(f"unknown document field {sorted(unknown)[0]!r}")
    if "variables" not in doc:
        raise FormatError("document misses the 'variables' field")
    if not isinstance(doc["variables"], list):
        raise FormatError("'variables' must be an array")

    variables: list[Variable] = []
    cpts: list[Cpt] = []
    for i, entry in enumerate(doc["variables"]):
        if not isinstance(entry, dict):
            raise FormatError(f"variable #{i} is not an object")
        unknown = set(entry) - set(_VARIABLE_FIELDS)
        if unknown:
            raise FormatError(
                f"variable #{i}: unknown field {sorted(unknown)[0]!r}")
        missing = set(_VARIABLE_FIELDS) - set(entry)
        if missing:
            raise FormatError(
                f"variable #{i}: missing field {sorted(missing)[0]!r}")
        name = entry["name"]
        if not isinstance(name, str) or not name:
            raise FormatError(f"variable #{i}: name must be a non-empty string")
        states = _string_list(entry["states"], f"variable {name!r}: states")
        parents = _string_list(entry["parents"], f"variable {name!r}: parents")
        rows = _cpt_rows(entry["cpt"], name)
        variables.append(Variable(name, states, parents))
        cpts.append(Cpt(name, rows))
    return Network(tuple(variables), tuple(cpts))


def _string_list(value, what: str) -> tuple[str, ...]:
    if not isinstance(value, list) or any(not isinstance(s, str) for s in value):
        raise FormatError(f"{what} must be an array of strings")
    return tuple(value)


def _cpt_rows(value, name: str) -> tuple[tuple[float, ...], ...]:
    if not isinstance(value, list):
        raise FormatError(f"variable {name!r}: cpt must be an array of rows")
    rows = []
    for r, row in enumerate(value):
        if not isinstance(row, list):
            raise FormatError(f"variable {name!r}: cpt row {r} is not an array")
        for x in row:
            # bool is an int subclass; JSON true/false are not numbers here
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise FormatError(
                    f"variable {name!r}: cpt row {r} holds a non-number")
        rows.append(tuple(float(x) for x in row))
    return tuple(rows)


def serialize_network(net: Network) -> str:
    """Emit the canonical document; parse(serialize(n)) reproduces n."""
    doc = {"variables": [
        {
            "name": v.name,
            "states": list(v.states),
            "parents": list(v.parents),
            "cpt": [list(row) for row in net.cpt(v.name).rows],
        }
        for v in net.variables
    ]}
    return json.dumps(doc, indent=2) + "\n"


def same_structure(a: Network, b: Network, tol: float = 1e-12) -> bool:
    """Field-by-field equality ignoring the version stamp."""
    if a.variables != b.variables:
        return False
    for va in a.variables:
        for ra, rb in zip(a.cpt(va.name).rows, b.cpt(va.name).rows):
            if any(abs(x - y) > tol for x, y in zip(ra, rb)):
                return False
    return True


# -- meta parameters -------------------------------------------------------

def list_meta_parameters(net: Network) -> list[ParameterEntry]:
    """Every meta parameter of the network, in declaration order.

    One entry per (binary variable, parent instantiation); the
    distinguished state is the variable's first declared state. Entries
    whose current value sits at 0 or 1 are included but not tunable.
    Variables with three or more states contribute nothing.
    """
    entries = []
    for var in net.variables:
        if not var.is_binary:
            continue
        cpt = net.cpt(var.name)
        for r, row in enumerate(cpt.rows):
            ref = MetaParameterRef.make(
                var.name, var.states[0], net.row_assignment(var.name, r))
            entries.append(ParameterEntry(ref, row[0]))
    return entries


def apply_change(net: Network, ref: MetaParameterRef, new_tau: float) -> Network:
    """Return a new network with the referenced knob set to ``new_tau``.

    Both row entries move together (the complement state receives
    1 - new_tau); every other CPT row is carried over untouched and the
    version stamp is incremented.
    """
    if not (isinstance(new_tau, (int, float)) and 0.0 <= new_tau <= 1.0):
        raise ValidationError(f"new value {new_tau!r} outside [0, 1]")
    current = net.parameter_value(ref)
    if not (0.0 < current < 1.0):
        raise NonTunableParameter(
            f"{ref.describe()} currently equals {current}; "
            "parameters at 0 or 1 are excluded from tuning")
    s = net.state_index(ref.variable, ref.state)
    row_idx = net.row_index(ref.variable, ref.parent_instantiation)
    decl = net.declaration_index(ref.variable)
    new_row = [0.0, 0.0]
    new_row[s] = float(new_tau)
    new_row[1 - s] = 1.0 - float(new_tau)
    rows = list(net.cpts[decl].rows)
    rows[row_idx] = tuple(new_row)
    cpts = list(net.cpts)
    cpts[decl] = Cpt(ref.variable, tuple(rows))
    return replace(net, cpts=tuple(cpts), version=net.version + 1)


def iter_assignments(net: Network, names: tuple[str, ...]) -> Iterator[dict[str, str]]:
    """All joint assignments of the named variables, last name fastest."""
    if not names:
        yield {}
        return
    head, rest = names[0], names[1:]
    for state in net.variable(head).states:
        for tail in iter_assignments(net, rest):
            yield {head: state, **tail}
