"""Text forms used by the command line and the HTTP service.

Evidence specs are comma-separated ``VAR=STATE`` pairs. Constraints
follow a four-production grammar, whitespace insensitive::

    P(VAR=STATE) >= NUM
    P(VAR=STATE) <= NUM
    P(VAR=STATE) - P(VAR=STATE) >= NUM
    P(VAR=STATE) / P(VAR=STATE) >= NUM

Parsing is a single-pass recursive descent over the raw string; errors
report the character position they occurred at.
"""

from __future__ import annotations

from .errors import FormatError
from .network import Event, Network
from .tuning import Constraint, ConstraintKind

_IDENT_STOP = set("()=<>/,- \t")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def fail(self, message: str):
        raise FormatError(message, offset=self.pos)

    def expect(self, literal: str) -> None:
        self.skip_ws()
        if not self.text.startswith(literal, self.pos):
            self.fail(f"expected {literal!r}")
        self.pos += len(literal)

    def ident(self, what: str) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in _IDENT_STOP:
            self.pos += 1
        if self.pos == start:
            self.fail(f"expected {what}")
        return self.text[start:self.pos]

    def number(self) -> float:
        self.skip_ws()
        start = self.pos
        while (self.pos < len(self.text)
               and self.text[self.pos] in "+-0123456789.eE"):
            self.pos += 1
        try:
            return float(self.text[start:self.pos])
        except ValueError:
            self.pos = start
            self.fail("expected a number")

    def done(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)


def _event(sc: _Scanner) -> Event:
    sc.expect("P")
    sc.expect("(")
    variable = sc.ident("a variable name")
    sc.expect("=")
    state = sc.ident("a state name")
    sc.expect(")")
    return Event(variable, state)


def parse_constraint(text: str) -> Constraint:
    """Parse a constraint expression; names are not resolved here."""
    sc = _Scanner(text)
    y = _event(sc)
    sc.skip_ws()
    if sc.pos >= len(sc.text):
        sc.fail("expected a comparison or an operator")
    ch = sc.text[sc.pos]
    if ch in "-/":
        sc.pos += 1
        z = _event(sc)
        sc.expect(">=")
        eps = sc.number()
        kind = ConstraintKind.DIFFERENCE if ch == "-" else ConstraintKind.RATIO
        constraint = Constraint(kind, y, z, eps)
    elif sc.text.startswith(">=", sc.pos):
        sc.pos += 2
        constraint = Constraint(ConstraintKind.AT_LEAST, y, epsilon=sc.number())
    elif sc.text.startswith("<=", sc.pos):
        sc.pos += 2
        constraint = Constraint(ConstraintKind.AT_MOST, y, epsilon=sc.number())
    else:
        sc.fail("expected '>=', '<=', '-' or '/'")
    if not sc.done():
        sc.fail("unexpected trailing input")
    return constraint


def parse_evidence(text: str) -> dict[str, str]:
    """Parse ``VAR=STATE,VAR=STATE,...``; empty input means no evidence."""
    out: dict[str, str] = {}
    if not text.strip():
        return out
    offset = 0
    for part in text.split(","):
        if "=" not in part:
            raise FormatError(f"evidence item {part.strip()!r} misses '='",
                              offset=offset)
        name, _, state = part.partition("=")
        name, state = name.strip(), state.strip()
        if not name or not state:
            raise FormatError(f"evidence item {part.strip()!r} is incomplete",
                              offset=offset)
        if name in out:
            raise FormatError(f"variable {name!r} assigned twice",
                              offset=offset)
        out[name] = state
        offset += len(part) + 1
    return out


def resolve_events(net: Network, constraint: Constraint,
                   evidence: dict[str, str]) -> None:
    """Check that all names in a constraint and evidence exist in the
    network; raises UnknownElement naming the offender."""
    for name, state in evidence.items():
        net.state_index(name, state)
    net.state_index(constraint.y.variable, constraint.y.state)
    if constraint.z is not None:
        net.state_index(constraint.z.variable, constraint.z.state)
