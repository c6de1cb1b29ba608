"""Exception hierarchy shared across the package."""


class BeliefTunerError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(BeliefTunerError):
    """A document or expression does not follow its grammar.

    Carries an optional position (line/column for documents, character
    offset for one-line expressions) so callers can point at the problem.
    """

    def __init__(self, message: str, *, line: int | None = None,
                 column: int | None = None, offset: int | None = None):
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        elif offset is not None:
            where = f" (position {offset})"
        super().__init__(message + where)
        self.line = line
        self.column = column
        self.offset = offset


class ValidationError(BeliefTunerError):
    """A structurally well-formed input violates a semantic rule."""


class UnknownElement(ValidationError):
    """A variable or state name does not exist in the network."""


class ZeroEvidenceProbability(BeliefTunerError):
    """The evidence has probability zero, so posteriors are undefined."""


class NonTunableParameter(BeliefTunerError):
    """The referenced parameter cannot be tuned (non-binary variable,
    or current value at 0 or 1)."""


class StateSpaceTooLarge(BeliefTunerError):
    """The brute-force enumeration guard tripped."""
