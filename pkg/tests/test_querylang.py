"""Constraint and evidence text grammar."""

import pytest

from belief_tuner.errors import FormatError
from belief_tuner.network import Event
from belief_tuner.querylang import parse_constraint, parse_evidence
from belief_tuner.tuning import ConstraintKind


class TestConstraintGrammar:
    def test_at_least(self):
        c = parse_constraint("P(fire=true) >= 0.5")
        assert c.kind is ConstraintKind.AT_LEAST
        assert c.y == Event("fire", "true")
        assert c.z is None
        assert c.epsilon == 0.5

    def test_at_most(self):
        c = parse_constraint("P(fire=true) <= .2")
        assert c.kind is ConstraintKind.AT_MOST
        assert c.epsilon == 0.2

    def test_difference(self):
        c = parse_constraint(
            "P(tampering=true) - P(tampering=false) >= 0.30")
        assert c.kind is ConstraintKind.DIFFERENCE
        assert c.y == Event("tampering", "true")
        assert c.z == Event("tampering", "false")
        assert c.epsilon == 0.30

    def test_ratio(self):
        c = parse_constraint("P(a=t) / P(b=f) >= 3")
        assert c.kind is ConstraintKind.RATIO
        assert c.epsilon == 3.0

    def test_whitespace_insensitive(self):
        dense = parse_constraint("P(a=t)-P(b=f)>=.1")
        spaced = parse_constraint("  P( a = t )  -  P( b = f )  >=  .1 ")
        assert dense == spaced

    @pytest.mark.parametrize("text", [
        "",
        "P(a=t)",
        "P(a=t) > 0.5",
        "P(a) >= 0.5",
        "Q(a=t) >= 0.5",
        "P(a=t) >= banana",
        "P(a=t) - P(b=f) <= 0.1",
        "P(a=t) >= 0.5 trailing",
    ])
    def test_rejects_with_position(self, text):
        with pytest.raises(FormatError, match=r"position \d+"):
            parse_constraint(text)

    def test_error_position_points_at_problem(self):
        with pytest.raises(FormatError) as info:
            parse_constraint("P(a=t) >= ")
        assert info.value.offset == 10


class TestEvidenceSpec:
    def test_pairs(self):
        assert parse_evidence("report=true,smoke=false") \
            == {"report": "true", "smoke": "false"}

    def test_empty(self):
        assert parse_evidence("") == {}
        assert parse_evidence("   ") == {}

    def test_duplicate_variable_rejected(self):
        with pytest.raises(FormatError, match="twice"):
            parse_evidence("a=t,a=f")

    def test_malformed_item_rejected(self):
        with pytest.raises(FormatError):
            parse_evidence("a")
        with pytest.raises(FormatError):
            parse_evidence("a=")
        with pytest.raises(FormatError):
            parse_evidence("=t")
