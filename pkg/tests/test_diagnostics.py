"""Compiler diagnostic parsing and error taxonomy."""

import json

import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

from aeadscan.diagnostics import (
    ERROR_CODE_TABLE,
    CompilationOutcome,
    Diagnostic,
    ErrorClass,
    MalformedJSON,
    class_counts,
    class_shares,
    classify_error,
    dominant_class,
    parse_diagnostic_line,
    parse_diagnostics,
)

from conftest import DIAGNOSTICS_DIR


def _message(level, message, code=None):
    return json.dumps({
        "reason": "compiler-message",
        "message": {
            "level": level,
            "message": message,
            "code": {"code": code, "explanation": None} if code else None,
            "spans": [{"file_name": "src/main.rs", "line_start": 7, "column_start": 5, "is_primary": True}],
        },
    })


def _error(code=None, message="error"):
    return Diagnostic(level="error", message=message, code=code)


class TestParsing:

    def test_compiler_messages_only(self):
        stream = "\n".join([
            json.dumps({"reason": "compiler-artifact", "target": {}}),
            _message("error", "mismatched types", "E0308"),
            _message("warning", "unused import: `OsRng`", "unused_imports"),
            _message("error", "aborting due to 1 previous error"),
            json.dumps({"reason": "build-finished", "success": False}),
        ])
        diagnostics = parse_diagnostics(stream)
        assert [(d.level, d.code) for d in diagnostics] == [("error", "E0308"), ("warning", "unused_imports")]
        assert diagnostics[0].primary_span.line == 7

    def test_malformed_line_is_skipped(self, caplog):
        stream = '{"reason":"compiler-message","message":{"level":"err\n' + _message("error", "x", "E0599")
        diagnostics = parse_diagnostics(stream)
        assert [d.code for d in diagnostics] == ["E0599"]
        assert "line 1" in caplog.text

    def test_non_object_record(self):
        with pytest.raises(MalformedJSON) as excinfo:
            parse_diagnostic_line("[1, 2]", 4)
        assert excinfo.value.line_number == 4

    def test_error_levels_are_normalized(self):
        diagnostic = parse_diagnostic_line(_message("error: internal compiler error", "boom"), 1)
        assert diagnostic.is_error

    def test_diagnostic_round_trip(self):
        diagnostic = parse_diagnostic_line(_message("error", "no method named `foo`", "E0599"), 1)
        assert Diagnostic.from_dict(diagnostic.to_dict()) == diagnostic


class TestClassification:

    @pytest.mark.parametrize("code,expected", sorted(ERROR_CODE_TABLE.items()))
    def test_code_table(self, code, expected):
        assert classify_error(_error(code)) is expected

    @pytest.mark.parametrize("message,expected", [
        ("no function or associated item named `generate` found for struct `Nonce`", ErrorClass.API_HALLUCINATION),
        ("unresolved import `aes_gcm::aead::NewAead`", ErrorClass.UNRESOLVED_IMPORT),
        ("failed to resolve: use of undeclared crate or module `hex`", ErrorClass.UNRESOLVED_IMPORT),
        ("the trait bound `Vec<u8>: From<Payload>` is not satisfied", ErrorClass.TRAIT_ERROR),
        ("type annotations needed", ErrorClass.TRAIT_ERROR),
        ("missing lifetime specifier", ErrorClass.TYPE_ERROR),
        ("something entirely different", ErrorClass.TYPE_ERROR),
    ])
    def test_keyword_fallback(self, message, expected):
        assert classify_error(_error("E9999", message)) is expected

    def test_precedence(self):
        mixed = [_error("E0308"), _error("E0277"), _error("E0433"), _error("E0599")]
        assert dominant_class(mixed) is ErrorClass.API_HALLUCINATION
        assert dominant_class(mixed[:3]) is ErrorClass.UNRESOLVED_IMPORT
        assert dominant_class(mixed[:2]) is ErrorClass.TRAIT_ERROR

    def test_warnings_only_is_no_error(self):
        outcome = CompilationOutcome.from_diagnostics("s", [Diagnostic(level="warning", message="unused")])
        assert outcome.compiled
        assert outcome.dominant_class is ErrorClass.NO_ERROR
        assert outcome.error_count == 0

    @pytest.mark.parametrize("stream", sorted(p.name for p in DIAGNOSTICS_DIR.glob("*.jsonl")))
    def test_captured_streams_match_hand_labels(self, stream):
        labels = yaml.safe_load((DIAGNOSTICS_DIR / "labels.yaml").read_text(encoding="utf-8"))
        diagnostics = parse_diagnostics((DIAGNOSTICS_DIR / stream).read_text(encoding="utf-8"))
        outcome = CompilationOutcome.from_diagnostics(stream, diagnostics)
        assert outcome.dominant_class.value == labels[stream]
        assert outcome.compiled == (labels[stream] == "NoError")

    def test_every_stream_is_labelled(self):
        labels = yaml.safe_load((DIAGNOSTICS_DIR / "labels.yaml").read_text(encoding="utf-8"))
        assert sorted(labels) == sorted(p.name for p in DIAGNOSTICS_DIR.glob("*.jsonl"))
        assert len(labels) == 16


outcomes = st.lists(st.one_of(
    st.sampled_from([c for c in ErrorClass if c is not ErrorClass.NO_ERROR]).map(
        lambda c: CompilationOutcome(sample_id="s", compiled=False, dominant_class=c)),
    st.just(CompilationOutcome(sample_id="ok", compiled=True)),
    st.just(CompilationOutcome.extraction_failure("empty")),
), max_size=40)


class TestTaxonomy:

    @given(outcomes)
    @settings(max_examples=200)
    def test_shares_sum_to_one_over_failures(self, sample):
        shares = class_shares(sample)
        failures = sum(class_counts(sample).values())
        assert set(shares) == {c for c in ErrorClass if c is not ErrorClass.NO_ERROR}
        if failures:
            assert sum(shares.values()) == pytest.approx(1.0)
        else:
            assert all(value == 0.0 for value in shares.values())

    def test_extraction_failures_are_not_classified(self):
        sample = [CompilationOutcome.extraction_failure("a"),
                  CompilationOutcome(sample_id="b", compiled=False, dominant_class=ErrorClass.TRAIT_ERROR)]
        assert class_counts(sample)[ErrorClass.TRAIT_ERROR] == 1
        assert sum(class_counts(sample).values()) == 1

    def test_outcome_round_trip(self):
        diagnostics = parse_diagnostics((DIAGNOSTICS_DIR / "api_over_type_error.jsonl").read_text(encoding="utf-8"))
        outcome = CompilationOutcome.from_diagnostics("api_over_type_error", diagnostics)
        assert CompilationOutcome.from_dict(outcome.to_dict()) == outcome
