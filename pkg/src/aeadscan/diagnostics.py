"""
aeadscan Compiler Diagnostics

Parses `cargo clippy --message-format=json` streams and classifies each
non-compiling sample into one of four error classes.

Code table (compiler error code → class):

    E0599, E0425, E0624          → APIHallucination
    E0432, E0433                 → UnresolvedImport
    E0277, E0283                 → TraitError
    E0308, E0106, E0495, E0621   → TypeError

Unmapped codes fall back to message keywords; anything left is TypeError.
When a sample has errors of several classes the dominant one is chosen by
precedence APIHallucination > UnresolvedImport > TraitError > TypeError.
"""

import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple

logger = logging.getLogger(__name__)


class ErrorClass(Enum):
    API_HALLUCINATION = "APIHallucination"
    TYPE_ERROR = "TypeError"
    TRAIT_ERROR = "TraitError"
    UNRESOLVED_IMPORT = "UnresolvedImport"
    NO_ERROR = "NoError"


ERROR_CODE_TABLE: Dict[str, ErrorClass] = {
    "E0599": ErrorClass.API_HALLUCINATION,
    "E0425": ErrorClass.API_HALLUCINATION,
    "E0624": ErrorClass.API_HALLUCINATION,
    "E0432": ErrorClass.UNRESOLVED_IMPORT,
    "E0433": ErrorClass.UNRESOLVED_IMPORT,
    "E0277": ErrorClass.TRAIT_ERROR,
    "E0283": ErrorClass.TRAIT_ERROR,
    "E0308": ErrorClass.TYPE_ERROR,
    "E0106": ErrorClass.TYPE_ERROR,
    "E0495": ErrorClass.TYPE_ERROR,
    "E0621": ErrorClass.TYPE_ERROR,
}

# Highest precedence first.
CLASS_PRECEDENCE: Tuple[ErrorClass, ...] = (
    ErrorClass.API_HALLUCINATION,
    ErrorClass.UNRESOLVED_IMPORT,
    ErrorClass.TRAIT_ERROR,
    ErrorClass.TYPE_ERROR,
)

FAILURE_CLASSES = CLASS_PRECEDENCE

_KEYWORD_RULES: Tuple[Tuple["re.Pattern[str]", ErrorClass], ...] = (
    (re.compile(r'no (?:method|function|associated item|variant)\b.*\bfound|cannot find (?:function|value)|is private', re.I),
     ErrorClass.API_HALLUCINATION),
    (re.compile(r'unresolved import|could not find .* in|failed to resolve|use of undeclared (?:crate|module)', re.I),
     ErrorClass.UNRESOLVED_IMPORT),
    (re.compile(r'trait bound|the trait .* is not implemented|type annotations needed|doesn\'t implement', re.I),
     ErrorClass.TRAIT_ERROR),
    (re.compile(r'mismatched types|expected .* found|lifetime|generic', re.I),
     ErrorClass.TYPE_ERROR),
)


class DiagnosticsError(Exception):
    """Raised for an unparseable diagnostic line."""
    def __init__(self, message: str, line_number: int):
        self.message = message
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class MalformedJSON(DiagnosticsError):
    """A line of the stream is not a JSON object."""


@dataclass(frozen=True)
class SpanRef:
    file: str
    line: int
    column: int


@dataclass(frozen=True)
class Diagnostic:
    level: str
    message: str
    code: Optional[str] = None
    primary_span: Optional[SpanRef] = None

    @property
    def is_error(self) -> bool:
        return self.level == "error"

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"level": self.level, "code": self.code, "message": self.message}
        if self.primary_span:
            data["span"] = {
                "file": self.primary_span.file,
                "line": self.primary_span.line,
                "column": self.primary_span.column,
            }
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Diagnostic":
        span = data.get("span")
        return cls(
            level=data["level"],
            message=data["message"],
            code=data.get("code"),
            primary_span=SpanRef(span["file"], span["line"], span["column"]) if span else None,
        )


@dataclass
class CompilationOutcome:
    """Compiler result for one generated sample."""
    sample_id: str
    compiled: bool
    diagnostics: List[Diagnostic] = field(default_factory=list)
    dominant_class: ErrorClass = ErrorClass.NO_ERROR
    extraction_failed: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def error_count(self) -> int:
        return sum(1 for d in self.diagnostics if d.is_error)

    @classmethod
    def from_diagnostics(cls, sample_id: str, diagnostics: List[Diagnostic]) -> "CompilationOutcome":
        errors = [d for d in diagnostics if d.is_error]
        return cls(
            sample_id=sample_id,
            compiled=not errors,
            diagnostics=list(diagnostics),
            dominant_class=dominant_class(diagnostics),
        )

    @classmethod
    def extraction_failure(cls, sample_id: str, note: str = "no fenced code block in response") -> "CompilationOutcome":
        return cls(sample_id=sample_id, compiled=False, extraction_failed=True, notes=[note])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sample_id": self.sample_id,
            "compiled": self.compiled,
            "dominant_class": self.dominant_class.value,
            "extraction_failed": self.extraction_failed,
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CompilationOutcome":
        return cls(
            sample_id=data["sample_id"],
            compiled=data["compiled"],
            diagnostics=[Diagnostic.from_dict(d) for d in data.get("diagnostics", [])],
            dominant_class=ErrorClass(data.get("dominant_class", ErrorClass.NO_ERROR.value)),
            extraction_failed=data.get("extraction_failed", False),
            notes=list(data.get("notes", [])),
        )


def _primary_span(message: Dict[str, Any]) -> Optional[SpanRef]:
    spans = message.get("spans") or []
    chosen = next((s for s in spans if s.get("is_primary")), spans[0] if spans else None)
    if not chosen:
        return None
    return SpanRef(
        file=chosen.get("file_name", ""),
        line=int(chosen.get("line_start", 0)),
        column=int(chosen.get("column_start", 0)),
    )


def parse_diagnostic_line(line: str, line_number: int) -> Optional[Diagnostic]:
    """Parse one stream line; None for records that are not compiler messages."""
    try:
        record = json.loads(line)
    except json.JSONDecodeError as e:
        raise MalformedJSON(f"invalid JSON ({e.msg})", line_number)
    if not isinstance(record, dict):
        raise MalformedJSON("record is not a JSON object", line_number)
    if record.get("reason") != "compiler-message":
        return None
    message = record.get("message")
    if not isinstance(message, dict) or "level" not in message:
        raise MalformedJSON("compiler-message without message.level", line_number)

    code = message.get("code")
    if isinstance(code, dict):
        code = code.get("code")
    level = message["level"]
    if level.startswith("error"):
        level = "error"
    return Diagnostic(
        level=level,
        message=message.get("message", ""),
        code=code or None,
        primary_span=_primary_span(message),
    )


def parse_diagnostics(json_stream: str) -> List[Diagnostic]:
    """Parse a line-delimited JSON diagnostic stream.

    Malformed lines are logged with their line number and skipped.
    """
    diagnostics = []
    for line_number, line in enumerate(json_stream.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            diagnostic = parse_diagnostic_line(line, line_number)
        except MalformedJSON as e:
            logger.warning("Skipping malformed diagnostic: %s", e)
            continue
        if diagnostic is None:
            continue
        if diagnostic.level in ("failure-note",) or (
                diagnostic.is_error and not diagnostic.code and diagnostic.message.startswith("aborting due to")):
            continue
        diagnostics.append(diagnostic)
    return diagnostics


def classify_error(diagnostic: Diagnostic) -> ErrorClass:
    """Map one error-level diagnostic to its class. Total: never raises."""
    if diagnostic.code and diagnostic.code in ERROR_CODE_TABLE:
        return ERROR_CODE_TABLE[diagnostic.code]
    for pattern, error_class in _KEYWORD_RULES:
        if pattern.search(diagnostic.message):
            return error_class
    return ErrorClass.TYPE_ERROR


def dominant_class(diagnostics: Iterable[Diagnostic]) -> ErrorClass:
    present = {classify_error(d) for d in diagnostics if d.is_error}
    for error_class in CLASS_PRECEDENCE:
        if error_class in present:
            return error_class
    return ErrorClass.NO_ERROR


def class_counts(outcomes: Iterable[CompilationOutcome]) -> Dict[ErrorClass, int]:
    """Dominant-class counts over non-compiling samples that had code to compile."""
    counter = Counter(
        o.dominant_class for o in outcomes if not o.compiled and not o.extraction_failed
    )
    return {error_class: counter.get(error_class, 0) for error_class in FAILURE_CLASSES}


def class_shares(outcomes: Iterable[CompilationOutcome]) -> Dict[ErrorClass, float]:
    """Share of each failure class; sums to 1 when any sample failed to compile."""
    counts = class_counts(outcomes)
    total = sum(counts.values())
    if total == 0:
        return {error_class: 0.0 for error_class in FAILURE_CLASSES}
    return {error_class: count / total for error_class, count in counts.items()}
