"""
aeadscan Finding Definitions

Rule identifiers, severities and the Finding record produced by every
detector, plus the per-file ScanReport that carries them.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from .source import SourceLocation


class Severity(Enum):
    CRITICAL = "CRITICAL"
    HIGH = "HIGH"
    MEDIUM = "MEDIUM"

    @property
    def rank(self) -> int:
        return _SEVERITY_RANK[self]

    def at_least(self, threshold: "Severity") -> bool:
        return self.rank >= threshold.rank

    @classmethod
    def parse(cls, value: str) -> "Severity":
        try:
            return cls(value.upper())
        except ValueError:
            raise ValueError(f"Unknown severity: {value}")


_SEVERITY_RANK = {Severity.MEDIUM: 1, Severity.HIGH: 2, Severity.CRITICAL: 3}


class RuleId(Enum):
    HARDCODED_SECRET = "hardcoded_secret"
    NONCE_REUSE_IN_LOOP = "nonce_reuse_in_loop"
    NONCE_REUSE_MULTI_CALL = "nonce_reuse_multi_call"
    STATIC_NONCE = "static_nonce"
    WEAK_RANDOMNESS = "weak_randomness"
    UNSAFE_ERROR_HANDLING = "unsafe_error_handling"
    KEY_FROM_EXTERNAL_INPUT = "key_from_external_input"
    DEPRECATED_API = "deprecated_api"
    MISSING_SECURE_GENERATION = "missing_secure_generation"

    @property
    def cwe(self) -> int:
        return RULE_CWE[self]

    @property
    def severity(self) -> Severity:
        return RULE_SEVERITY[self]


RULE_CWE: Dict[RuleId, int] = {
    RuleId.HARDCODED_SECRET: 798,
    RuleId.NONCE_REUSE_IN_LOOP: 329,
    RuleId.NONCE_REUSE_MULTI_CALL: 329,
    RuleId.STATIC_NONCE: 329,
    RuleId.WEAK_RANDOMNESS: 330,
    RuleId.UNSAFE_ERROR_HANDLING: 252,
    RuleId.KEY_FROM_EXTERNAL_INPUT: 326,
    RuleId.DEPRECATED_API: 327,
    RuleId.MISSING_SECURE_GENERATION: 330,
}

RULE_SEVERITY: Dict[RuleId, Severity] = {
    RuleId.HARDCODED_SECRET: Severity.CRITICAL,
    RuleId.NONCE_REUSE_IN_LOOP: Severity.CRITICAL,
    RuleId.NONCE_REUSE_MULTI_CALL: Severity.CRITICAL,
    RuleId.STATIC_NONCE: Severity.CRITICAL,
    RuleId.WEAK_RANDOMNESS: Severity.HIGH,
    RuleId.UNSAFE_ERROR_HANDLING: Severity.MEDIUM,
    # HIGH, as for other CWE-326 weak-key findings.
    RuleId.KEY_FROM_EXTERNAL_INPUT: Severity.HIGH,
    RuleId.DEPRECATED_API: Severity.MEDIUM,
    RuleId.MISSING_SECURE_GENERATION: Severity.HIGH,
}

KNOWN_CWES = frozenset(RULE_CWE.values())

CWE_TITLES: Dict[int, str] = {
    252: "Unchecked Return Value",
    326: "Inadequate Encryption Strength",
    327: "Use of a Broken or Risky Cryptographic Algorithm",
    329: "Non-unique IV/Nonce",
    330: "Use of Insufficiently Random Values",
    798: "Use of Hard-coded Credentials",
}


@dataclass(frozen=True)
class Finding:
    """One detected crypto misuse."""
    rule_id: RuleId
    location: SourceLocation
    message: str
    snippet: str = ""
    path: str = ""

    @property
    def cwe(self) -> int:
        return self.rule_id.cwe

    @property
    def severity(self) -> Severity:
        return self.rule_id.severity

    @property
    def sort_key(self):
        return (self.location.line, self.location.column, self.rule_id.value)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rule_id": self.rule_id.value,
            "cwe": self.cwe,
            "severity": self.severity.value,
            "path": self.path,
            "line": self.location.line,
            "column": self.location.column,
            "offset": self.location.byte_offset,
            "message": self.message,
            "snippet": self.snippet,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Finding":
        return cls(
            rule_id=RuleId(data["rule_id"]),
            location=SourceLocation(
                line=data["line"], column=data["column"], byte_offset=data.get("offset", 0)
            ),
            message=data["message"],
            snippet=data.get("snippet", ""),
            path=data.get("path", ""),
        )


@dataclass
class ScanReport:
    """Findings for one file plus non-fatal analysis notes."""
    path: str
    findings: List[Finding] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def rule_ids(self) -> List[RuleId]:
        return [f.rule_id for f in self.findings]

    def count(self, rule_id: RuleId) -> int:
        return sum(1 for f in self.findings if f.rule_id == rule_id)

    def at_least(self, threshold: Severity) -> List[Finding]:
        return [f for f in self.findings if f.severity.at_least(threshold)]

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "path": self.path,
            "findings": [f.to_dict() for f in self.findings],
            "notes": list(self.notes),
        }
        if self.error:
            data["error"] = self.error
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScanReport":
        return cls(
            path=data["path"],
            findings=[Finding.from_dict(f) for f in data.get("findings", [])],
            notes=list(data.get("notes", [])),
            error=data.get("error"),
        )
