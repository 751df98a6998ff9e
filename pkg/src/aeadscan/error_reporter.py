"""
aeadscan Error Reporter

Located reports for findings and operational errors: a header with the
position, the surrounding source lines with a caret under the reported
column, and remediation guidance from the rule.
"""

from dataclasses import dataclass
from typing import List, Optional

from .config import ConfigError
from .findings import CWE_TITLES, Finding, ScanReport
from .rules import get_registry
from .source import SourceError


@dataclass
class ErrorContext:
    """Context information for a reported location."""
    line: int
    column: int
    filename: Optional[str]
    source_line: Optional[str] = None
    surrounding_lines: Optional[List[str]] = None


@dataclass
class ErrorSuggestion:
    """One remediation hint."""
    message: str
    reference: Optional[str] = None


class FindingReporter:
    """Renders findings against the source they were found in."""

    def __init__(self, source_code: Optional[str] = None, filename: Optional[str] = None):
        self.source_code = source_code
        self.filename = filename
        self.source_lines = source_code.splitlines() if source_code else []

    def report_finding(self, finding: Finding) -> str:
        """Generate a located report for one finding."""
        context = self._get_error_context(finding.location.line, finding.location.column)
        if finding.path:
            context.filename = finding.path
        return self._format_error_report(
            error_type=f"{finding.severity.value} {finding.rule_id.value} (CWE-{finding.cwe})",
            message=finding.message,
            context=context,
            suggestions=self._get_finding_suggestions(finding),
        )

    def report_source_error(self, error: SourceError) -> str:
        """Report a file that could not be analyzed."""
        lines = [f"🚨 {type(error).__name__} in {error.path or self.filename or '<unknown>'}",
                 f"   {error.message}"]
        return "\n".join(lines)

    def report_scan_failure(self, report: ScanReport) -> str:
        """Report a file the scan had to skip."""
        return "\n".join([f"🚨 Cannot scan {report.path}", f"   {report.error}"])

    def _get_error_context(self, line: int, column: int) -> ErrorContext:
        """Extract context around the reported location."""
        source_line = None
        surrounding_lines = []

        if self.source_lines and 1 <= line <= len(self.source_lines):
            source_line = self.source_lines[line - 1]
            start = max(0, line - 3)
            end = min(len(self.source_lines), line + 2)
            surrounding_lines = self.source_lines[start:end]

        return ErrorContext(
            line=line,
            column=column,
            filename=self.filename,
            source_line=source_line,
            surrounding_lines=surrounding_lines,
        )

    def _get_finding_suggestions(self, finding: Finding) -> List[ErrorSuggestion]:
        suggestions = []
        rule = get_registry().get_rule(finding.rule_id.value)
        if rule is not None and rule.config.remediation:
            suggestions.append(ErrorSuggestion(
                rule.config.remediation,
                reference=f"CWE-{finding.cwe}: {CWE_TITLES.get(finding.cwe, 'unknown weakness')}",
            ))
        return suggestions

    def _format_error_report(
        self,
        error_type: str,
        message: str,
        context: ErrorContext,
        suggestions: List[ErrorSuggestion]
    ) -> str:
        lines = []

        location = f"{context.filename or '<unknown>'}:{context.line}:{context.column}"
        lines.append(f"🚨 {error_type} at {location}")
        lines.append(f"   {message}")
        lines.append("")

        if context.source_line is not None:
            lines.append("📍 Source Context:")
            start_line = max(1, context.line - 2)
            for i, line in enumerate(context.surrounding_lines or [context.source_line]):
                line_num = start_line + i if context.surrounding_lines else context.line
                if line_num == context.line:
                    lines.append(f"  → {line_num:3d} | {line}")
                    # "  → NNN | " is two columns wider than "      | "
                    pointer = " " * (context.column + 1) + "^"
                    lines.append(f"      | {pointer}")
                else:
                    lines.append(f"    {line_num:3d} | {line}")
            lines.append("")

        if suggestions:
            lines.append("💡 Remediation:")
            for i, suggestion in enumerate(suggestions, 1):
                lines.append(f"  {i}. {suggestion.message}")
                if suggestion.reference:
                    lines.append(f"     See {suggestion.reference}")
            lines.append("")

        return "\n".join(lines).rstrip("\n")


def create_error_report(error: object, source_code: Optional[str] = None, filename: Optional[str] = None) -> str:
    """Convenience function to create finding and error reports."""
    reporter = FindingReporter(source_code, filename)

    if isinstance(error, Finding):
        return reporter.report_finding(error)
    elif isinstance(error, ScanReport):
        return reporter.report_scan_failure(error)
    elif isinstance(error, SourceError):
        return reporter.report_source_error(error)
    elif isinstance(error, ConfigError):
        return f"❌ Configuration error: {error}"
    elif isinstance(error, Exception):
        return f"❌ {type(error).__name__}: {error}"
    else:
        return f"❌ Unknown Error: {str(error)}"
