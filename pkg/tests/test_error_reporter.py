"""Located finding reports."""

from aeadscan.config import ConfigError
from aeadscan.error_reporter import FindingReporter, create_error_report
from aeadscan.findings import Finding, RuleId, ScanReport
from aeadscan.source import EncodingError, SourceLocation

SOURCE = """\
fn main() {
    let key = Aes256Gcm::generate_key(&mut OsRng);
    let nonce = Nonce::from_slice(b"unique nonce");
    let cipher = Aes256Gcm::new(&key);
    cipher.encrypt(nonce, b"hi".as_ref()).unwrap();
}
"""


def _finding(line=3, column=17, rule=RuleId.STATIC_NONCE, path="src/main.rs"):
    return Finding(rule_id=rule, location=SourceLocation(line, column, 0),
                   message="nonce built from a literal", path=path)


class TestFindingReport:

    def test_header(self):
        report = FindingReporter(SOURCE, "ignored.rs").report_finding(_finding())
        assert report.splitlines()[0] == "🚨 CRITICAL static_nonce (CWE-329) at src/main.rs:3:17"
        assert report.splitlines()[1] == "   nonce built from a literal"

    def test_context_window_and_caret(self):
        lines = FindingReporter(SOURCE).report_finding(_finding()).splitlines()
        context = lines[lines.index("📍 Source Context:") + 1:]
        assert context[0] == "      1 | fn main() {"
        marked = next(line for line in context if line.startswith("  →"))
        assert marked == '  →   3 |     let nonce = Nonce::from_slice(b"unique nonce");'
        caret = context[context.index(marked) + 1]
        assert caret.index("^") == marked.index("|") + 2 + 17 - 1
        assert marked[caret.index("^")] == "N"

    def test_window_is_clipped_at_file_edges(self):
        lines = FindingReporter(SOURCE).report_finding(_finding(line=1, column=1)).splitlines()
        context = lines[lines.index("📍 Source Context:") + 1:]
        assert context[0].startswith("  →   1 |")
        assert "      3 |" in context[3]

    def test_remediation_and_reference(self):
        report = FindingReporter(SOURCE).report_finding(_finding())
        assert "💡 Remediation:" in report
        assert "See CWE-329: Non-unique IV/Nonce" in report

    def test_without_source(self):
        report = FindingReporter().report_finding(_finding(path=""))
        assert "📍" not in report
        assert report.startswith("🚨 CRITICAL static_nonce (CWE-329) at <unknown>:3:17")

    def test_line_outside_source(self):
        report = FindingReporter(SOURCE).report_finding(_finding(line=40))
        assert "📍" not in report


class TestCreateErrorReport:

    def test_dispatch(self):
        assert create_error_report(_finding(rule=RuleId.UNSAFE_ERROR_HANDLING), SOURCE).startswith(
            "🚨 MEDIUM unsafe_error_handling (CWE-252)")
        source_error = create_error_report(EncodingError("not valid UTF-8 at byte 3", "bad.rs"))
        assert source_error.splitlines() == ["🚨 EncodingError in bad.rs", "   not valid UTF-8 at byte 3"]
        assert create_error_report(RuntimeError("boom")) == "❌ RuntimeError: boom"
        assert create_error_report("boom") == "❌ Unknown Error: boom"

    def test_scan_failure(self):
        report = ScanReport(path="gone.rs", error="gone.rs: cannot read file: No such file or directory")
        assert create_error_report(report).splitlines() == [
            "🚨 Cannot scan gone.rs",
            "   gone.rs: cannot read file: No such file or directory",
        ]

    def test_config_error(self):
        assert create_error_report(ConfigError("unknown mode: offline")) == "❌ Configuration error: unknown mode: offline"
