"""
aeadscan Rule Engine

Runs the registered rules over source units and files. Each detector is
also exposed as a plain function (``detect_static_nonce(unit)`` …) for
library use.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

from .findings import Finding, RuleId, ScanReport
from .rules import AnalysisContext, get_registry
from .source import SourceError, SourceUnit, load_source

logger = logging.getLogger(__name__)


def _dedupe_and_sort(findings: Iterable[Finding]) -> List[Finding]:
    seen = {}
    for finding in findings:
        seen.setdefault((finding.rule_id, finding.location.byte_offset), finding)
    return sorted(seen.values(), key=lambda f: f.sort_key)


def run_rule(rule_id: RuleId, unit: SourceUnit, context: Optional[AnalysisContext] = None) -> List[Finding]:
    """Run a single rule and return its deduplicated findings."""
    rule = get_registry().get_rule(rule_id.value)
    if rule is None:
        raise KeyError(f"Rule not registered: {rule_id.value}")
    return _dedupe_and_sort(rule.check(context or AnalysisContext(unit)))


def detect_hardcoded_secret(unit: SourceUnit) -> List[Finding]:
    return run_rule(RuleId.HARDCODED_SECRET, unit)


def detect_nonce_reuse_in_loop(unit: SourceUnit) -> List[Finding]:
    return run_rule(RuleId.NONCE_REUSE_IN_LOOP, unit)


def detect_nonce_reuse_multi_call(unit: SourceUnit) -> List[Finding]:
    return run_rule(RuleId.NONCE_REUSE_MULTI_CALL, unit)


def detect_static_nonce(unit: SourceUnit) -> List[Finding]:
    return run_rule(RuleId.STATIC_NONCE, unit)


def detect_weak_randomness(unit: SourceUnit) -> List[Finding]:
    return run_rule(RuleId.WEAK_RANDOMNESS, unit)


def detect_unsafe_error_handling(unit: SourceUnit) -> List[Finding]:
    return run_rule(RuleId.UNSAFE_ERROR_HANDLING, unit)


def detect_key_from_external_input(unit: SourceUnit) -> List[Finding]:
    return run_rule(RuleId.KEY_FROM_EXTERNAL_INPUT, unit)


def detect_deprecated_api(unit: SourceUnit) -> List[Finding]:
    return run_rule(RuleId.DEPRECATED_API, unit)


def detect_missing_secure_generation(unit: SourceUnit) -> List[Finding]:
    return run_rule(RuleId.MISSING_SECURE_GENERATION, unit)


def scan_unit(unit: SourceUnit, rules: Optional[Sequence[str]] = None) -> ScanReport:
    """Run every enabled rule over one unit.

    Findings are deduplicated by (rule_id, location) and ordered by
    (line, column, rule_id).
    """
    registry = get_registry()
    context = AnalysisContext(unit)
    findings: List[Finding] = []
    for rule in registry.rules():
        if rules is not None and rule.name not in rules:
            continue
        if not rule.config.enabled:
            continue
        findings.extend(rule.check(context))
    return ScanReport(path=unit.path, findings=_dedupe_and_sort(findings), notes=list(context.notes))


def analyze(unit: SourceUnit) -> List[Finding]:
    """Union of all nine detectors' findings for ``unit``."""
    return scan_unit(unit).findings


def scan_file(path: Union[str, Path], rules: Optional[Sequence[str]] = None) -> ScanReport:
    """Load and scan one file; load errors are captured on the report."""
    try:
        unit = load_source(path)
    except SourceError as e:
        logger.error("Cannot scan %s: %s", path, e.message)
        return ScanReport(path=str(path), error=str(e))
    return scan_unit(unit, rules)


def collect_sources(paths: Sequence[Union[str, Path]]) -> List[Path]:
    """Expand directories into their `*.rs` files; files are kept as given."""
    collected: List[Path] = []
    for entry in paths:
        path = Path(entry)
        if path.is_dir():
            collected.extend(sorted(p for p in path.rglob("*.rs") if p.is_file()))
        else:
            collected.append(path)
    return collected


def scan_paths(paths: Sequence[Union[str, Path]], workers: int = 1,
               rules: Optional[Sequence[str]] = None) -> List[ScanReport]:
    """Scan many files, concurrently when ``workers`` > 1.

    Reports come back in input order regardless of completion order.
    """
    files = collect_sources(paths)
    if workers <= 1 or len(files) <= 1:
        return [scan_file(path, rules) for path in files]
    logger.debug("Scanning %d files with %d workers", len(files), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda path: scan_file(path, rules), files))


def rule_catalog() -> List[Dict[str, object]]:
    """Describe every registered rule: id, CWE, severity, title, remediation."""
    registry = get_registry()
    return [registry.get_rule_info(name) for name in registry.list_rules()]
