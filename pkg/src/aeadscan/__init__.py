"""
aeadscan - static detection of AEAD crypto misuse in Rust source

aeadscan scans Rust programs that use the aes-gcm and chacha20poly1305
crates for hardcoded keys, nonce reuse, weak randomness and related
misuse, and ships the harness used to study how well code generators
produce such programs.
"""

__version__ = "0.1.0"

from .source import SourceError, SourceLocation, SourceUnit, load_source, load_text
from .findings import Finding, RuleId, ScanReport, Severity
from .engine import analyze, rule_catalog, scan_file, scan_paths, scan_unit

__all__ = [
    'SourceError', 'SourceLocation', 'SourceUnit', 'load_source', 'load_text',
    'Finding', 'RuleId', 'ScanReport', 'Severity',
    'analyze', 'rule_catalog', 'scan_file', 'scan_paths', 'scan_unit',
]
