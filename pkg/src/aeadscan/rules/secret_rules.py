"""
Key material rules: hardcoded secrets (CWE-798) and keys built directly from
external input (CWE-326).
"""

import re
from typing import Dict, List, Optional, Set, Tuple

from ..findings import Finding, RuleId
from ..structure import IDENT_RE, KDF_RE, MaterialSink, Provenance, iter_let_statements
from .base import AnalysisContext, BaseRule

_INPUT_SOURCE_RE = re.compile(
    r'\bstdin\s*\(\s*\)'
    r'|\benv\s*::\s*(?:args|var)(?:_os)?\s*\('
    r'|\bargs\s*\(\s*\)'
)

_READ_INTO_RE = re.compile(r'\bread_(?:line|to_string|to_end)\s*\(\s*&\s*mut\s+(\w+)')


class HardcodedSecretRule(BaseRule):
    """Key material written into the source as a literal."""

    rule_id = RuleId.HARDCODED_SECRET
    title = "Hardcoded secret"
    description = "Keys baked directly into source code as literal values."
    remediation = (
        "Generate keys with Aes256Gcm::generate_key(&mut OsRng) or load them from a "
        "secret store; never embed key bytes in source."
    )

    def check(self, context: AnalysisContext) -> List[Finding]:
        findings = []
        for sink in context.sinks:
            if sink.kind != 'key':
                continue
            if sink.literal:
                findings.append(self.finding(
                    context, sink.offset,
                    f"literal key material passed to {sink.call}()",
                    end=sink.args_end + 1,
                ))
            elif sink.variable:
                state = context.provenance(sink.variable, sink.offset)
                if state is None or state.classification is not Provenance.LITERAL_ONLY:
                    continue
                line = context.unit.offset_to_location(sink.offset).line
                findings.append(self.finding(
                    context, state.declaration_offset,
                    f"`{sink.variable}` holds literal key material and reaches "
                    f"{sink.call}() on line {line} without being overwritten",
                ))
        return findings


class KeyFromExternalInputRule(BaseRule):
    """Key bytes taken from stdin, argv or the environment without a KDF."""

    rule_id = RuleId.KEY_FROM_EXTERNAL_INPUT
    title = "Key from external input"
    description = "Key constructed directly from stdin, arguments or environment input."
    remediation = (
        "Derive keys from passwords or other external input with a KDF such as "
        "Argon2, PBKDF2, scrypt or HKDF."
    )

    def check(self, context: AnalysisContext) -> List[Finding]:
        text = context.unit.code_text
        sinks = sorted(
            (s for s in context.sinks if s.kind == 'key' and not s.literal),
            key=lambda s: s.offset,
        )
        if not sinks:
            return []
        tainted = self._tainted_variables(text)

        hits: List[Tuple[MaterialSink, str]] = []
        direct_spans: List[Tuple[int, int]] = []
        flagged_bindings: Set[str] = set()
        for sink in sinks:
            source = self._direct_read(text, sink)
            if source is not None:
                direct_spans.append((sink.args_start, sink.args_end))
            else:
                source = self._tainted_argument(text, sink, tainted, direct_spans, flagged_bindings)
            if source is None:
                continue
            hits.append((sink, source))
            if sink.bound_to:
                flagged_bindings.add(sink.bound_to)

        findings = []
        for sink, source in hits:
            # the innermost constructor carries the finding
            if any(other is not sink and sink.args_start <= other.offset < sink.args_end for other, _ in hits):
                continue
            findings.append(self.finding(
                context, sink.offset,
                f"{sink.call}() builds a key from {source} without a KDF",
                end=sink.args_end + 1,
            ))
        return findings

    @staticmethod
    def _direct_read(text: str, sink: MaterialSink) -> Optional[str]:
        """The external read written inside the constructor's own arguments."""
        read = _INPUT_SOURCE_RE.search(text, sink.args_start, sink.args_end)
        if read is None or KDF_RE.search(text, sink.args_start, sink.args_end):
            return None
        call = "".join(read.group(0).split()).rstrip("(")
        return f"external input `{call}`"

    @staticmethod
    def _tainted_argument(text: str, sink: MaterialSink, tainted: Dict[str, int],
                          direct_spans: List[Tuple[int, int]], flagged_bindings: Set[str]) -> Optional[str]:
        for name in sorted(set(IDENT_RE.findall(sink.argument))):
            origin = tainted.get(name)
            if origin is None or origin >= sink.offset or name in flagged_bindings:
                continue
            if any(start <= origin < end for start, end in direct_spans):
                continue
            if KDF_RE.search(text, origin, sink.offset):
                continue
            return f"external input `{name}`"
        return None

    def _tainted_variables(self, text: str) -> Dict[str, int]:
        """Map variable → offset of the external read its value comes from."""
        tainted: Dict[str, int] = {}
        for match in _READ_INTO_RE.finditer(text):
            tainted.setdefault(match.group(1), match.start())

        for name, let_offset, value_start, value_end in iter_let_statements(text):
            value = text[value_start:value_end]
            if KDF_RE.search(value):
                continue
            source = _INPUT_SOURCE_RE.search(value)
            if source:
                tainted.setdefault(name, value_start + source.start())
                continue
            for ident in IDENT_RE.findall(value):
                origin = tainted.get(ident)
                if origin is not None and origin < let_offset and ident != name:
                    tainted.setdefault(name, origin)
                    break
        return tainted
