"""
Nonce rules (CWE-329): reuse inside loops, reuse across encrypt calls, and
static nonces built from literals.
"""

from collections import defaultdict
from typing import Dict, List

from ..findings import Finding, RuleId
from ..structure import (
    ENCRYPT_CALL_RE,
    ENTROPY_RE,
    IDENT_RE,
    NonceUse,
    Provenance,
    declaration_pattern,
    is_literal_expr,
    is_parameter_between,
    reaches_encrypt,
    regeneration_pattern,
    statement_end,
)
from .base import AnalysisContext, BaseRule

LOOP_MESSAGE = "encrypt() called inside a loop with no entropy source."


class NonceReuseInLoopRule(BaseRule):
    rule_id = RuleId.NONCE_REUSE_IN_LOOP
    title = "Nonce reuse in loop"
    description = "Loop body calls encrypt() without any entropy source inside the body."
    remediation = "Generate a fresh nonce inside the loop body for every encryption."

    def check(self, context: AnalysisContext) -> List[Finding]:
        findings = []
        for loop in context.loops:
            call = ENCRYPT_CALL_RE.search(loop.body_text)
            if call is None or ENTROPY_RE.search(loop.body_text):
                continue
            findings.append(self.finding(context, loop.start + call.start() + 1, LOOP_MESSAGE))
        return findings


class NonceReuseMultiCallRule(BaseRule):
    """Nonce lifecycle: the same nonce variable reaching two encrypt calls."""

    rule_id = RuleId.NONCE_REUSE_MULTI_CALL
    title = "Nonce reuse across calls"
    description = "The same nonce variable is passed to two or more encrypt calls without re-randomization."
    remediation = "Regenerate the nonce (OsRng.fill_bytes or generate_nonce) before every encrypt call."

    def check(self, context: AnalysisContext) -> List[Finding]:
        text = context.unit.code_text
        by_variable: Dict[str, List[NonceUse]] = defaultdict(list)
        for use in context.nonce_uses:
            if use.variable:
                by_variable[use.variable].append(use)

        findings = []
        for variable, uses in by_variable.items():
            # One finding per consecutive pair without regeneration.
            for first, second in zip(uses, uses[1:]):
                if self._regenerated(text, variable, first.args_end, second.offset):
                    continue
                findings.append(self.finding(
                    context, second.offset,
                    f"nonce `{variable}` reused by {second.method}() without regeneration "
                    f"since line {first.call_site.line}",
                ))
        return findings

    def _regenerated(self, text: str, variable: str, start: int, end: int) -> bool:
        if regeneration_pattern(variable).search(text, start, end):
            return True
        if is_parameter_between(text, variable, start, end):
            return True
        return self._rebound_from_fresh_buffer(text, variable, start, end)

    def _rebound_from_fresh_buffer(self, text: str, variable: str, start: int, end: int) -> bool:
        """A shadowing `let` whose value reads a buffer refilled from entropy in the window."""
        for match in declaration_pattern(variable).finditer(text, start, end):
            value = text[match.end():statement_end(text, match.end())]
            for name in set(IDENT_RE.findall(value)):
                if name != variable and regeneration_pattern(name).search(text, start, match.start()):
                    return True
        return False


class StaticNonceRule(BaseRule):
    rule_id = RuleId.STATIC_NONCE
    title = "Static nonce"
    description = "Nonce built from a literal array or byte string and passed to encrypt()."
    remediation = "Fill nonce bytes from OsRng (or use generate_nonce) for every message."

    def check(self, context: AnalysisContext) -> List[Finding]:
        text = context.unit.code_text
        uses = context.nonce_uses
        findings = []

        for sink in context.sinks:
            if sink.kind != 'nonce':
                continue
            if not reaches_encrypt(text, sink.offset, sink.bound_to, uses):
                continue
            if sink.literal:
                findings.append(self.finding(
                    context, sink.offset,
                    f"{sink.call}() builds a nonce from a literal that is passed to encrypt()",
                    end=sink.args_end + 1,
                ))
            elif sink.variable:
                state = context.provenance(sink.variable, sink.offset)
                if state and state.classification is Provenance.LITERAL_ONLY:
                    findings.append(self.finding(
                        context, state.declaration_offset,
                        f"nonce buffer `{sink.variable}` is a literal that is never randomized "
                        f"before {sink.call}()",
                    ))

        for use in uses:
            if is_literal_expr(use.argument):
                start = use.args_start + (len(text[use.args_start:use.args_end])
                                          - len(text[use.args_start:use.args_end].lstrip()))
                findings.append(self.finding(
                    context, start, f"literal nonce passed directly to {use.method}()",
                ))
            elif use.variable and use.variable == use.captured:
                state = context.provenance(use.variable, use.offset)
                if state and state.classification is Provenance.LITERAL_ONLY:
                    findings.append(self.finding(
                        context, state.declaration_offset,
                        f"nonce `{use.variable}` is a literal passed to {use.method}() "
                        f"on line {use.call_site.line}",
                    ))
        return findings
