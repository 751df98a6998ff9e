"""
Randomness rules (CWE-330): non-cryptographic generators and files that
encrypt without any CSPRNG.
"""

import re
from typing import List, Optional

from ..findings import Finding, RuleId
from ..source import SourceUnit
from ..structure import (
    ENCRYPT_CALL_RE,
    ENTROPY_RE,
    call_arguments,
    first_argument_span,
    literal_span,
    statement_binding,
    statement_end,
    statement_start,
)
from .base import AnalysisContext, BaseRule

_WEAK_CONSTRUCTOR_RE = re.compile(r'\b(?:SmallRng|XorShiftRng)\s*::\s*\w+\s*\(')

_SEEDED_RE = re.compile(r'\b\w*Rng\s*::\s*seed_from_u64\s*\(')

_FROM_SEED_RE = re.compile(r'\b(\w+)\s*::\s*from_seed\s*\(')

_THREAD_RNG_RE = re.compile(r'\b(?:rand\s*::\s*)?thread_rng\s*\(\s*\)')

# Identifiers that name key or nonce bytes: key, nonce_bytes, aes_key, iv, …
_MATERIAL_RE = re.compile(r'(?i)\b(?:\w+_)?(?:key|nonce|iv|secret)s?(?:_\w+)?\b')


class WeakRandomnessRule(BaseRule):
    rule_id = RuleId.WEAK_RANDOMNESS
    title = "Weak randomness"
    description = (
        "Non-cryptographic RNGs: SmallRng, StdRng::seed_from_u64, XorShiftRng, "
        "constant from_seed seeds and thread_rng feeding key or nonce bytes."
    )
    remediation = "Use OsRng (or another CryptoRng) for all key and nonce bytes."

    def check(self, context: AnalysisContext) -> List[Finding]:
        unit = context.unit
        text = unit.code_text
        findings = []

        for match in _WEAK_CONSTRUCTOR_RE.finditer(text):
            name = match.group(0).split(':')[0].strip()
            findings.append(self.finding(
                context, match.start(), f"{name} is not a cryptographically secure generator",
            ))

        for match in _SEEDED_RE.finditer(text):
            findings.append(self.finding(
                context, match.start(), "generator seeded from a u64 produces a predictable stream",
            ))

        for match in _FROM_SEED_RE.finditer(text):
            if self._constant_seed(unit, match.end() - 1):
                findings.append(self.finding(
                    context, match.start(), f"{match.group(1)} seeded with a constant",
                ))

        for match in _THREAD_RNG_RE.finditer(text):
            target = self._material_target(text, match.start(), match.end())
            if target:
                findings.append(self.finding(
                    context, match.start(),
                    f"thread_rng() supplies key/nonce bytes (`{target}`); use OsRng",
                ))
        return findings

    def _constant_seed(self, unit: SourceUnit, open_index: int) -> bool:
        _, args_end, _ = call_arguments(unit.code_text, open_index)
        arg_start, arg_end = first_argument_span(unit.code_text, open_index, args_end)
        if literal_span(unit.scan_text, arg_start, arg_end) is not None:
            return True
        return unit.code_text[arg_start:arg_end].strip().replace('_', '').isdigit()

    def _material_target(self, text: str, start: int, end: int) -> Optional[str]:
        statement = text[statement_start(text, start):statement_end(text, end)]
        material = _MATERIAL_RE.search(statement)
        if material:
            return material.group(0)

        binding = statement_binding(text, start)
        if binding is None:
            return None
        rng = re.compile(rf'\b{re.escape(binding[0])}\b')
        for use in rng.finditer(text, statement_end(text, end)):
            statement = text[statement_start(text, use.start()):statement_end(text, use.end())]
            material = _MATERIAL_RE.search(statement)
            if material:
                return material.group(0)
        return None


class MissingSecureGenerationRule(BaseRule):
    rule_id = RuleId.MISSING_SECURE_GENERATION
    title = "Missing secure generation"
    description = "File calls encrypt() with no CSPRNG usage anywhere."
    remediation = "Generate keys and nonces with OsRng, generate_key or generate_nonce."

    def check(self, context: AnalysisContext) -> List[Finding]:
        unit = context.unit
        call = ENCRYPT_CALL_RE.search(unit.scan_text)
        if call is None or ENTROPY_RE.search(unit.scan_text):
            return []
        return [self.finding(
            context, call.start() + 1,
            "encrypt() is called but no CSPRNG (OsRng, fill_bytes, generate_nonce, "
            "generate_key) appears anywhere in the file",
        )]
