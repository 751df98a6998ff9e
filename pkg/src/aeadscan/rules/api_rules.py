"""
API usage rules: panicking error handling on crypto calls (CWE-252) and
removed or unauthenticated interfaces (CWE-327).
"""

import re
from typing import List

from ..findings import Finding, RuleId
from ..structure import receiver_chain
from .base import AnalysisContext, BaseRule

_PANIC_RE = re.compile(r'\.\s*(?:(unwrap)\s*\(\s*\)|(expect)\s*\()')

_CRYPTO_CALL_RE = re.compile(
    r'^(?:(?:en|de)crypt(?:_in_place(?:_detached)?)?'
    r'|new_from_slice|new_varkey|from_slice|clone_from_slice|try_fill_bytes)$'
)

_NEW_AEAD_RE = re.compile(r'\bNewAead\b')
_NEW_VARKEY_RE = re.compile(r'\bnew_varkey\s*\(')
_RAW_AES_IMPORT_RE = re.compile(r'\buse\s+aes\s*::')
_AEAD_MODE_RE = re.compile(
    r'\b(?:aes_gcm(?:_siv)?|aes_siv|chacha20poly1305|ccm|eax|Aead|AeadInPlace)\b'
)


class UnsafeErrorHandlingRule(BaseRule):
    rule_id = RuleId.UNSAFE_ERROR_HANDLING
    title = "Unsafe error handling"
    description = "unwrap() or expect() chained on a cryptographic operation."
    remediation = "Propagate crypto errors with `?` or map_err instead of panicking."

    def check(self, context: AnalysisContext) -> List[Finding]:
        text = context.unit.code_text
        findings = []
        for match in _PANIC_RE.finditer(text):
            method = match.group(1) or match.group(2)
            calls = receiver_chain(text, match.start())
            crypto = next((name for name in calls if _CRYPTO_CALL_RE.match(name)), None)
            if crypto is None:
                continue
            start = match.start(1) if match.group(1) else match.start(2)
            findings.append(self.finding(
                context, start, f"{method}() on the result of {crypto}() panics on failure",
            ))
        return findings


class DeprecatedApiRule(BaseRule):
    rule_id = RuleId.DEPRECATED_API
    title = "Deprecated API"
    description = "Removed interfaces (NewAead, new_varkey) or raw AES without an authenticated mode."
    remediation = "Construct ciphers with KeyInit::new and use an AEAD mode such as AES-GCM."

    def check(self, context: AnalysisContext) -> List[Finding]:
        text = context.unit.code_text
        findings = []
        for match in _NEW_AEAD_RE.finditer(text):
            findings.append(self.finding(
                context, match.start(), "NewAead was removed; use KeyInit",
            ))
        for match in _NEW_VARKEY_RE.finditer(text):
            findings.append(self.finding(
                context, match.start(), "new_varkey() was removed; use new_from_slice()",
            ))
        if not _AEAD_MODE_RE.search(text):
            for match in _RAW_AES_IMPORT_RE.finditer(text):
                findings.append(self.finding(
                    context, match.start(), "raw AES block cipher imported without an authenticated mode",
                ))
        return findings
