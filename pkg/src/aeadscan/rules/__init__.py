"""
aeadscan Rule System

Each crypto-misuse detector is a BaseRule subclass living in a `*_rules.py`
module of this package; the registry discovers them on first use.

Rule modules:
- secret_rules: hardcoded_secret, key_from_external_input
- nonce_rules: nonce_reuse_in_loop, nonce_reuse_multi_call, static_nonce
- randomness_rules: weak_randomness, missing_secure_generation
- api_rules: unsafe_error_handling, deprecated_api
"""

from .base import AnalysisContext, BaseRule, RuleConfig, RuleRegistry

__all__ = ['AnalysisContext', 'BaseRule', 'RuleConfig', 'RuleRegistry', 'get_registry']

_registry = None


def get_registry() -> RuleRegistry:
    """Get the global rule registry instance."""
    global _registry
    if _registry is None:
        _registry = RuleRegistry()
        _registry.discover_rules()
    return _registry
