"""
aeadscan Provider System

Generation providers live in `*_provider.py` modules of this package and are
discovered on first use.

Providers:
- openai: live calls through an OpenAI-compatible chat-completions API
- record: live calls whose responses are written as replay fixtures
- replay: recorded fixtures only, no network
"""

from pathlib import Path
from typing import Optional, Union

from ..config import ProviderConfig
from .base import (
    BaseProvider,
    GenerationRequest,
    MissingFixture,
    ProviderError,
    ProviderRegistry,
    fixture_path,
    sample_id_for,
)

__all__ = [
    'BaseProvider', 'GenerationRequest', 'MissingFixture', 'ProviderError', 'ProviderRegistry',
    'fixture_path', 'sample_id_for', 'get_registry', 'provider_for_mode',
]

MODE_PROVIDERS = {
    "live": "openai",
    "record": "record",
    "replay": "replay",
}

_registry = None


def get_registry() -> ProviderRegistry:
    """Get the global provider registry instance."""
    global _registry
    if _registry is None:
        _registry = ProviderRegistry()
        _registry.discover_providers()
    return _registry


def provider_for_mode(mode: str, model_id: str, settings: Optional[ProviderConfig] = None,
                      fixture_dir: Optional[Union[str, Path]] = None) -> BaseProvider:
    """Build the provider an experiment mode calls for."""
    if mode not in MODE_PROVIDERS:
        raise ProviderError(f"unknown mode '{mode}'", model_id)
    return get_registry().create(MODE_PROVIDERS[mode], model_id, settings, fixture_dir)
