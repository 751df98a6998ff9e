"""
OpenAI-compatible chat provider.

GPT-4o, DeepSeek Coder and Gemini 2.5 Pro are all reachable through the
chat-completions API; only the base URL, model name and key variable
differ, and those come from ProviderConfig. The ``openai`` package is an
optional extra (``pip install aeadscan[live]``) and is imported on first
use.
"""

import logging
import time
from typing import Any, Optional, Tuple, Type

from ..config import ProviderConfig
from .base import BaseProvider, GenerationRequest, ProviderError

logger = logging.getLogger(__name__)


def _retryable_errors() -> Tuple[Type[BaseException], ...]:
    try:
        import openai
    except ImportError:
        return (ConnectionError, TimeoutError)
    return (openai.APIError, ConnectionError, TimeoutError)


class OpenAIProvider(BaseProvider):
    name = "openai"
    description = "Live chat completions through an OpenAI-compatible endpoint"

    def __init__(self, model_id: str, settings: Optional[ProviderConfig] = None, fixture_dir=None):
        super().__init__(model_id, settings, fixture_dir)
        if self.settings is None:
            raise ProviderError("no provider settings configured", model_id)
        self._client: Any = None

    @property
    def client(self) -> Any:
        if self._client is None:
            try:
                from openai import OpenAI
            except ImportError:
                raise ProviderError("the 'openai' package is required for live generation "
                                    "(pip install aeadscan[live])", self.model_id)
            api_key = self.settings.api_key()
            if api_key is None:
                raise ProviderError(f"${self.settings.api_key_env} is not set", self.model_id)
            self._client = OpenAI(
                api_key=api_key,
                base_url=self.settings.base_url,
                timeout=self.settings.request_timeout,
                max_retries=0,
            )
        return self._client

    def complete(self, request: GenerationRequest) -> str:
        retryable = _retryable_errors()
        attempts = self.settings.max_retries + 1
        for attempt in range(attempts):
            try:
                response = self.client.chat.completions.create(
                    model=self.settings.model,
                    messages=[{"role": "user", "content": request.prompt.text}],
                    temperature=request.temperature,
                )
                return response.choices[0].message.content or ""
            except retryable as e:
                if attempt + 1 >= attempts:
                    raise ProviderError(f"{type(e).__name__} after {attempts} attempts: {e}", self.model_id)
                delay = self.settings.backoff_seconds * (2 ** attempt)
                logger.warning("%s: %s on %s, retrying in %.1fs (%d/%d)", self.model_id,
                               type(e).__name__, request.sample_id, delay, attempt + 1, self.settings.max_retries)
                time.sleep(delay)
        raise ProviderError("no attempts made", self.model_id)

    def close(self):
        if self._client is not None and hasattr(self._client, "close"):
            self._client.close()
        self._client = None
