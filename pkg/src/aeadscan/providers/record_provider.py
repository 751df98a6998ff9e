"""Record provider: live generation that also writes replay fixtures."""

import logging

from .base import BaseProvider, GenerationRequest, ProviderError, fixture_path
from .openai_provider import OpenAIProvider

logger = logging.getLogger(__name__)


class RecordProvider(BaseProvider):
    name = "record"
    description = "Live chat completions persisted under fixtures/generations"

    def __init__(self, model_id, settings=None, fixture_dir=None):
        super().__init__(model_id, settings, fixture_dir)
        if self.fixture_dir is None:
            raise ProviderError("record mode needs a fixture directory", model_id)
        self.live = OpenAIProvider(model_id, settings)

    def complete(self, request: GenerationRequest) -> str:
        text = self.live.complete(request)
        path = fixture_path(self.fixture_dir, request.sample_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(text.encode("utf-8"))
        logger.info("Recorded %s", path)
        return text

    def close(self):
        self.live.close()
