"""Replay provider: serves recorded responses from the fixture tree."""

import logging

from .base import BaseProvider, GenerationRequest, MissingFixture, ProviderError, fixture_path

logger = logging.getLogger(__name__)


class ReplayProvider(BaseProvider):
    name = "replay"
    description = "Recorded responses from fixtures/generations, no network"

    def complete(self, request: GenerationRequest) -> str:
        if self.fixture_dir is None:
            raise ProviderError("replay mode needs a fixture directory", self.model_id)
        path = fixture_path(self.fixture_dir, request.sample_id)
        if not path.is_file():
            raise MissingFixture(request.sample_id, path)
        logger.debug("Replaying %s", path)
        # no newline translation
        return path.read_bytes().decode("utf-8")
