"""
Base Provider Architecture for aeadscan

Defines the request/response interface every generation provider
implements and the registry that discovers provider modules. A provider is
bound to one configured model; the experiment pipeline only ever sees
``complete(request) -> str``.
"""

import importlib
import inspect
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Type, Union

from ..config import ProviderConfig
from ..prompts import PromptSpec

logger = logging.getLogger(__name__)

CellKey = Tuple[str, str, str]


class ProviderError(Exception):
    """A provider call failed after its retry policy was exhausted."""
    def __init__(self, message: str, model_id: Optional[str] = None):
        self.message = message
        self.model_id = model_id
        super().__init__(f"{model_id}: {message}" if model_id else message)


class MissingFixture(ProviderError):
    """Replay was asked for a sample that was never recorded."""
    def __init__(self, sample_id: str, path: Path):
        self.sample_id = sample_id
        self.path = path
        super().__init__(f"no recorded fixture for {sample_id} (expected {path})")


@dataclass(frozen=True)
class GenerationRequest:
    """One generation call: which model, which prompt, which replicate slot."""
    model_id: str
    prompt: PromptSpec
    replicate: int
    temperature: float = 0.0

    @property
    def cell(self) -> CellKey:
        return (self.model_id, self.prompt.algorithm.value, self.prompt.strategy.value)

    @property
    def sample_id(self) -> str:
        return sample_id_for(self.cell, self.replicate)


def sample_id_for(cell: CellKey, replicate: int) -> str:
    model_id, algorithm, strategy = cell
    return f"{model_id}/{algorithm}/{strategy}/r{replicate:02d}"


def fixture_path(fixture_dir: Union[str, Path], sample_id: str, suffix: str = ".md") -> Path:
    """``<fixture_dir>/<model>/<algorithm>/<strategy>/rNN<suffix>``"""
    return Path(fixture_dir) / f"{sample_id}{suffix}"


class BaseProvider(ABC):
    """
    Abstract base class for generation providers.

    Subclasses set ``name`` (the registry key) and ``description`` and
    implement ``complete``.
    """

    name: str = ""
    description: str = ""

    def __init__(self, model_id: str, settings: Optional[ProviderConfig] = None,
                 fixture_dir: Optional[Union[str, Path]] = None):
        self.model_id = model_id
        self.settings = settings
        self.fixture_dir = Path(fixture_dir) if fixture_dir else None

    @abstractmethod
    def complete(self, request: GenerationRequest) -> str:
        """Return the raw model response for ``request``."""
        pass

    def close(self):
        """Release any client resources."""


class ProviderRegistry:
    """Registry of available provider classes."""

    def __init__(self):
        self._providers: Dict[str, Type[BaseProvider]] = {}

    def register(self, provider_class: Type[BaseProvider]):
        if not provider_class.name:
            raise ValueError(f"Provider class {provider_class.__name__} has no name")
        self._providers[provider_class.name] = provider_class

    def list_providers(self) -> List[str]:
        return sorted(self._providers)

    def get_provider_class(self, name: str) -> Optional[Type[BaseProvider]]:
        return self._providers.get(name)

    def create(self, name: str, model_id: str, settings: Optional[ProviderConfig] = None,
               fixture_dir: Optional[Union[str, Path]] = None) -> BaseProvider:
        provider_class = self.get_provider_class(name)
        if provider_class is None:
            raise ProviderError(f"unknown provider '{name}' (available: {', '.join(self.list_providers())})",
                                model_id)
        return provider_class(model_id, settings, fixture_dir)

    def discover_providers(self):
        """Auto-discover and register providers from `*_provider.py` modules in this package."""
        providers_dir = Path(__file__).parent

        for provider_file in sorted(providers_dir.glob("*_provider.py")):
            module_name = f"{__package__}.{provider_file.stem}"

            try:
                module = importlib.import_module(module_name)
            except ImportError as e:
                logger.warning("Skipping provider module %s: %s", module_name, e)
                continue

            for _, obj in inspect.getmembers(module, inspect.isclass):
                if (issubclass(obj, BaseProvider) and
                        obj is not BaseProvider and
                        not inspect.isabstract(obj) and
                        obj.__module__ == module.__name__):
                    self.register(obj)
