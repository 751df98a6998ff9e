"""
aeadscan Configuration System

Central configuration for scanning, validation and the generation
experiment. Configuration files may be YAML, JSON or TOML; environment
variables override file values. Provider credentials are read from the
environment only and are never accepted from a file.
"""

import json
import logging
import logging.handlers
import os
import sys
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import tomli_w
import yaml

from .prompts import parse_algorithm, parse_strategy

logger = logging.getLogger(__name__)

# Bundled data next to src/ in a checkout.
DEFAULT_FIXTURE_ROOT = Path(__file__).resolve().parents[2] / "fixtures"

MODES = ("live", "record", "replay")


class ConfigError(Exception):
    """Invalid or unsafe configuration."""
    def __init__(self, message: str, source: Optional[str] = None):
        self.message = message
        self.source = source
        super().__init__(f"{source}: {message}" if source else message)


class ConfigFormat(Enum):
    """Supported configuration file formats"""
    YAML = "yaml"
    JSON = "json"
    TOML = "toml"


def _default_fixture_root() -> Path:
    return DEFAULT_FIXTURE_ROOT if DEFAULT_FIXTURE_ROOT.is_dir() else Path("fixtures")


@dataclass
class ScanConfig:
    """Scanner options"""
    format: str = "text"
    min_severity: str = "MEDIUM"
    workers: int = 1
    rules: Optional[List[str]] = None


@dataclass
class ValidationConfig:
    """Validation corpus options"""
    corpus_dir: str = field(default_factory=lambda: str(_default_fixture_root() / "corpus"))
    suite: str = "benchmark"


@dataclass
class ProviderConfig:
    """One chat-completion provider reachable through an OpenAI-compatible API"""
    model: str
    label: str = ""
    base_url: Optional[str] = None
    api_key_env: str = "OPENAI_API_KEY"
    max_retries: int = 3
    backoff_seconds: float = 1.0
    request_timeout: float = 120.0

    def api_key(self) -> Optional[str]:
        return os.getenv(self.api_key_env) or None


def default_providers() -> Dict[str, ProviderConfig]:
    return {
        "gpt4o": ProviderConfig(
            model="gpt-4o",
            label="GPT-4o",
            api_key_env="OPENAI_API_KEY",
        ),
        "deepseek": ProviderConfig(
            model="deepseek-coder",
            label="DeepSeek Coder",
            base_url="https://api.deepseek.com",
            api_key_env="DEEPSEEK_API_KEY",
        ),
        "gemini": ProviderConfig(
            model="gemini-2.5-pro",
            label="Gemini 2.5 Pro",
            base_url="https://generativelanguage.googleapis.com/v1beta/openai/",
            api_key_env="GEMINI_API_KEY",
        ),
    }


@dataclass
class ExperimentConfig:
    """Generation experiment design and execution options"""
    models: List[str] = field(default_factory=lambda: ["gpt4o", "deepseek", "gemini"])
    algorithms: List[str] = field(default_factory=lambda: ["AES_256_GCM", "CHACHA20_POLY1305"])
    strategies: List[str] = field(default_factory=lambda: [
        "zero_shot", "constraint_based", "chain_of_thought", "security_focused",
    ])
    replicates: int = 10
    mode: str = "replay"
    temperature: float = 0.0
    timeout_s: float = 120.0
    workers: int = 1
    fixture_dir: str = field(default_factory=lambda: str(_default_fixture_root() / "generations"))
    results_path: str = "results/experiment.jsonl"
    cargo_target_dir: Optional[str] = None

    @property
    def sample_count(self) -> int:
        return len(self.models) * len(self.algorithms) * len(self.strategies) * self.replicates

    def validate(self, providers: Dict[str, ProviderConfig], require_credentials: Optional[bool] = None):
        """Reject an unusable design before any provider is contacted."""
        if self.temperature != 0.0:
            raise ConfigError(f"temperature must be 0.0 for deterministic generation, got {self.temperature}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}, got '{self.mode}'")
        if not self.models:
            raise ConfigError("at least one model is required")
        for model in self.models:
            if model not in providers:
                raise ConfigError(f"unknown model '{model}' (configured: {', '.join(sorted(providers))})")
        try:
            for strategy in self.strategies:
                parse_strategy(strategy)
            for algorithm in self.algorithms:
                parse_algorithm(algorithm)
        except ValueError as e:
            raise ConfigError(str(e))
        if not self.strategies or not self.algorithms:
            raise ConfigError("at least one strategy and one algorithm are required")
        if not 1 <= self.replicates <= 10:
            raise ConfigError(f"replicates must be in 1..10, got {self.replicates}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        if self.timeout_s <= 0:
            raise ConfigError(f"timeout_s must be positive, got {self.timeout_s}")

        if require_credentials is None:
            require_credentials = self.mode in ("live", "record")
        if require_credentials:
            missing = [
                f"{model} (${providers[model].api_key_env})"
                for model in self.models if providers[model].api_key() is None
            ]
            if missing:
                raise ConfigError(f"missing credentials for {', '.join(missing)}")


@dataclass
class LoggingConfig:
    """Logging configuration"""
    level: str = "WARNING"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    file: Optional[str] = None
    max_file_size_mb: int = 10
    backup_count: int = 5


@dataclass
class AeadScanConfig:
    """Main aeadscan configuration"""
    version: str = "1.0.0"
    project_name: str = "aeadscan_project"
    scan: ScanConfig = field(default_factory=ScanConfig)
    validation: ValidationConfig = field(default_factory=ValidationConfig)
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)
    providers: Dict[str, ProviderConfig] = field(default_factory=default_providers)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]], source: Optional[str] = None) -> 'AeadScanConfig':
        """Create configuration from dictionary"""
        data = data or {}
        if not isinstance(data, dict):
            raise ConfigError("top level must be a mapping", source)
        if _contains_key(data, "api_key"):
            raise ConfigError("credentials must come from environment variables, not 'api_key' in a config file",
                              source)
        config = cls()

        if 'version' in data:
            config.version = str(data['version'])
        if 'project_name' in data:
            config.project_name = data['project_name']

        try:
            if 'scan' in data:
                config.scan = ScanConfig(**data['scan'])
            if 'validation' in data:
                config.validation = ValidationConfig(**data['validation'])
            if 'experiment' in data:
                config.experiment = ExperimentConfig(**data['experiment'])
            if 'providers' in data:
                providers = default_providers()
                for name, provider_data in (data['providers'] or {}).items():
                    if name in providers:
                        merged = asdict(providers[name])
                        merged.update(provider_data or {})
                        providers[name] = ProviderConfig(**merged)
                    else:
                        providers[name] = ProviderConfig(**provider_data)
                config.providers = providers
            if 'logging' in data:
                config.logging = LoggingConfig(**data['logging'])
        except TypeError as e:
            raise ConfigError(f"invalid configuration section: {e}", source)

        return config

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary"""
        return asdict(self)

    def set_fixture_root(self, root: str):
        """Point corpus and generation fixtures at ``root``."""
        self.validation.corpus_dir = str(Path(root) / "corpus")
        self.experiment.fixture_dir = str(Path(root) / "generations")

    def apply_env_overrides(self):
        """Apply environment variable overrides"""
        if os.getenv('AEADSCAN_LOG_LEVEL'):
            self.logging.level = os.getenv('AEADSCAN_LOG_LEVEL')
        if os.getenv('AEADSCAN_LOG_FILE'):
            self.logging.file = os.getenv('AEADSCAN_LOG_FILE')
        if os.getenv('AEADSCAN_FIXTURES'):
            self.set_fixture_root(os.getenv('AEADSCAN_FIXTURES'))
        if os.getenv('AEADSCAN_WORKERS'):
            try:
                workers = int(os.getenv('AEADSCAN_WORKERS'))
            except ValueError:
                raise ConfigError(f"AEADSCAN_WORKERS must be an integer, got '{os.getenv('AEADSCAN_WORKERS')}'")
            self.scan.workers = workers
            self.experiment.workers = workers
        if os.getenv('AEADSCAN_MODE'):
            self.experiment.mode = os.getenv('AEADSCAN_MODE')


def _contains_key(data: Any, key: str) -> bool:
    if isinstance(data, dict):
        return key in data or any(_contains_key(value, key) for value in data.values())
    if isinstance(data, list):
        return any(_contains_key(item, key) for item in data)
    return False


class ConfigManager:
    """Manages configuration loading and saving"""

    DEFAULT_CONFIG_NAMES = [
        "aeadscan.yaml",
        "aeadscan.yml",
        "aeadscan.json",
        "aeadscan.toml",
        ".aeadscan",
    ]

    def __init__(self):
        self._config: Optional[AeadScanConfig] = None
        self._config_file: Optional[Path] = None

    @property
    def config_file(self) -> Optional[Path]:
        return self._config_file

    def load(self, config_path: Optional[Path] = None, auto_discover: bool = True) -> AeadScanConfig:
        """
        Load configuration from file or auto-discover

        Args:
            config_path: Explicit path to config file
            auto_discover: If True, search for config files in current directory

        Returns:
            Loaded configuration with environment overrides applied
        """
        if config_path:
            return self._load_from_file(Path(config_path))

        if auto_discover:
            discovered = self._discover_config()
            if discovered:
                return self._load_from_file(discovered)

        config = AeadScanConfig()
        config.apply_env_overrides()
        self._config = config
        return config

    def _discover_config(self) -> Optional[Path]:
        """Discover configuration file in current directory"""
        cwd = Path.cwd()
        for config_name in self.DEFAULT_CONFIG_NAMES:
            config_path = cwd / config_name
            if config_path.exists():
                return config_path
        return None

    def _load_from_file(self, config_path: Path) -> AeadScanConfig:
        """Load configuration from specific file"""
        if not config_path.exists():
            raise ConfigError("configuration file not found", str(config_path))

        suffix = config_path.suffix.lower()
        try:
            if suffix in ['.yaml', '.yml']:
                data = yaml.safe_load(config_path.read_text(encoding='utf-8'))
            elif suffix == '.toml':
                with open(config_path, 'rb') as f:
                    data = tomllib.load(f)
            else:
                # JSON, and the fallback for extension-less files
                data = json.loads(config_path.read_text(encoding='utf-8'))
        except (yaml.YAMLError, tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot parse configuration: {e}", str(config_path))

        config = AeadScanConfig.from_dict(data, str(config_path))
        config.apply_env_overrides()
        self._config = config
        self._config_file = config_path
        logger.debug("Loaded configuration from %s", config_path)
        return config

    def save(self, config: AeadScanConfig, output_path: Path, format: ConfigFormat = ConfigFormat.YAML):
        """Save configuration to file"""
        data = _drop_none(config.to_dict())

        if format == ConfigFormat.JSON:
            with open(output_path, 'w', encoding='utf-8') as f:
                json.dump(data, f, indent=2)
        elif format == ConfigFormat.YAML:
            with open(output_path, 'w', encoding='utf-8') as f:
                yaml.dump(data, f, default_flow_style=False, sort_keys=False)
        elif format == ConfigFormat.TOML:
            with open(output_path, 'wb') as f:
                tomli_w.dump(data, f)


def _drop_none(data: Any) -> Any:
    # TOML has no null
    if isinstance(data, dict):
        return {k: _drop_none(v) for k, v in data.items() if v is not None}
    if isinstance(data, list):
        return [_drop_none(v) for v in data]
    return data


def configure_logging(config: LoggingConfig, verbose: bool = False) -> logging.Logger:
    """Attach handlers to the package logger according to ``config``."""
    package_logger = logging.getLogger("aeadscan")
    for handler in list(package_logger.handlers):
        if getattr(handler, "_aeadscan", False):
            package_logger.removeHandler(handler)
            handler.close()

    level = logging.DEBUG if verbose else getattr(logging, str(config.level).upper(), logging.WARNING)
    package_logger.setLevel(level)
    formatter = logging.Formatter(config.format)

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if config.file:
        handlers.append(logging.handlers.RotatingFileHandler(
            config.file,
            maxBytes=config.max_file_size_mb * 1024 * 1024,
            backupCount=config.backup_count,
            encoding="utf-8",
        ))
    for handler in handlers:
        handler.setFormatter(formatter)
        handler._aeadscan = True  # type: ignore[attr-defined]
        package_logger.addHandler(handler)
    return package_logger


# Global config manager instance
_config_manager = ConfigManager()


def load_config(config_path: Optional[Path] = None) -> AeadScanConfig:
    """Load configuration (convenience function)"""
    return _config_manager.load(config_path)
