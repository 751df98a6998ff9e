"""Configuration loading, validation and logging setup."""

import logging

import pytest

from aeadscan.config import (
    AeadScanConfig,
    ConfigError,
    ConfigFormat,
    ConfigManager,
    ExperimentConfig,
    LoggingConfig,
    configure_logging,
    default_providers,
)

ENV_VARS = ("AEADSCAN_LOG_LEVEL", "AEADSCAN_LOG_FILE", "AEADSCAN_FIXTURES", "AEADSCAN_WORKERS", "AEADSCAN_MODE")
KEY_VARS = ("OPENAI_API_KEY", "DEEPSEEK_API_KEY", "GEMINI_API_KEY")


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in ENV_VARS + KEY_VARS:
        monkeypatch.delenv(name, raising=False)


class TestExperimentValidation:

    def test_default_design(self):
        config = ExperimentConfig()
        assert config.sample_count == 240
        config.validate(default_providers())

    @pytest.mark.parametrize("changes,needle", [
        ({"temperature": 0.7}, "temperature"),
        ({"mode": "offline"}, "mode"),
        ({"models": ["llama"]}, "unknown model"),
        ({"models": []}, "at least one model"),
        ({"strategies": ["few_shot"]}, "few_shot"),
        ({"algorithms": ["AES_128_CBC"]}, "AES_128_CBC"),
        ({"replicates": 11}, "replicates"),
        ({"replicates": 0}, "replicates"),
        ({"workers": 0}, "workers"),
        ({"timeout_s": 0}, "timeout_s"),
    ])
    def test_invalid_designs(self, changes, needle):
        config = ExperimentConfig(**changes)
        with pytest.raises(ConfigError) as excinfo:
            config.validate(default_providers())
        assert needle in str(excinfo.value)

    def test_live_mode_needs_credentials(self):
        config = ExperimentConfig(mode="live", models=["gpt4o", "gemini"])
        with pytest.raises(ConfigError) as excinfo:
            config.validate(default_providers())
        assert "$OPENAI_API_KEY" in str(excinfo.value)
        assert "$GEMINI_API_KEY" in str(excinfo.value)

    def test_live_mode_with_credentials(self, monkeypatch):
        monkeypatch.setenv("OPENAI_API_KEY", "test-key")
        ExperimentConfig(mode="record", models=["gpt4o"]).validate(default_providers())

    def test_replay_needs_no_credentials(self):
        ExperimentConfig(mode="replay").validate(default_providers())


class TestFromDict:

    def test_sections(self):
        config = AeadScanConfig.from_dict({
            "scan": {"min_severity": "HIGH", "workers": 4},
            "experiment": {"replicates": 2},
            "logging": {"level": "DEBUG"},
        })
        assert config.scan.min_severity == "HIGH"
        assert config.scan.workers == 4
        assert config.experiment.replicates == 2
        assert config.logging.level == "DEBUG"

    def test_provider_override_merges_with_defaults(self):
        config = AeadScanConfig.from_dict({"providers": {"gpt4o": {"max_retries": 5}}})
        assert config.providers["gpt4o"].model == "gpt-4o"
        assert config.providers["gpt4o"].max_retries == 5
        assert set(config.providers) == {"gpt4o", "deepseek", "gemini"}

    def test_extra_provider(self):
        config = AeadScanConfig.from_dict({"providers": {"local": {"model": "codellama", "base_url": "http://localhost:8080/v1"}}})
        assert config.providers["local"].api_key_env == "OPENAI_API_KEY"

    def test_api_key_in_file_is_rejected(self):
        with pytest.raises(ConfigError) as excinfo:
            AeadScanConfig.from_dict({"providers": {"gpt4o": {"api_key": "sk-live"}}}, "aeadscan.yaml")
        assert "environment" in str(excinfo.value)
        assert excinfo.value.source == "aeadscan.yaml"

    def test_unknown_field(self):
        with pytest.raises(ConfigError):
            AeadScanConfig.from_dict({"scan": {"colour": "red"}})

    def test_non_mapping(self):
        with pytest.raises(ConfigError):
            AeadScanConfig.from_dict(["scan"])


class TestConfigManager:

    @pytest.mark.parametrize("fmt,name", [
        (ConfigFormat.YAML, "aeadscan.yaml"),
        (ConfigFormat.JSON, "aeadscan.json"),
        (ConfigFormat.TOML, "aeadscan.toml"),
    ])
    def test_save_and_load(self, tmp_path, fmt, name):
        manager = ConfigManager()
        original = AeadScanConfig()
        original.experiment.replicates = 3
        original.scan.rules = ["static_nonce"]
        path = tmp_path / name
        manager.save(original, path, fmt)

        loaded = manager.load(path)
        assert loaded.to_dict() == original.to_dict()
        assert manager.config_file == path

    def test_discovers_file_in_cwd(self, tmp_path, monkeypatch):
        (tmp_path / "aeadscan.yaml").write_text("scan:\n  min_severity: CRITICAL\n", encoding="utf-8")
        monkeypatch.chdir(tmp_path)
        manager = ConfigManager()
        assert manager.load().scan.min_severity == "CRITICAL"
        assert manager.config_file.name == "aeadscan.yaml"

    def test_defaults_without_file(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert ConfigManager().load().scan.min_severity == "MEDIUM"

    def test_missing_explicit_file(self, tmp_path):
        with pytest.raises(ConfigError):
            ConfigManager().load(tmp_path / "nope.yaml")

    def test_unparseable_file(self, tmp_path):
        path = tmp_path / "aeadscan.toml"
        path.write_text("[scan\nworkers = ", encoding="utf-8")
        with pytest.raises(ConfigError) as excinfo:
            ConfigManager().load(path)
        assert "cannot parse" in str(excinfo.value)

    def test_environment_overrides(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("AEADSCAN_WORKERS", "4")
        monkeypatch.setenv("AEADSCAN_FIXTURES", str(tmp_path / "data"))
        monkeypatch.setenv("AEADSCAN_MODE", "record")
        config = ConfigManager().load()
        assert (config.scan.workers, config.experiment.workers) == (4, 4)
        assert config.validation.corpus_dir == str(tmp_path / "data" / "corpus")
        assert config.experiment.fixture_dir == str(tmp_path / "data" / "generations")
        assert config.experiment.mode == "record"

    def test_bad_worker_override(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("AEADSCAN_WORKERS", "many")
        with pytest.raises(ConfigError):
            ConfigManager().load()


class TestLogging:

    def test_handlers_are_replaced_not_stacked(self):
        configure_logging(LoggingConfig())
        logger = configure_logging(LoggingConfig(level="INFO"))
        tagged = [h for h in logger.handlers if getattr(h, "_aeadscan", False)]
        assert len(tagged) == 1
        assert logger.level == logging.INFO

    def test_verbose_means_debug(self):
        assert configure_logging(LoggingConfig(), verbose=True).level == logging.DEBUG

    def test_log_file(self, tmp_path):
        log_file = tmp_path / "aeadscan.log"
        logger = configure_logging(LoggingConfig(level="INFO", file=str(log_file)))
        logging.getLogger("aeadscan.engine").info("scanned 3 files")
        for handler in logger.handlers:
            handler.flush()
        assert "scanned 3 files" in log_file.read_text(encoding="utf-8")
