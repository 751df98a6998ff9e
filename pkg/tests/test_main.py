"""Command-line interface."""

import json
import shutil

import pytest
import yaml

from aeadscan import __version__
from aeadscan.findings import RuleId
from aeadscan.main import EXIT_CLEAN, EXIT_ERROR, EXIT_FINDINGS, build_parser, main

from conftest import CODEQL_DIR, CORPUS_DIR, DIAGNOSTICS_DIR, GENERATIONS_DIR, SECURE_PROGRAM

MULTI_CALL_PATH = CORPUS_DIR / "regression" / "multi_call_nonce_reuse.rs"
UNWRAP_ONLY_PATH = CORPUS_DIR / "synthetic" / "unsafe_error_handling.rs"


@pytest.fixture(autouse=True)
def _isolated(tmp_path, monkeypatch):
    """No config file discovery and no environment overrides."""
    monkeypatch.chdir(tmp_path)
    for name in ("AEADSCAN_LOG_LEVEL", "AEADSCAN_LOG_FILE", "AEADSCAN_FIXTURES", "AEADSCAN_WORKERS",
                 "AEADSCAN_MODE", "OPENAI_API_KEY", "DEEPSEEK_API_KEY", "GEMINI_API_KEY"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def secure_file(tmp_path):
    path = tmp_path / "secure.rs"
    path.write_text(SECURE_PROGRAM, encoding="utf-8")
    return path


class TestScan:

    def test_clean_file(self, secure_file, capsys):
        assert main(["scan", str(secure_file)]) == EXIT_CLEAN
        assert "✅ no findings (1 file scanned)" in capsys.readouterr().out

    def test_findings_set_exit_status(self, capsys):
        assert main(["scan", str(MULTI_CALL_PATH)]) == EXIT_FINDINGS
        assert "nonce_reuse_multi_call" in capsys.readouterr().out

    def test_severity_threshold(self, capsys):
        assert main(["scan", str(UNWRAP_ONLY_PATH)]) == EXIT_FINDINGS
        assert main(["scan", str(UNWRAP_ONLY_PATH), "--min-severity", "critical"]) == EXIT_CLEAN
        assert main(["scan", str(MULTI_CALL_PATH), "--min-severity", "CRITICAL"]) == EXIT_FINDINGS

    def test_directory_scan_as_json(self, capsys):
        assert main(["scan", str(CORPUS_DIR / "regression"), "--json"]) == EXIT_FINDINGS
        document = json.loads(capsys.readouterr().out)
        assert document["kind"] == "scan"
        assert document["body"]["summary"]["files"] == 3

    def test_sarif(self, capsys):
        main(["scan", str(MULTI_CALL_PATH), "--format", "sarif"])
        sarif = json.loads(capsys.readouterr().out)
        assert sarif["version"] == "2.1.0"
        assert {r["ruleId"] for r in sarif["runs"][0]["results"]} == {"nonce_reuse_multi_call", "unsafe_error_handling"}

    def test_unreadable_file_is_an_error(self, tmp_path, secure_file, capsys):
        assert main(["scan", str(secure_file), str(tmp_path / "missing.rs")]) == EXIT_ERROR
        err = capsys.readouterr().err
        assert "🚨 Cannot scan " in err and "missing.rs" in err

    def test_baseline(self, capsys):
        status = main(["scan", str(CODEQL_DIR / "initialize_then_fill.rs"),
                       "--baseline", str(CODEQL_DIR / "codeql-results.sarif")])
        out = capsys.readouterr().out
        assert status == EXIT_CLEAN
        assert "CodeQL reported 2 result(s)" in out
        assert "not reported by aeadscan" in out

    def test_missing_baseline(self, secure_file, tmp_path, capsys):
        assert main(["scan", str(secure_file), "--baseline", str(tmp_path / "none.sarif")]) == EXIT_ERROR
        assert "ReportError" in capsys.readouterr().err


class TestValidate:

    def test_benchmark_text(self, capsys):
        assert main(["validate", "--corpus", str(CORPUS_DIR)]) == EXIT_CLEAN
        out = capsys.readouterr().out
        assert "benchmark suite (20 cases)" in out
        assert "TP 14  FP 0  FN 4  TN 2" in out

    def test_synthetic_json(self, capsys):
        assert main(["validate", "--corpus", str(CORPUS_DIR), "--suite", "synthetic", "--json"]) == EXIT_CLEAN
        body = json.loads(capsys.readouterr().out)["body"]
        assert (body["tp"], body["fp"], body["fn"], body["tn"]) == (5, 0, 0, 1)
        assert body["suite"] == "synthetic"

    def test_missing_case_file(self, tmp_path, capsys):
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        (corpus / "manifest.yaml").write_text(
            "version: 1\ncases:\n  - {id: gone, path: gone.rs, kind: secure_control}\n", encoding="utf-8")
        assert main(["validate", "--corpus", str(corpus), "--suite", "all"]) == EXIT_ERROR
        assert "MissingCase" in capsys.readouterr().err


class TestAnalysisCommands:

    def test_stats(self, capsys):
        assert main(["stats"]) == EXIT_CLEAN
        out = capsys.readouterr().out
        assert "Compilation success by model" in out
        assert "Yates-corrected" in out

    def test_stats_rejects_single_row_table(self, tmp_path, capsys):
        counts = tmp_path / "counts.yaml"
        counts.write_text("tables:\n  - name: one\n    rows:\n      - {label: a, successes: 3, trials: 10}\n",
                          encoding="utf-8")
        assert main(["stats", "--counts", str(counts)]) == EXIT_ERROR
        assert "at least 2 rows" in capsys.readouterr().err

    def test_classify_errors_with_labels(self, capsys):
        status = main(["classify-errors", str(DIAGNOSTICS_DIR), "--labels", str(DIAGNOSTICS_DIR / "labels.yaml")])
        assert status == EXIT_CLEAN
        assert "Hand labels matched: 16/16" in capsys.readouterr().out

    def test_classify_errors_label_mismatch(self, tmp_path, capsys):
        labels = tmp_path / "labels.yaml"
        labels.write_text("clean_build.jsonl: TypeError\n", encoding="utf-8")
        status = main(["classify-errors", str(DIAGNOSTICS_DIR / "clean_build.jsonl"), "--labels", str(labels)])
        assert status == EXIT_FINDINGS


class TestExperiment:

    def test_run_then_report(self, tmp_path, capsys):
        results = tmp_path / "experiment.jsonl"
        status = main(["experiment", "run", "--mode", "replay", "--fixtures", str(GENERATIONS_DIR),
                       "--results", str(results), "--check-ground-truth"])
        err = capsys.readouterr().err
        assert status == EXIT_CLEAN
        assert "48 samples, 14 compiled" in err
        assert "results match the fixture manifest" in err

        assert main(["experiment", "report", "--results", str(results)]) == EXIT_CLEAN
        out = capsys.readouterr().out
        assert out.startswith("🧪 Experiment: 14/48 samples compiled")
        assert "GPT-4o" in out

    def test_ground_truth_flags_unlisted_samples(self, tmp_path, capsys):
        fixtures = tmp_path / "generations"
        shutil.copytree(GENERATIONS_DIR, fixtures)
        manifest_path = fixtures / "manifest.yaml"
        manifest = yaml.safe_load(manifest_path.read_text(encoding="utf-8"))
        del manifest["samples"]["gpt4o/AES_256_GCM/zero_shot/r02"]
        manifest_path.write_text(yaml.safe_dump(manifest), encoding="utf-8")

        status = main(["experiment", "run", "--mode", "replay", "--fixtures", str(fixtures),
                       "--results", str(tmp_path / "experiment.jsonl"), "--check-ground-truth"])
        err = capsys.readouterr().err
        assert status == EXIT_ERROR
        assert "run but not in manifest: gpt4o/AES_256_GCM/zero_shot/r02" in err
        assert "results match" not in err

    def test_report_without_store(self, tmp_path, capsys):
        assert main(["experiment", "report", "--results", str(tmp_path / "none.jsonl")]) == EXIT_ERROR

    def test_live_mode_without_credentials(self, tmp_path, capsys):
        status = main(["experiment", "run", "--mode", "live", "--models", "gpt4o", "--replicates", "1",
                       "--results", str(tmp_path / "r.jsonl")])
        assert status == EXIT_ERROR
        assert "OPENAI_API_KEY" in capsys.readouterr().err

    def test_missing_subcommand(self, capsys):
        assert main(["experiment"]) == EXIT_ERROR


class TestMisc:

    def test_rules(self, capsys):
        assert main(["rules", "--remediation"]) == EXIT_CLEAN
        out = capsys.readouterr().out
        for rule_id in RuleId:
            assert rule_id.value in out
        assert "Remediation:" in out

    def test_version(self, capsys):
        assert main(["version"]) == EXIT_CLEAN
        assert capsys.readouterr().out.strip() == f"aeadscan v{__version__}"

    def test_no_command(self, capsys):
        assert main([]) == EXIT_ERROR

    def test_missing_config_file(self, tmp_path, capsys):
        assert main(["--config", str(tmp_path / "nope.yaml"), "version"]) == EXIT_ERROR
        assert "Configuration error" in capsys.readouterr().err

    def test_min_severity_is_case_insensitive(self):
        args = build_parser().parse_args(["scan", "x.rs", "--min-severity", "high"])
        assert args.min_severity == "HIGH"
