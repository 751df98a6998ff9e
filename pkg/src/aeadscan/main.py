#!/usr/bin/env python3
"""
aeadscan

Command-line interface: scan Rust sources for AEAD misuse, score the
analyzer on its validation corpus, classify compiler diagnostics, compute
the study statistics and run or report generation experiments.

Exit status: 0 clean, 1 findings at or above the severity threshold,
2 operational error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

import yaml

from . import __version__
from .build import BuildError
from .config import DEFAULT_FIXTURE_ROOT, MODES, AeadScanConfig, ConfigError, configure_logging, load_config
from .corpus import CorpusError, load_suite, run_validation
from .diagnostics import CompilationOutcome, parse_diagnostics
from .engine import rule_catalog, scan_paths
from .error_reporter import create_error_report
from .findings import Severity
from .pipeline import (
    check_ground_truth,
    fixture_replicates,
    load_ground_truth,
    load_results,
    run_experiment,
)
from .providers import ProviderError
from .reporting import (
    ReportDocument,
    ReportError,
    baseline_body,
    experiment_body,
    load_sarif,
    scan_body,
    stats_body,
    taxonomy_body,
    validation_body,
)
from .source import SourceError
from .statistics import StatisticsError

logger = logging.getLogger(__name__)

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_ERROR = 2

DEFAULT_COUNTS = DEFAULT_FIXTURE_ROOT / "stats" / "study_counts.yaml"

OPERATIONAL_ERRORS = (
    BuildError, ConfigError, CorpusError, ProviderError, ReportError,
    SourceError, StatisticsError, OSError, ValueError, yaml.YAMLError,
)


def _emit(document: ReportDocument):
    print(document.render())


def _format(args: argparse.Namespace, default: str) -> str:
    if getattr(args, "json", False):
        return "json"
    return args.format or default


def cmd_scan(args: argparse.Namespace, config: AeadScanConfig) -> int:
    """Scan files and directories; exit 1 if any finding meets the threshold."""
    min_severity = Severity.parse(args.min_severity or config.scan.min_severity)
    workers = args.workers or config.scan.workers
    reports = scan_paths(args.paths, workers=workers, rules=config.scan.rules)

    body = scan_body(reports, min_severity)
    if args.baseline:
        body["baseline"] = baseline_body(load_sarif(args.baseline), args.baseline, reports)
    _emit(ReportDocument("scan", body, _format(args, config.scan.format)))

    errors = [report for report in reports if report.error]
    for report in errors:
        print(create_error_report(report), file=sys.stderr)
    if errors:
        return EXIT_ERROR
    if body["summary"]["at_or_above_threshold"]:
        return EXIT_FINDINGS
    return EXIT_CLEAN


def cmd_validate(args: argparse.Namespace, config: AeadScanConfig) -> int:
    """Score the analyzer on the validation corpus."""
    corpus_dir = args.corpus or config.validation.corpus_dir
    suite = args.suite or config.validation.suite
    cases = load_suite(corpus_dir, suite)
    score = run_validation(cases, workers=config.scan.workers)
    _emit(ReportDocument("validation", validation_body(score, suite, str(corpus_dir)), _format(args, "text")))
    return EXIT_CLEAN


def _diagnostic_streams(paths: List[Path]) -> List[Path]:
    streams: List[Path] = []
    for path in paths:
        if path.is_dir():
            streams.extend(sorted(path.glob("*.jsonl")))
        else:
            streams.append(path)
    return streams


def cmd_classify_errors(args: argparse.Namespace, config: AeadScanConfig) -> int:
    """Classify captured `cargo --message-format=json` streams."""
    outcomes = []
    for stream in _diagnostic_streams(args.paths):
        diagnostics = parse_diagnostics(stream.read_text(encoding="utf-8"))
        outcomes.append(CompilationOutcome.from_diagnostics(stream.name, diagnostics))

    labels: Optional[Dict[str, str]] = None
    if args.labels:
        with open(args.labels, encoding="utf-8") as f:
            labels = {str(k): str(v) for k, v in (yaml.safe_load(f) or {}).items()}
    body = taxonomy_body(outcomes, labels)
    _emit(ReportDocument("taxonomy", body, _format(args, "text")))
    return EXIT_FINDINGS if body.get("label_mismatches") else EXIT_CLEAN


def cmd_stats(args: argparse.Namespace, config: AeadScanConfig) -> int:
    """Compilation tables with Wilson intervals and chi-square footnotes."""
    counts_path = args.counts or DEFAULT_COUNTS
    with open(counts_path, encoding="utf-8") as f:
        counts = yaml.safe_load(f)
    body = stats_body(counts, strict=True, source=str(counts_path))
    _emit(ReportDocument("stats", body, _format(args, "text")))
    return EXIT_CLEAN


def _experiment_config(args: argparse.Namespace, config: AeadScanConfig):
    experiment = config.experiment
    if args.mode:
        experiment.mode = args.mode
    if args.fixtures:
        experiment.fixture_dir = str(args.fixtures)
    if args.workers:
        experiment.workers = args.workers
    if args.models:
        experiment.models = args.models
    if args.replicates:
        experiment.replicates = args.replicates
    elif experiment.mode == "replay":
        recorded = fixture_replicates(experiment.fixture_dir)
        if recorded and recorded < experiment.replicates:
            logger.info("Fixture set holds %d replicates per cell; replaying those", recorded)
            experiment.replicates = recorded
    if args.results:
        experiment.results_path = str(args.results)
    return experiment


def cmd_experiment_run(args: argparse.Namespace, config: AeadScanConfig) -> int:
    """Generate, compile and scan every sample of the experiment design."""
    experiment = _experiment_config(args, config)
    matrix = run_experiment(experiment, config.providers)
    records = matrix.to_records()
    print(f"✓ {len(records)} samples, {sum(1 for r in records if r['compiled'])} compiled "
          f"→ {experiment.results_path}", file=sys.stderr)

    status = EXIT_CLEAN
    if matrix.failed_samples:
        status = EXIT_ERROR
    if experiment.mode == "replay" and args.check_ground_truth:
        check = check_ground_truth(records, load_ground_truth(experiment.fixture_dir))
        if not check.ok:
            print("✗ results differ from the fixture manifest", file=sys.stderr)
            for line in check.describe():
                print(f"  {line}", file=sys.stderr)
            status = EXIT_ERROR
        else:
            print("✓ results match the fixture manifest", file=sys.stderr)
    return status


def cmd_experiment_report(args: argparse.Namespace, config: AeadScanConfig) -> int:
    """Tables from a results store written by `experiment run`."""
    path = args.results or config.experiment.results_path
    records = load_results(path)
    labels = {name: provider.label for name, provider in config.providers.items()}
    _emit(ReportDocument("experiment", experiment_body(records, labels), _format(args, "text")))
    return EXIT_CLEAN


def cmd_rules(args: argparse.Namespace, config: AeadScanConfig) -> int:
    print("Available aeadscan rules:")
    print("=" * 40)
    for info in rule_catalog():
        print(f"\n🔒 {info['rule_id']}  CWE-{info['cwe']}  {info['severity']}")
        print(f"   {info['title']}: {info['description']}")
        if args.remediation:
            print(f"   Remediation: {info['remediation']}")
    return EXIT_CLEAN


def cmd_version(args: argparse.Namespace, config: AeadScanConfig) -> int:
    print(f"aeadscan v{__version__}")
    return EXIT_CLEAN


def _add_format(parser: argparse.ArgumentParser, choices=("text", "json")):
    parser.add_argument('--format', choices=choices, help='Output format')
    parser.add_argument('--json', action='store_true', help='Shorthand for --format json')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aeadscan",
        description="aeadscan - detect AEAD crypto misuse in Rust source",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Scan files or directories
  aeadscan scan src/main.rs
  aeadscan scan src/ --format sarif > results.sarif
  aeadscan scan src/ --min-severity CRITICAL

  # Compare with a third-party SARIF result set
  aeadscan scan fixtures/codeql/initialize_then_fill.rs --baseline fixtures/codeql/codeql-results.sarif

  # Score the analyzer on the bundled corpus
  aeadscan validate
  aeadscan validate --suite synthetic --json

  # Classify compiler diagnostics and compute statistics
  aeadscan classify-errors fixtures/diagnostics --labels fixtures/diagnostics/labels.yaml
  aeadscan stats

  # Replay the generation experiment offline and report on it
  aeadscan experiment run --mode replay --results results/experiment.jsonl
  aeadscan experiment report --results results/experiment.jsonl
        """
    )
    parser.add_argument('--config', type=Path, help='Configuration file (YAML, JSON or TOML)')
    parser.add_argument('--verbose', '-v', action='store_true', help='Debug logging')

    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    scan_parser = subparsers.add_parser('scan', help='Scan Rust files for AEAD misuse')
    scan_parser.add_argument('paths', nargs='+', type=Path, help='Files or directories to scan')
    _add_format(scan_parser, ("text", "json", "sarif"))
    scan_parser.add_argument('--min-severity', choices=[s.value for s in Severity], type=str.upper,
                             help='Lowest severity that makes the exit status 1')
    scan_parser.add_argument('--workers', type=int, help='Files scanned in parallel')
    scan_parser.add_argument('--baseline', type=Path, help='SARIF results of another tool to compare with')

    validate_parser = subparsers.add_parser('validate', help='Score the analyzer on the validation corpus')
    validate_parser.add_argument('--corpus', type=Path, help='Corpus directory (default: bundled corpus)')
    validate_parser.add_argument('--suite', choices=['synthetic', 'benchmark', 'regression', 'all'],
                                 help='Suite to score (default: benchmark)')
    _add_format(validate_parser)

    classify_parser = subparsers.add_parser('classify-errors', help='Classify cargo JSON diagnostic streams')
    classify_parser.add_argument('paths', nargs='+', type=Path, help='.jsonl streams or directories of them')
    classify_parser.add_argument('--labels', type=Path, help='YAML map of stream name to expected class')
    _add_format(classify_parser)

    stats_parser = subparsers.add_parser('stats', help='Compilation rate tables with CIs and chi-square tests')
    stats_parser.add_argument('--counts', type=Path, help='YAML counts file (default: bundled study counts)')
    _add_format(stats_parser)

    experiment_parser = subparsers.add_parser('experiment', help='Run or report generation experiments')
    experiment_subparsers = experiment_parser.add_subparsers(dest='experiment_command', help='Experiment operations')

    run_parser = experiment_subparsers.add_parser('run', help='Generate, compile and scan every sample')
    run_parser.add_argument('--mode', choices=MODES, help='live, record or replay (default: replay)')
    run_parser.add_argument('--fixtures', type=Path, help='Generation fixture directory')
    run_parser.add_argument('--workers', type=int, help='Samples processed in parallel')
    run_parser.add_argument('--models', nargs='+', help='Model ids to include')
    run_parser.add_argument('--replicates', type=int, help='Samples per cell (1..10)')
    run_parser.add_argument('--results', type=Path, help='Results store to write')
    run_parser.add_argument('--check-ground-truth', action='store_true',
                            help='Replay only: compare outcomes with the fixture manifest')

    report_parser = experiment_subparsers.add_parser('report', help='Render tables from a results store')
    report_parser.add_argument('--results', type=Path, help='Results store to read')
    _add_format(report_parser)

    rules_parser = subparsers.add_parser('rules', help='List the detection rules')
    rules_parser.add_argument('--remediation', action='store_true', help='Include remediation text')

    subparsers.add_parser('version', help='Show version information')
    return parser


COMMANDS = {
    'scan': cmd_scan,
    'validate': cmd_validate,
    'classify-errors': cmd_classify_errors,
    'stats': cmd_stats,
    'rules': cmd_rules,
    'version': cmd_version,
}

EXPERIMENT_COMMANDS = {
    'run': cmd_experiment_run,
    'report': cmd_experiment_report,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == 'experiment':
        handler = EXPERIMENT_COMMANDS.get(args.experiment_command)
    else:
        handler = COMMANDS.get(args.command)
    if handler is None:
        parser.print_help()
        return EXIT_ERROR

    try:
        config = load_config(args.config)
    except ConfigError as e:
        print(create_error_report(e), file=sys.stderr)
        return EXIT_ERROR
    configure_logging(config.logging, args.verbose)

    try:
        return handler(args, config)
    except OPERATIONAL_ERRORS as e:
        print(create_error_report(e), file=sys.stderr)
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
