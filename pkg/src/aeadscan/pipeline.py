"""
aeadscan Experiment Pipeline

Drives the generation study end to end:

1. render the prompt for a (strategy, algorithm) cell
2. ask the model's provider for a response (live, record or replay)
3. extract the Rust program and compile it with clippy
4. scan every program that compiled with the rule engine

Samples are independent; with ``workers > 1`` they run on a thread pool and
the results store is written afterwards by the calling thread, in design
order, so replay runs produce identical stores.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import pandas as pd
import yaml

from .build import BuildError, CargoCompiler, ReplayCompiler, extract_code
from .config import ExperimentConfig, ProviderConfig, default_providers
from .diagnostics import CompilationOutcome
from .engine import scan_unit
from .findings import Finding, Severity
from .prompts import Algorithm, PromptSpec, Strategy, parse_algorithm, parse_strategy, render_prompt
from .providers import BaseProvider, GenerationRequest, ProviderError, provider_for_mode, sample_id_for
from .providers.base import CellKey
from .source import SourceError, load_text

logger = logging.getLogger(__name__)

GROUND_TRUTH_NAME = "manifest.yaml"

RESULT_COLUMNS = [
    "sample_id", "model", "algorithm", "strategy", "replicate", "compiled", "dominant_class",
    "extraction_failed", "error", "finding_count", "critical", "rules", "timestamp",
]


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class GenerationRecord:
    """Raw response for one sample plus the code extracted from it."""
    model_id: str
    prompt: PromptSpec
    replicate: int
    raw_response: str
    extracted_code: Optional[str]
    timestamp: str = field(default_factory=_now)

    @property
    def cell(self) -> CellKey:
        return (self.model_id, self.prompt.algorithm.value, self.prompt.strategy.value)

    @property
    def sample_id(self) -> str:
        return sample_id_for(self.cell, self.replicate)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model_id": self.model_id,
            "prompt": self.prompt.to_dict(),
            "replicate": self.replicate,
            "raw_response": self.raw_response,
            "extracted_code": self.extracted_code,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GenerationRecord":
        return cls(
            model_id=data["model_id"],
            prompt=PromptSpec.from_dict(data["prompt"]),
            replicate=data["replicate"],
            raw_response=data["raw_response"],
            extracted_code=data.get("extracted_code"),
            timestamp=data.get("timestamp", ""),
        )


def generate(client: BaseProvider, prompt: PromptSpec, replicate: int,
             temperature: float = 0.0) -> GenerationRecord:
    """Request one response from ``client`` and extract its program."""
    if not 1 <= replicate <= 10:
        raise ValueError(f"replicate must be in 1..10, got {replicate}")
    request = GenerationRequest(client.model_id, prompt, replicate, temperature)
    raw_response = client.complete(request)
    extracted = extract_code(raw_response)
    if extracted is None:
        logger.info("%s: no fenced code block in response", request.sample_id)
    return GenerationRecord(
        model_id=client.model_id,
        prompt=prompt,
        replicate=replicate,
        raw_response=raw_response,
        extracted_code=extracted,
    )


@dataclass
class SampleOutcome:
    """Everything the pipeline learned about one sample."""
    model_id: str
    algorithm: Algorithm
    strategy: Strategy
    replicate: int
    generation: Optional[GenerationRecord] = None
    compilation: Optional[CompilationOutcome] = None
    findings: List[Finding] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def cell(self) -> CellKey:
        return (self.model_id, self.algorithm.value, self.strategy.value)

    @property
    def sample_id(self) -> str:
        return sample_id_for(self.cell, self.replicate)

    @property
    def compiled(self) -> bool:
        return self.compilation is not None and self.compilation.compiled

    def to_record(self) -> Dict[str, Any]:
        """One line of the results store."""
        compilation = self.compilation
        return {
            "sample_id": self.sample_id,
            "model": self.model_id,
            "algorithm": self.algorithm.value,
            "strategy": self.strategy.value,
            "replicate": self.replicate,
            "compiled": self.compiled,
            "dominant_class": compilation.dominant_class.value if compilation else None,
            "extraction_failed": compilation.extraction_failed if compilation else False,
            "error_count": compilation.error_count if compilation else 0,
            "notes": list(compilation.notes) if compilation else [],
            "findings": [f.to_dict() for f in self.findings],
            "error": self.error,
            "timestamp": self.generation.timestamp if self.generation else None,
        }


@dataclass
class ExperimentMatrix:
    """Per-cell sample outcomes in design order."""
    cells: Dict[CellKey, List[SampleOutcome]] = field(default_factory=dict)

    @property
    def samples(self) -> List[SampleOutcome]:
        return [sample for outcomes in self.cells.values() for sample in outcomes]

    def add(self, sample: SampleOutcome):
        self.cells.setdefault(sample.cell, []).append(sample)

    def compiled_counts(self) -> Dict[CellKey, int]:
        return {cell: sum(1 for s in outcomes if s.compiled) for cell, outcomes in self.cells.items()}

    @property
    def failed_samples(self) -> List[SampleOutcome]:
        return [s for s in self.samples if s.error]

    def to_records(self) -> List[Dict[str, Any]]:
        return [s.to_record() for s in self.samples]

    def to_frame(self) -> pd.DataFrame:
        return results_frame(self.to_records())


def design_cells(config: ExperimentConfig) -> List[Tuple[str, Algorithm, Strategy]]:
    """Cells in model, algorithm, strategy order as configured."""
    return [
        (model, parse_algorithm(algorithm), parse_strategy(strategy))
        for model in config.models
        for algorithm in config.algorithms
        for strategy in config.strategies
    ]


def make_compiler(config: ExperimentConfig):
    if config.mode == "replay":
        return ReplayCompiler(config.fixture_dir)
    record_dir = config.fixture_dir if config.mode == "record" else None
    return CargoCompiler(timeout=config.timeout_s, target_dir=config.cargo_target_dir, record_dir=record_dir)


def run_sample(client: BaseProvider, compiler, algorithm: Algorithm, strategy: Strategy,
               replicate: int, temperature: float = 0.0) -> SampleOutcome:
    """Generate, compile and (if it compiled) scan one sample.

    Provider and build failures are stored on the outcome instead of raised.
    """
    sample = SampleOutcome(client.model_id, algorithm, strategy, replicate)
    try:
        sample.generation = generate(client, render_prompt(strategy, algorithm), replicate, temperature)
        code = sample.generation.extracted_code
        sample.compilation = compiler.compile(sample.sample_id, code)
        if sample.compilation.compiled:
            sample.findings = scan_unit(load_text(code, f"{sample.sample_id}.rs")).findings
    except (ProviderError, BuildError, SourceError, OSError) as e:
        sample.error = f"{type(e).__name__}: {e}"
        logger.error("Sample %s failed: %s", sample.sample_id, sample.error)
    return sample


def run_experiment(config: ExperimentConfig, providers: Optional[Dict[str, ProviderConfig]] = None,
                   results_path: Optional[Union[str, Path]] = None,
                   clients: Optional[Dict[str, BaseProvider]] = None,
                   compiler=None) -> ExperimentMatrix:
    """Run every (model, algorithm, strategy, replicate) sample of ``config``.

    The configuration is validated before any provider is contacted. The
    matrix is written to ``results_path`` (default ``config.results_path``).
    """
    providers = providers if providers is not None else default_providers()
    config.validate(providers)

    if clients is None:
        clients = {
            model: provider_for_mode(config.mode, model, providers[model], config.fixture_dir)
            for model in config.models
        }
    if compiler is None:
        compiler = make_compiler(config)

    tasks = [
        (model, algorithm, strategy, replicate)
        for model, algorithm, strategy in design_cells(config)
        for replicate in range(1, config.replicates + 1)
    ]
    logger.info("Running %d samples (%s mode, %d workers)", len(tasks), config.mode, config.workers)

    def run_task(task) -> SampleOutcome:
        model, algorithm, strategy, replicate = task
        return run_sample(clients[model], compiler, algorithm, strategy, replicate, config.temperature)

    try:
        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                samples = list(pool.map(run_task, tasks))
        else:
            samples = [run_task(task) for task in tasks]
    finally:
        for client in clients.values():
            client.close()

    matrix = ExperimentMatrix()
    for sample in samples:
        matrix.add(sample)

    path = results_path if results_path is not None else config.results_path
    if path:
        write_results(path, matrix.to_records())
    if matrix.failed_samples:
        logger.warning("%d of %d samples failed", len(matrix.failed_samples), len(samples))
    return matrix


def write_results(path: Union[str, Path], records: Iterable[Dict[str, Any]]) -> Path:
    """Write the results store: one JSON object per line."""
    store = Path(path)
    store.parent.mkdir(parents=True, exist_ok=True)
    with open(store, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, sort_keys=True, ensure_ascii=False))
            f.write("\n")
    logger.info("Wrote results store %s", store)
    return store


def load_results(path: Union[str, Path]) -> List[Dict[str, Any]]:
    """Read a results store written by ``write_results``."""
    records = []
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as e:
                logger.warning("Skipping malformed results line %d: %s", line_number, e.msg)
    return records


def results_frame(records: Sequence[Dict[str, Any]]) -> pd.DataFrame:
    """Tabulate result records, one row per sample."""
    rows = []
    for record in records:
        findings = record.get("findings") or []
        rows.append({
            "sample_id": record["sample_id"],
            "model": record["model"],
            "algorithm": record["algorithm"],
            "strategy": record["strategy"],
            "replicate": record["replicate"],
            "compiled": bool(record["compiled"]),
            "dominant_class": record.get("dominant_class"),
            "extraction_failed": bool(record.get("extraction_failed")),
            "error": record.get("error"),
            "finding_count": len(findings),
            "critical": any(f.get("severity") == Severity.CRITICAL.value for f in findings),
            "rules": sorted({f["rule_id"] for f in findings}),
            "timestamp": record.get("timestamp"),
        })
    return pd.DataFrame(rows, columns=RESULT_COLUMNS)


def _read_fixture_manifest(fixture_dir: Union[str, Path]) -> Dict[str, Any]:
    path = Path(fixture_dir) / GROUND_TRUTH_NAME
    with open(path, encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def load_ground_truth(fixture_dir: Union[str, Path]) -> Dict[str, Dict[str, Any]]:
    """Per-sample expected outcome declared by the fixture manifest."""
    return dict(_read_fixture_manifest(fixture_dir).get("samples") or {})


def fixture_replicates(fixture_dir: Union[str, Path]) -> Optional[int]:
    """Replicates per cell recorded in the fixture manifest, if it has one."""
    try:
        replicates = _read_fixture_manifest(fixture_dir).get("replicates")
    except OSError:
        return None
    return int(replicates) if replicates else None


@dataclass
class GroundTruthCheck:
    """Replay records compared with the fixture manifest, by sample id."""
    mismatched: List[str] = field(default_factory=list)
    missing: List[str] = field(default_factory=list)
    unexpected: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.mismatched or self.missing or self.unexpected)

    def describe(self) -> List[str]:
        sections = [
            ("outcome differs", self.mismatched),
            ("in manifest but not run", self.missing),
            ("run but not in manifest", self.unexpected),
        ]
        return [f"{label}: {', '.join(ids)}" for label, ids in sections if ids]


def _cell_of(sample_id: str) -> str:
    return sample_id.rsplit("/", 1)[0]


def check_ground_truth(records: Sequence[Dict[str, Any]], truth: Dict[str, Dict[str, Any]]) -> GroundTruthCheck:
    """Compare compiled flags and dominant classes with ``truth``.

    Manifest samples count as missing only for cells the run covered.
    """
    check = GroundTruthCheck()
    seen = set()
    for record in records:
        sample_id = record["sample_id"]
        seen.add(sample_id)
        expected = truth.get(sample_id)
        if expected is None:
            check.unexpected.append(sample_id)
        elif (bool(expected.get("compiled")) != bool(record["compiled"])
                or expected.get("dominant_class", "NoError") != (record.get("dominant_class") or "NoError")):
            check.mismatched.append(sample_id)
    cells = {_cell_of(sample_id) for sample_id in seen}
    check.missing = sorted(s for s in truth if s not in seen and _cell_of(s) in cells)
    return check
