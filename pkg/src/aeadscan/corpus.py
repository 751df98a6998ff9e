"""
aeadscan Validation Corpus

Loads the ground-truth corpus manifest and scores the analyzer against it
with case-level TP/FP/FN/TN accounting.

Manifest schema (``manifest.yaml`` in the corpus directory)::

    version: 1
    cases:
      - id: bench-798-byte-string-key     # unique
        path: benchmark/cwe798_byte_string_key.rs
        suite: benchmark                  # synthetic | benchmark | regression
        kind: benchmark                   # synthetic | benchmark | regression |
                                          # secure_control | documented_blind_spot
        expected: [hardcoded_secret]      # rule ids and/or CWE-NNN
        expected_counts: {hardcoded_secret: 1}   # optional, exact counts
        latent_cwe: 798                   # documented_blind_spot only
        note: free text
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from .engine import analyze
from .findings import KNOWN_CWES, RuleId
from .source import SourceError, load_source

logger = logging.getLogger(__name__)

MANIFEST_NAMES = ("manifest.yaml", "manifest.yml", "manifest.json")

SUITES = ("synthetic", "benchmark", "regression")
KINDS = ("synthetic", "benchmark", "regression", "secure_control", "documented_blind_spot")
POSITIVE_KINDS = ("synthetic", "benchmark", "regression")


class CorpusError(Exception):
    """Base class for corpus errors."""
    def __init__(self, message: str, case_id: Optional[str] = None):
        self.message = message
        self.case_id = case_id
        prefix = f"case '{case_id}': " if case_id else ""
        super().__init__(f"{prefix}{message}")


class ManifestSchemaError(CorpusError):
    """Manifest entry is missing fields or violates a case invariant."""


class DuplicateCaseId(CorpusError):
    """Two manifest entries share an id."""


class MissingCase(CorpusError):
    """A case's source file cannot be loaded."""


@dataclass(frozen=True)
class ValidationCase:
    case_id: str
    source_path: Path
    kind: str
    suite: str
    expected_rules: FrozenSet[RuleId] = frozenset()
    expected_cwes: FrozenSet[int] = frozenset()
    expected_counts: Tuple[Tuple[RuleId, int], ...] = ()
    latent_cwe: Optional[int] = None
    note: str = ""

    @property
    def expected(self) -> List[str]:
        tokens = [rule.value for rule in self.expected_rules]
        tokens += [f"CWE-{cwe}" for cwe in self.expected_cwes]
        return sorted(tokens)

    @property
    def is_positive(self) -> bool:
        """True if the case contains a real defect (detectable or not)."""
        return self.kind in POSITIVE_KINDS or self.kind == "documented_blind_spot"

    @property
    def ground_truth_cwes(self) -> FrozenSet[int]:
        if self.kind == "documented_blind_spot" and self.latent_cwe:
            return frozenset({self.latent_cwe})
        return frozenset(self.expected_cwes | {rule.cwe for rule in self.expected_rules})


@dataclass(frozen=True)
class CaseResult:
    case_id: str
    kind: str
    outcome: str  # TP, FP, FN or TN
    observed_rules: Tuple[str, ...]
    expectation_met: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "case_id": self.case_id,
            "kind": self.kind,
            "outcome": self.outcome,
            "observed_rules": list(self.observed_rules),
            "expectation_met": self.expectation_met,
        }


@dataclass
class ScoreReport:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0
    per_cwe: Dict[int, Tuple[int, int]] = field(default_factory=dict)
    results: List[CaseResult] = field(default_factory=list)

    @property
    def cases(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 1.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if self.cases and p + r else 0.0

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.cases if self.cases else 0.0

    @property
    def expectation_mismatches(self) -> List[str]:
        return [r.case_id for r in self.results if not r.expectation_met]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
            "cases": self.cases,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "accuracy": self.accuracy,
            "per_cwe": {str(cwe): {"detected": d, "total": t} for cwe, (d, t) in sorted(self.per_cwe.items())},
            "expectation_mismatches": self.expectation_mismatches,
            "results": [r.to_dict() for r in self.results],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScoreReport":
        return cls(
            tp=data["tp"], fp=data["fp"], fn=data["fn"], tn=data["tn"],
            per_cwe={int(cwe): (v["detected"], v["total"]) for cwe, v in data.get("per_cwe", {}).items()},
            results=[CaseResult(
                case_id=r["case_id"], kind=r["kind"], outcome=r["outcome"],
                observed_rules=tuple(r["observed_rules"]), expectation_met=r["expectation_met"],
            ) for r in data.get("results", [])],
        )


def _parse_expected(tokens: Any, case_id: str) -> Tuple[FrozenSet[RuleId], FrozenSet[int]]:
    if tokens is None:
        return frozenset(), frozenset()
    if not isinstance(tokens, list):
        raise ManifestSchemaError("'expected' must be a list", case_id)
    rules, cwes = set(), set()
    for token in tokens:
        if isinstance(token, int):
            cwes.add(token)
            continue
        text = str(token).strip()
        if text.upper().startswith("CWE-"):
            try:
                cwes.add(int(text[4:]))
            except ValueError:
                raise ManifestSchemaError(f"bad CWE token '{text}'", case_id)
            continue
        try:
            rules.add(RuleId(text))
        except ValueError:
            raise ManifestSchemaError(f"unknown rule id '{text}'", case_id)
    unknown = cwes - KNOWN_CWES
    if unknown:
        raise ManifestSchemaError(f"CWE(s) {sorted(unknown)} are not produced by any rule", case_id)
    return frozenset(rules), frozenset(cwes)


def _parse_case(entry: Any, directory: Path) -> ValidationCase:
    if not isinstance(entry, dict):
        raise ManifestSchemaError("case entry must be a mapping")
    case_id = entry.get("id")
    if not case_id:
        raise ManifestSchemaError("case entry without 'id'")
    case_id = str(case_id)
    for key in ("path", "kind"):
        if key not in entry:
            raise ManifestSchemaError(f"missing '{key}'", case_id)

    kind = entry["kind"]
    if kind not in KINDS:
        raise ManifestSchemaError(f"kind must be one of {', '.join(KINDS)}", case_id)
    suite = entry.get("suite", kind if kind in SUITES else "benchmark")
    if suite not in SUITES:
        raise ManifestSchemaError(f"suite must be one of {', '.join(SUITES)}", case_id)

    rules, cwes = _parse_expected(entry.get("expected"), case_id)
    counts_raw = entry.get("expected_counts") or {}
    try:
        counts = tuple(sorted(((RuleId(k), int(v)) for k, v in counts_raw.items()),
                              key=lambda item: item[0].value))
    except (ValueError, AttributeError):
        raise ManifestSchemaError("'expected_counts' must map rule ids to integers", case_id)
    latent = entry.get("latent_cwe")

    if kind == "secure_control" and (rules or cwes or counts):
        raise ManifestSchemaError("secure_control cases must have empty expectations", case_id)
    if kind == "documented_blind_spot":
        if rules or cwes:
            raise ManifestSchemaError("documented_blind_spot cases must have empty expectations", case_id)
        if latent is None:
            raise ManifestSchemaError("documented_blind_spot cases need 'latent_cwe'", case_id)
    if kind in POSITIVE_KINDS and not (rules or cwes):
        raise ManifestSchemaError(f"{kind} cases need a non-empty 'expected'", case_id)

    return ValidationCase(
        case_id=case_id,
        source_path=(directory / entry["path"]),
        kind=kind,
        suite=suite,
        expected_rules=rules,
        expected_cwes=cwes,
        expected_counts=counts,
        latent_cwe=int(latent) if latent is not None else None,
        note=str(entry.get("note", "")),
    )


def _read_manifest(path: Path) -> Any:
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        import json
        return json.loads(text)
    import yaml
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ManifestSchemaError(f"{path}: invalid YAML: {e}")


def find_manifest(directory: Union[str, Path]) -> Path:
    directory = Path(directory)
    if directory.is_file():
        return directory
    for name in MANIFEST_NAMES:
        candidate = directory / name
        if candidate.exists():
            return candidate
    raise ManifestSchemaError(f"no manifest ({', '.join(MANIFEST_NAMES)}) in {directory}")


def build_corpus_manifest(directory: Union[str, Path]) -> List[ValidationCase]:
    """Load and check every case listed in a corpus directory's manifest."""
    manifest_path = find_manifest(directory)
    data = _read_manifest(manifest_path)
    if not isinstance(data, dict) or not isinstance(data.get("cases"), list):
        raise ManifestSchemaError(f"{manifest_path}: top level must be a mapping with a 'cases' list")

    cases: List[ValidationCase] = []
    seen = set()
    for entry in data["cases"]:
        case = _parse_case(entry, manifest_path.parent)
        if case.case_id in seen:
            raise DuplicateCaseId("duplicate case id", case.case_id)
        seen.add(case.case_id)
        cases.append(case)
    logger.debug("Loaded %d validation cases from %s", len(cases), manifest_path)
    return cases


def load_suite(directory: Union[str, Path], suite: Optional[str] = None) -> List[ValidationCase]:
    """Manifest cases, optionally restricted to one suite."""
    cases = build_corpus_manifest(directory)
    if suite in (None, "all"):
        return cases
    if suite not in SUITES:
        raise CorpusError(f"unknown suite '{suite}'")
    return [case for case in cases if case.suite == suite]


def _observe(case: ValidationCase) -> Tuple[ValidationCase, List[RuleId]]:
    try:
        unit = load_source(case.source_path)
    except SourceError as e:
        raise MissingCase(e.message, case.case_id)
    return case, [finding.rule_id for finding in analyze(unit)]


def _score_case(case: ValidationCase, observed: List[RuleId]) -> Tuple[str, bool]:
    observed_rules = set(observed)
    observed_cwes = {rule.cwe for rule in observed}

    if case.kind == "secure_control":
        outcome = "FP" if observed else "TN"
        return outcome, outcome == "TN"

    if case.kind == "documented_blind_spot":
        hit = case.latent_cwe in observed_cwes
        return ("TP" if hit else "FN"), not hit

    hit = bool(case.expected_rules & observed_rules) or bool(case.expected_cwes & observed_cwes)
    outcome = "TP" if hit else "FN"
    met = hit
    if case.kind in ("synthetic", "regression") and case.expected_rules and not case.expected_cwes:
        met = met and observed_rules == set(case.expected_rules)
    for rule, count in case.expected_counts:
        if observed.count(rule) != count:
            met = False
    return outcome, met


def run_validation(corpus: Sequence[ValidationCase], workers: int = 1) -> ScoreReport:
    """Score the analyzer on ``corpus`` with case-level accounting.

    Positive cases (including documented blind spots, scored on their latent
    CWE) are TP when any ground-truth rule or CWE fires and FN otherwise;
    secure controls are FP when anything fires and TN otherwise.
    """
    if workers > 1 and len(corpus) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            observations = list(pool.map(_observe, corpus))
    else:
        observations = [_observe(case) for case in corpus]

    report = ScoreReport()
    per_cwe: Dict[int, List[int]] = {}
    for case, observed in sorted(observations, key=lambda item: item[0].case_id):
        outcome, met = _score_case(case, observed)
        if outcome == "TP":
            report.tp += 1
        elif outcome == "FN":
            report.fn += 1
        elif outcome == "FP":
            report.fp += 1
        else:
            report.tn += 1

        if case.is_positive:
            observed_cwes = {rule.cwe for rule in observed}
            for cwe in case.ground_truth_cwes:
                tally = per_cwe.setdefault(cwe, [0, 0])
                tally[1] += 1
                if cwe in observed_cwes:
                    tally[0] += 1

        if not met:
            logger.info("Case %s: outcome %s, observed %s", case.case_id, outcome,
                        sorted(rule.value for rule in set(observed)))
        report.results.append(CaseResult(
            case_id=case.case_id,
            kind=case.kind,
            outcome=outcome,
            observed_rules=tuple(sorted(rule.value for rule in set(observed))),
            expectation_met=met,
        ))

    report.per_cwe = {cwe: (d, t) for cwe, (d, t) in sorted(per_cwe.items())}
    return report
