"""
aeadscan Report Rendering

Every command produces a ReportDocument: a report kind, a JSON-native body
and an output format. Bodies are built by the ``*_body`` functions below and
rendered as text, JSON or (for scans) SARIF 2.1.0.
"""

import json
import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Union

import pandas as pd

from . import __version__
from .corpus import ScoreReport
from .diagnostics import (
    CLASS_PRECEDENCE,
    ERROR_CODE_TABLE,
    FAILURE_CLASSES,
    CompilationOutcome,
    ErrorClass,
    class_counts,
    class_shares,
)
from .engine import rule_catalog
from .error_reporter import FindingReporter
from .findings import Finding, RuleId, ScanReport, Severity
from .pipeline import results_frame
from .prompts import Algorithm, Strategy
from .source import SourceError, load_source
from .statistics import Proportion, StatisticsError, chi_square, proportion_table, wilson_interval

logger = logging.getLogger(__name__)

REPORT_KINDS = ("scan", "validation", "taxonomy", "stats", "experiment")
REPORT_FORMATS = ("text", "json", "sarif")
SCHEMA_VERSION = 1

TOOL_NAME = "aeadscan"
SARIF_VERSION = "2.1.0"
SARIF_SCHEMA = (
    "https://raw.githubusercontent.com/oasis-tcs/sarif-spec/"
    "master/Schemata/sarif-schema-2.1.0.json"
)


class ReportError(Exception):
    """A report cannot be built or rendered as requested."""


@dataclass
class ReportDocument:
    kind: str
    body: Dict[str, Any]
    format: str = "text"

    def __post_init__(self):
        if self.kind not in REPORT_KINDS:
            raise ReportError(f"Unknown report kind: {self.kind}")
        if self.format not in REPORT_FORMATS:
            raise ReportError(f"Unknown report format: {self.format}")
        if self.format == "sarif" and self.kind != "scan":
            raise ReportError(f"SARIF output is only available for scan reports, not {self.kind}")

    def to_json(self) -> str:
        return json.dumps(
            {"schema_version": SCHEMA_VERSION, "kind": self.kind, "format": self.format, "body": self.body},
            indent=2, sort_keys=True, ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ReportError(f"Invalid report JSON: {e}")
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ReportError(f"Unsupported report schema version: {data.get('schema_version')}")
        return cls(kind=data["kind"], body=data["body"], format=data.get("format", "json"))

    def render(self) -> str:
        if self.format == "json":
            return self.to_json()
        if self.format == "sarif":
            return emit_sarif(body_findings(self.body))
        return TEXT_RENDERERS[self.kind](self.body)


# -- scan -------------------------------------------------------------------

def scan_body(reports: Sequence[ScanReport], min_severity: Severity = Severity.MEDIUM) -> Dict[str, Any]:
    findings = [f for report in reports for f in report.findings]
    return {
        "min_severity": min_severity.value,
        "files": [report.to_dict() for report in reports],
        "summary": {
            "files": len(reports),
            "findings": len(findings),
            "at_or_above_threshold": sum(1 for f in findings if f.severity.at_least(min_severity)),
            "errors": sum(1 for report in reports if report.error),
            "by_severity": {s.value: sum(1 for f in findings if f.severity is s) for s in Severity},
        },
    }


def body_findings(body: Mapping[str, Any]) -> List[Finding]:
    return [Finding.from_dict(f) for entry in body.get("files", []) for f in entry.get("findings", [])]


def _read_source(path: str) -> Optional[str]:
    try:
        return load_source(path).raw_text
    except SourceError:
        return None


def render_scan_text(body: Mapping[str, Any]) -> str:
    lines: List[str] = []
    for entry in body["files"]:
        path = entry["path"]
        if entry.get("error"):
            lines.append(f"❌ {entry['error']}")
            continue
        findings = [Finding.from_dict(f) for f in entry["findings"]]
        if findings:
            reporter = FindingReporter(_read_source(path), path)
            for finding in findings:
                lines.append(reporter.report_finding(finding))
                lines.append("")
        for note in entry.get("notes", []):
            lines.append(f"⚠️  {note}")

    summary = body["summary"]
    files = summary["files"]
    if summary["findings"] == 0:
        lines.append(f"✅ no findings ({files} file{'s' if files != 1 else ''} scanned)")
    else:
        counts = ", ".join(f"{n} {severity}" for severity, n in summary["by_severity"].items())
        lines.append(f"📊 {summary['findings']} findings in {files} file{'s' if files != 1 else ''}: {counts}")
    if summary["errors"]:
        lines.append(f"❌ {summary['errors']} file(s) could not be scanned")

    baseline = body.get("baseline")
    if baseline:
        lines.append("")
        lines.append(render_baseline_text(baseline))
    return "\n".join(lines)


# -- SARIF ------------------------------------------------------------------

def severity_to_sarif_level(severity: Severity) -> str:
    return {
        Severity.CRITICAL: "error",
        Severity.HIGH: "error",
        Severity.MEDIUM: "warning",
    }.get(severity, "warning")


def _sarif_rules(catalog: Sequence[Mapping[str, Any]]) -> List[Dict[str, Any]]:
    rules = []
    for info in catalog:
        severity = Severity.parse(info["severity"])
        rules.append({
            "id": info["rule_id"],
            "name": info["title"],
            "shortDescription": {"text": info["title"]},
            "fullDescription": {"text": info["description"] or info["title"]},
            "help": {"text": info["remediation"]},
            "properties": {
                "tags": ["security", "cryptography", f"external/cwe/cwe-{info['cwe']}"],
                "severity": severity.value,
                "problem.severity": severity_to_sarif_level(severity),
            },
        })
    return rules


def _sarif_result(finding: Finding) -> Dict[str, Any]:
    uri = Path(finding.path).as_posix() if finding.path else "<unknown>"
    return {
        "ruleId": finding.rule_id.value,
        "level": severity_to_sarif_level(finding.severity),
        "message": {"text": finding.message},
        "locations": [
            {
                "physicalLocation": {
                    "artifactLocation": {"uri": uri},
                    "region": {
                        "startLine": finding.location.line,
                        "startColumn": finding.location.column,
                    },
                }
            }
        ],
        "properties": {"cwe": f"CWE-{finding.cwe}", "severity": finding.severity.value},
    }


def sarif_document(findings: Sequence[Finding],
                   catalog: Optional[Sequence[Mapping[str, Any]]] = None) -> Dict[str, Any]:
    catalog = rule_catalog() if catalog is None else catalog
    return {
        "version": SARIF_VERSION,
        "$schema": SARIF_SCHEMA,
        "runs": [
            {
                "tool": {
                    "driver": {
                        "name": TOOL_NAME,
                        "version": __version__,
                        "rules": _sarif_rules(catalog),
                    }
                },
                "columnKind": "unicodeCodePoints",
                "results": [_sarif_result(f) for f in findings],
            }
        ],
    }


def emit_sarif(findings: Sequence[Finding], catalog: Optional[Sequence[Mapping[str, Any]]] = None) -> str:
    """Minimal SARIF 2.1.0 log with one run and one result per finding."""
    return json.dumps(sarif_document(findings, catalog), indent=2, ensure_ascii=False)


# -- baseline comparison ----------------------------------------------------

def load_sarif(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ReportError(f"Cannot read baseline {path}: {e.strerror or e}")
    except json.JSONDecodeError as e:
        raise ReportError(f"Baseline {path} is not valid JSON: {e}")
    if not isinstance(data, dict) or not isinstance(data.get("runs"), list):
        raise ReportError(f"Baseline {path} is not a SARIF log (no runs)")
    return data


def _resolve(path: Union[str, Path]) -> str:
    return str(Path(path).resolve())


def baseline_body(baseline: Mapping[str, Any], baseline_path: Union[str, Path],
                  reports: Sequence[ScanReport]) -> Dict[str, Any]:
    """Compare a third-party SARIF result set with our findings on the same files.

    Relative artifact URIs are resolved against the baseline file's directory.
    A baseline result is confirmed when we report a finding on the same line.
    """
    root = Path(baseline_path).resolve().parent
    ours: Dict[str, List[Finding]] = {_resolve(r.path): list(r.findings) for r in reports}

    results = []
    tools = []
    covered = set()
    for run in baseline.get("runs", []):
        tools.append(run.get("tool", {}).get("driver", {}).get("name", "unknown"))
        for result in run.get("results", []):
            location = (result.get("locations") or [{}])[0].get("physicalLocation", {})
            uri = location.get("artifactLocation", {}).get("uri", "")
            region = location.get("region", {})
            line = int(region.get("startLine", 0))
            resolved = _resolve(root / uri)
            covered.add(resolved)
            matches = [f for f in ours.get(resolved, []) if f.location.line == line]
            results.append({
                "rule_id": result.get("ruleId", ""),
                "message": result.get("message", {}).get("text", ""),
                "uri": uri,
                "line": line,
                "column": int(region.get("startColumn", 0)),
                "scanned": resolved in ours,
                "confirmed_by": [f.rule_id.value for f in matches],
            })

    our_findings = sum(len(ours[path]) for path in covered if path in ours)
    return {
        "tool": ", ".join(tools) or "unknown",
        "results": results,
        "summary": {
            "baseline_results": len(results),
            "confirmed": sum(1 for r in results if r["confirmed_by"]),
            "our_findings": our_findings,
        },
    }


def render_baseline_text(body: Mapping[str, Any]) -> str:
    summary = body["summary"]
    lines = [
        f"🔍 Baseline comparison: {body['tool']} reported {summary['baseline_results']} result(s), "
        f"{TOOL_NAME} reported {summary['our_findings']} finding(s) on the same files"
    ]
    for result in body["results"]:
        where = f"{result['uri']}:{result['line']}:{result['column']}"
        if not result["scanned"]:
            verdict = "file not scanned"
        elif result["confirmed_by"]:
            verdict = "also reported as " + ", ".join(result["confirmed_by"])
        else:
            verdict = f"not reported by {TOOL_NAME}"
        lines.append(f"  {where}  {result['rule_id']}  {verdict}")
    return "\n".join(lines)


# -- validation ---------------------------------------------------------------

def validation_body(score: ScoreReport, suite: Optional[str] = None,
                    corpus_dir: Optional[str] = None) -> Dict[str, Any]:
    body = score.to_dict()
    body["suite"] = suite or "all"
    body["corpus"] = corpus_dir
    return body


def _percent(value: float) -> str:
    return f"{value * 100:.0f}%"


def per_cwe_summary(per_cwe: Mapping[str, Mapping[str, int]]) -> str:
    """`CWE-330 (6/6), CWE-329 (4/6), …`, best detected first."""
    entries = sorted(
        per_cwe.items(),
        key=lambda item: (-(item[1]["detected"] / item[1]["total"]) if item[1]["total"] else 0.0, int(item[0])),
    )
    return ", ".join(f"CWE-{cwe} ({v['detected']}/{v['total']})" for cwe, v in entries)


def render_validation_text(body: Mapping[str, Any]) -> str:
    tp, fp, fn, tn = body["tp"], body["fp"], body["fn"], body["tn"]
    lines = [
        f"🧪 Validation: {body['suite']} suite ({body['cases']} cases)",
        f"   TP {tp}  FP {fp}  FN {fn}  TN {tn}",
        f"   Precision: {_percent(body['precision'])} ({tp}/{tp + fp})",
        f"   Recall:    {_percent(body['recall'])} ({tp}/{tp + fn})",
        f"   F1:        {_percent(body['f1'])}",
        f"   Accuracy:  {_percent(body['accuracy'])} ({tp + tn}/{body['cases']})",
    ]
    if body["per_cwe"]:
        lines.append(f"   Per-CWE detection: {per_cwe_summary(body['per_cwe'])}")

    missed = [r for r in body["results"] if r["outcome"] in ("FN", "FP")]
    if missed:
        lines.append("")
        for result in missed:
            observed = ", ".join(result["observed_rules"]) or "nothing"
            lines.append(f"   {result['outcome']} {result['case_id']} (observed: {observed})")
    if body["expectation_mismatches"]:
        lines.append("")
        lines.append("⚠️  Expectation mismatches: " + ", ".join(body["expectation_mismatches"]))
    return "\n".join(lines)


# -- taxonomy -----------------------------------------------------------------

def taxonomy_body(outcomes: Sequence[CompilationOutcome],
                  labels: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
    counts = class_counts(outcomes)
    shares = class_shares(outcomes)
    body: Dict[str, Any] = {
        "samples": len(outcomes),
        "compiled": sum(1 for o in outcomes if o.compiled),
        "extraction_failed": sum(1 for o in outcomes if o.extraction_failed),
        "counts": {c.value: counts[c] for c in FAILURE_CLASSES},
        "shares": {c.value: shares[c] for c in FAILURE_CLASSES},
        "outcomes": [
            {
                "sample_id": o.sample_id,
                "compiled": o.compiled,
                "dominant_class": o.dominant_class.value,
                "error_count": o.error_count,
                "codes": sorted({d.code for d in o.diagnostics if d.is_error and d.code}),
            }
            for o in outcomes
        ],
    }
    if labels is not None:
        body["label_mismatches"] = [
            o.sample_id for o in outcomes
            if o.sample_id in labels and labels[o.sample_id] != o.dominant_class.value
        ]
        body["labelled"] = sum(1 for o in outcomes if o.sample_id in labels)
    return body


def _code_table_notes() -> List[str]:
    notes = ["   Codes: " + "; ".join(
        f"{cls.value} = {', '.join(code for code, c in ERROR_CODE_TABLE.items() if c is cls)}"
        for cls in CLASS_PRECEDENCE
    )]
    notes.append("   Mixed failures count once, under " + " > ".join(c.value for c in CLASS_PRECEDENCE))
    return notes


def render_taxonomy_text(body: Mapping[str, Any]) -> str:
    failing = sum(body["counts"].values())
    lines = [f"🧩 Error taxonomy: {failing} non-compiling of {body['samples']} samples "
             f"({body['compiled']} compiled, {body['extraction_failed']} without code)"]
    frame = pd.DataFrame(
        [{"Class": c, "Samples": body["counts"][c], "Share": f"{body['shares'][c] * 100:.1f}%"}
         for c in body["counts"]]
    )
    if not frame.empty:
        lines.append(frame.to_string(index=False))
    lines.extend(_code_table_notes())
    if body["outcomes"]:
        lines.append("")
        width = max(len(o["sample_id"]) for o in body["outcomes"])
        for o in body["outcomes"]:
            codes = f" [{', '.join(o['codes'])}]" if o["codes"] else ""
            lines.append(f"  {o['sample_id']:<{width}}  {o['dominant_class']}{codes}")
    if "label_mismatches" in body:
        agreed = body["labelled"] - len(body["label_mismatches"])
        lines.append("")
        lines.append(f"🏷️  Hand labels matched: {agreed}/{body['labelled']}")
        if body["label_mismatches"]:
            lines.append("   Mismatched: " + ", ".join(body["label_mismatches"]))
    return "\n".join(lines)


# -- statistics ---------------------------------------------------------------

def _rate_row(label: str, successes: int, trials: int) -> Dict[str, Any]:
    row: Dict[str, Any] = {"label": label, "successes": int(successes), "trials": int(trials)}
    if trials > 0:
        lower, upper = wilson_interval(Proportion(int(successes), int(trials)))
        row.update(rate=successes / trials, lower=lower, upper=upper)
    else:
        row.update(rate=None, lower=None, upper=None)
    return row


def rate_table(name: str, title: str, rows: Sequence[Mapping[str, Any]], strict: bool = True) -> Dict[str, Any]:
    """Rates with Wilson intervals plus a chi-square test of homogeneity.

    With ``strict`` a table the test cannot be run on raises; otherwise the
    footnote reads ``n/a``.
    """
    labels = [str(r["label"]) for r in rows]
    successes = [int(r["successes"]) for r in rows]
    trials = [int(r["trials"]) for r in rows]
    table: Dict[str, Any] = {
        "name": name,
        "title": title,
        "rows": [_rate_row(label, s, t) for label, s, t in zip(labels, successes, trials)],
        "chi_square": None,
    }
    try:
        result = chi_square(proportion_table(labels, successes, trials))
    except StatisticsError as e:
        if strict:
            raise StatisticsError(f"{title}: {e}")
        logger.info("%s: chi-square not computed: %s", title, e)
        table["footnote"] = f"n/a ({e})"
    else:
        table["chi_square"] = result.to_dict()
        table["footnote"] = result.footnote()
    return table


def _format_rate_rows(rows: Sequence[Mapping[str, Any]]) -> str:
    frame = pd.DataFrame([
        {
            "Group": row["label"],
            "Success": f"{row['successes']}/{row['trials']}",
            "Rate": "n/a" if row["rate"] is None else f"{row['rate'] * 100:.1f}%",
            "95% CI": "n/a" if row["lower"] is None
            else f"[{row['lower'] * 100:.1f}, {row['upper'] * 100:.1f}]",
        }
        for row in rows
    ])
    return frame.to_string(index=False)


def render_rate_table(table: Mapping[str, Any]) -> str:
    lines = [table["title"], _format_rate_rows(table["rows"])]
    if table.get("footnote"):
        lines.append(table["footnote"])
    return "\n".join(lines)


def _require(data: Mapping[str, Any], key: str, source: str):
    if key not in data:
        raise ReportError(f"{source}: missing '{key}'")
    return data[key]


def stats_body(counts: Mapping[str, Any], strict: bool = True, source: str = "counts") -> Dict[str, Any]:
    """Tables, interaction grid and proportions from a raw counts mapping."""
    if not isinstance(counts, Mapping):
        raise ReportError(f"{source}: expected a mapping of tables")
    tables = []
    for spec in _require(counts, "tables", source):
        rows = _require(spec, "rows", source)
        tables.append(rate_table(spec.get("name", ""), spec.get("title", spec.get("name", "")), rows, strict))

    body: Dict[str, Any] = {"tables": tables, "interaction": None, "proportions": []}

    interaction = counts.get("interaction")
    if interaction:
        trials = int(_require(interaction, "trials", source))
        cells = []
        for row_label, row in zip(interaction["rows"], interaction["successes"]):
            for col_label, successes in zip(interaction["cols"], row):
                cell = _rate_row(f"{row_label} / {col_label}", successes, trials)
                cell.update(row=row_label, col=col_label)
                cells.append(cell)
        body["interaction"] = {
            "title": interaction.get("title", "Interaction"),
            "rows": list(interaction["rows"]),
            "cols": list(interaction["cols"]),
            "cells": cells,
        }

    body["proportions"] = [_rate_row(p["label"], p["successes"], p["trials"])
                           for p in counts.get("proportions") or []]
    return body


def render_interaction(interaction: Mapping[str, Any]) -> str:
    grid = {(c["row"], c["col"]): c for c in interaction["cells"]}
    data = {
        col: [
            f"{grid[(row, col)]['successes']}/{grid[(row, col)]['trials']}"
            + ("" if grid[(row, col)]["rate"] is None else f" ({grid[(row, col)]['rate'] * 100:.1f}%)")
            for row in interaction["rows"]
        ]
        for col in interaction["cols"]
    }
    frame = pd.DataFrame(data, index=interaction["rows"])
    return "\n".join([interaction["title"], frame.to_string()])


def render_stats_text(body: Mapping[str, Any]) -> str:
    sections = [render_rate_table(t) for t in body["tables"]]
    if body.get("interaction"):
        sections.append(render_interaction(body["interaction"]))
    if body.get("proportions"):
        sections.append("Proportions\n" + _format_rate_rows(body["proportions"]))
    return "\n\n".join(sections)


# -- experiment ---------------------------------------------------------------

def _label_for(kind: str, value: str, model_labels: Mapping[str, str]) -> str:
    try:
        if kind == "strategy":
            return Strategy(value).label
        if kind == "algorithm":
            return Algorithm(value).label
    except ValueError:
        return value
    return model_labels.get(value) or value


def experiment_body(records: Sequence[Mapping[str, Any]],
                    model_labels: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
    """Compilation tables, taxonomy and detection summaries for a results store."""
    model_labels = model_labels or {}
    frame = results_frame(records)
    if frame.empty:
        raise ReportError("results store holds no samples")
    compiled = frame[frame["compiled"]]

    tables = []
    for column, name, title in (
        ("model", "model", "Compilation success by model"),
        ("strategy", "prompt", "Compilation success by prompt strategy"),
        ("algorithm", "algorithm", "Compilation success by algorithm"),
    ):
        grouped = frame.groupby(column, sort=False)["compiled"].agg(["sum", "count"])
        rows = [
            {"label": _label_for(column, value, model_labels), "successes": int(s), "trials": int(n)}
            for value, s, n in zip(grouped.index, grouped["sum"], grouped["count"])
        ]
        tables.append(rate_table(name, title, rows, strict=False))

    models = list(dict.fromkeys(frame["model"]))
    algorithms = list(dict.fromkeys(frame["algorithm"]))
    cells = []
    for model in models:
        for algorithm in algorithms:
            subset = frame[(frame["model"] == model) & (frame["algorithm"] == algorithm)]
            cell = _rate_row(f"{model} / {algorithm}", int(subset["compiled"].sum()), len(subset))
            cell.update(row=_label_for("model", model, model_labels),
                        col=_label_for("algorithm", algorithm, model_labels))
            cells.append(cell)
    interaction = {
        "title": "Compilation success by model and algorithm",
        "rows": [_label_for("model", m, model_labels) for m in models],
        "cols": [_label_for("algorithm", a, model_labels) for a in algorithms],
        "cells": cells,
    }

    outcomes = [
        CompilationOutcome(
            sample_id=r["sample_id"],
            compiled=bool(r["compiled"]),
            dominant_class=ErrorClass(r.get("dominant_class") or ErrorClass.NO_ERROR.value),
            extraction_failed=bool(r.get("extraction_failed")),
        )
        for r in records if not r.get("error")
    ]
    taxonomy = taxonomy_body(outcomes)
    taxonomy.pop("outcomes")

    rule_counts = Counter(rule for rules in compiled["rules"] for rule in rules)
    detections = []
    for rule_id in RuleId:
        row = _rate_row(rule_id.value, rule_counts.get(rule_id.value, 0), len(compiled))
        row.update(cwe=rule_id.cwe, severity=rule_id.severity.value)
        detections.append(row)
    any_critical = _rate_row("Any CRITICAL finding", int(compiled["critical"].sum()), len(compiled))

    security = []
    for model in models:
        subset = compiled[compiled["model"] == model]
        security.append({
            "label": _label_for("model", model, model_labels),
            "compiled": len(subset),
            "with_findings": int((subset["finding_count"] > 0).sum()),
            "critical": int(subset["critical"].sum()),
            "findings": int(subset["finding_count"].sum()),
        })

    return {
        "samples": len(frame),
        "compiled": len(compiled),
        "errors": [r["sample_id"] for r in records if r.get("error")],
        "overall": _rate_row("Overall compilation", len(compiled), len(frame)),
        "tables": tables,
        "interaction": interaction,
        "taxonomy": taxonomy,
        "detections": detections,
        "any_critical": any_critical,
        "security_by_model": security,
    }


def render_experiment_text(body: Mapping[str, Any]) -> str:
    overall = body["overall"]
    header = f"🧪 Experiment: {body['compiled']}/{body['samples']} samples compiled"
    if overall["rate"] is not None:
        header += f" ({overall['rate'] * 100:.1f}%, 95% CI [{overall['lower'] * 100:.1f}, {overall['upper'] * 100:.1f}])"
    sections = [header]
    if body["errors"]:
        sections[0] += f"\n❌ {len(body['errors'])} sample(s) failed: " + ", ".join(body["errors"])

    sections.extend(render_rate_table(t) for t in body["tables"])
    sections.append(render_interaction(body["interaction"]))
    sections.append(render_taxonomy_text(dict(body["taxonomy"], outcomes=[])))

    detections = pd.DataFrame([
        {
            "Rule": d["label"],
            "CWE": f"CWE-{d['cwe']}",
            "Severity": d["severity"],
            "Samples": f"{d['successes']}/{d['trials']}",
            "Rate": "n/a" if d["rate"] is None else f"{d['rate'] * 100:.1f}%",
        }
        for d in body["detections"]
    ])
    critical = body["any_critical"]
    critical_line = f"Any CRITICAL finding: {critical['successes']}/{critical['trials']}"
    if critical["rate"] is not None:
        critical_line += f" ({critical['rate'] * 100:.1f}%, 95% CI [{critical['lower'] * 100:.1f}, {critical['upper'] * 100:.1f}])"
    sections.append("Detections in compiled samples\n" + detections.to_string(index=False) + "\n" + critical_line)

    security = pd.DataFrame([
        {"Model": s["label"], "Compiled": s["compiled"], "With findings": s["with_findings"],
         "CRITICAL": s["critical"], "Findings": s["findings"]}
        for s in body["security_by_model"]
    ])
    sections.append("Security by model\n" + security.to_string(index=False))
    return "\n\n".join(sections)


TEXT_RENDERERS: Dict[str, Callable[[Mapping[str, Any]], str]] = {
    "scan": render_scan_text,
    "validation": render_validation_text,
    "taxonomy": render_taxonomy_text,
    "stats": render_stats_text,
    "experiment": render_experiment_text,
}
