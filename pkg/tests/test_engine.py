"""Engine-level tests: full analysis, file scanning and analyzer properties."""

from collections import Counter

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from aeadscan.engine import analyze, collect_sources, rule_catalog, run_rule, scan_file, scan_paths, scan_unit
from aeadscan.findings import RuleId, ScanReport, Severity
from aeadscan.source import load_source, load_text
from aeadscan.structure import ENTROPY_RE

from conftest import CORPUS_DIR, INITIALIZE_THEN_FILL_SNIPPET, MULTI_CALL_SNIPPET, SECURE_PROGRAM

RESERVED = {
    "as", "break", "const", "crate", "else", "enum", "false", "fn", "for", "if", "impl", "in",
    "let", "loop", "match", "mod", "move", "mut", "pub", "ref", "return", "self", "static",
    "struct", "super", "trait", "true", "type", "unsafe", "use", "where", "while", "async",
    "await", "dyn", "cipher", "plaintext", "seal", "aes_gcm", "rand",
}

identifiers = st.from_regex(r"[a-z][a-z_]{0,10}", fullmatch=True).filter(lambda name: name not in RESERVED)

FILL_TEMPLATE = """\
use aes_gcm::{{aead::{{Aead, KeyInit, OsRng}}, Aes256Gcm, Key, Nonce}};
use rand::RngCore;

fn seal(plaintext: &[u8]) -> Result<Vec<u8>, aes_gcm::Error> {{
    let mut {key} = [0u8; 32];
    OsRng.fill_bytes(&mut {key});
    let cipher = Aes256Gcm::new(Key::<Aes256Gcm>::from_slice(&{key}));
    let mut {nonce} = [0u8; 12];
    OsRng.fill_bytes(&mut {nonce});
    cipher.encrypt(Nonce::from_slice(&{nonce}), plaintext)
}}
"""


FILL_VARIANT_TEMPLATE = """\
use aes_gcm::{{aead::{{Aead, KeyInit, OsRng}}, Aes256Gcm, Key, Nonce}};
use rand::RngCore;

fn seal(plaintext: &[u8]) -> Result<Vec<u8>, aes_gcm::Error> {{
    let mut {key} = [0u8; 32];
    {key_fill}
    let cipher = Aes256Gcm::new(Key::<Aes256Gcm>::from_slice(&{key}));
    let mut {nonce} = [0u8; 12];
    {nonce_fill}
    cipher.encrypt(Nonce::from_slice(&{nonce}), plaintext)
}}
"""

FILL_CALLS = [
    "OsRng.fill_bytes(&mut{sp}{name});",
    "OsRng.try_fill_bytes(&mut{sp}{name}).map_err(|_| aes_gcm::Error)?;",
    "rand::rngs::OsRng.fill_bytes(&mut{sp}{name});",
    "OsRng.fill_bytes({sp}&{sp}mut {name}{sp});",
    "OsRng{sp}.{sp}try_fill_bytes(&mut {name})\n        .map_err(|_| aes_gcm::Error)?;",
]

FILL_WORDS = {"fill_bytes", "try_fill_bytes", "map_err", "rngs", "from_slice"}

spacing = st.sampled_from([" ", "  ", "\t", "\n        "])

LIFECYCLE_TEMPLATE = """\
use aes_gcm::{{aead::{{Aead, AeadCore, KeyInit, OsRng}}, Aes256Gcm}};
use rand::RngCore;

fn main() -> Result<(), aes_gcm::Error> {{
    let key = Aes256Gcm::generate_key(&mut OsRng);
    let cipher = Aes256Gcm::new(&key);
    let mut nonce = Aes256Gcm::generate_nonce(&mut OsRng);
{calls}    Ok(())
}}
"""

REGENERATIONS = [
    "    OsRng.fill_bytes(&mut nonce);\n",
    "    OsRng.try_fill_bytes(&mut nonce).map_err(|_| aes_gcm::Error)?;\n",
    "    let nonce = Aes256Gcm::generate_nonce(&mut OsRng);\n",
    "    nonce = Aes256Gcm::generate_nonce(&mut OsRng);\n",
]

# Rules whose findings can appear once an entropy write is gone.
ENTROPY_DEPENDENT = {
    RuleId.HARDCODED_SECRET,
    RuleId.STATIC_NONCE,
    RuleId.NONCE_REUSE_MULTI_CALL,
    RuleId.NONCE_REUSE_IN_LOOP,
    RuleId.MISSING_SECURE_GENERATION,
}

CORPUS_FINDING_LINES = [
    (path, line)
    for path in sorted(CORPUS_DIR.rglob("*.rs"))
    for line in sorted({f.location.line for f in analyze(load_source(path))})
]


def _locations(findings):
    return [(f.rule_id, f.location.line, f.location.column) for f in findings]


def _lifecycle_program(regenerations):
    calls = "".join(
        (regeneration or "") + f'    let ct{index} = cipher.encrypt(&nonce, b"message".as_ref())?;\n'
        for index, regeneration in enumerate(regenerations)
    )
    return LIFECYCLE_TEMPLATE.format(calls=calls)


def _comment_out(text, line):
    lines = text.splitlines(keepends=True)
    target = lines[line - 1]
    indent = len(target) - len(target.lstrip())
    lines[line - 1] = target[:indent] + "// " + target[indent:]
    return "".join(lines)


class TestAnalyze:

    def test_secure_program_has_no_findings(self, make_unit):
        assert analyze(make_unit(SECURE_PROGRAM)) == []

    def test_multi_call_snippet(self, make_unit):
        report = scan_unit(make_unit(MULTI_CALL_SNIPPET))
        assert report.count(RuleId.NONCE_REUSE_MULTI_CALL) == 1
        assert report.count(RuleId.UNSAFE_ERROR_HANDLING) == 2
        assert set(report.rule_ids) == {RuleId.NONCE_REUSE_MULTI_CALL, RuleId.UNSAFE_ERROR_HANDLING}

    def test_initialize_then_fill_snippet(self, make_unit):
        assert analyze(make_unit(INITIALIZE_THEN_FILL_SNIPPET)) == []

    def test_findings_are_ordered(self, make_unit):
        findings = analyze(make_unit(MULTI_CALL_SNIPPET))
        assert findings == sorted(findings, key=lambda f: f.sort_key)

    def test_rule_subset(self, make_unit):
        report = scan_unit(make_unit(MULTI_CALL_SNIPPET), rules=["unsafe_error_handling"])
        assert set(report.rule_ids) == {RuleId.UNSAFE_ERROR_HANDLING}

    def test_run_rule_unknown(self, make_unit, monkeypatch):
        from aeadscan.rules import get_registry

        monkeypatch.setattr(get_registry(), "get_rule", lambda name: None)
        with pytest.raises(KeyError):
            run_rule(RuleId.STATIC_NONCE, make_unit(SECURE_PROGRAM))

    def test_unbalanced_loop_becomes_note(self, make_unit):
        report = scan_unit(make_unit("fn main() {\n    for x in xs {\n        cipher.encrypt(&n, x);\n"))
        assert any("unbalanced braces" in note for note in report.notes)

    def test_analysis_is_deterministic(self, make_unit):
        unit = make_unit(MULTI_CALL_SNIPPET)
        assert analyze(unit) == analyze(unit)

    @given(st.text(alphabet=st.characters(blacklist_characters="\n", blacklist_categories=("Cs",)), max_size=80))
    @settings(max_examples=200)
    def test_line_comments_never_change_findings(self, comment):
        baseline = analyze(load_text(MULTI_CALL_SNIPPET))
        commented = analyze(load_text(MULTI_CALL_SNIPPET + "// " + comment + "\n"))
        assert _locations(commented) == _locations(baseline)

    @given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=80))
    @settings(max_examples=200)
    def test_block_comments_never_change_findings(self, comment):
        assume("*/" not in comment and "/*" not in comment)
        assume(not comment.endswith("*") and not comment.startswith("/"))
        baseline = analyze(load_text(SECURE_PROGRAM))
        commented = analyze(load_text(SECURE_PROGRAM + "/* " + comment + " */\n"))
        assert _locations(commented) == _locations(baseline)

    @given(identifiers, identifiers)
    @settings(max_examples=200)
    def test_initialize_then_fill_any_names(self, key, nonce):
        assume(key != nonce)
        unit = load_text(FILL_TEMPLATE.format(key=key, nonce=nonce))
        assert analyze(unit) == []

    @given(identifiers)
    @settings(max_examples=200)
    def test_unfilled_nonce_is_static(self, nonce):
        assume(nonce != "key")
        source = FILL_TEMPLATE.format(key="key", nonce=nonce).replace(
            f"    OsRng.fill_bytes(&mut {nonce});\n", ""
        )
        rules = {f.rule_id for f in analyze(load_text(source))}
        assert rules == {RuleId.STATIC_NONCE}

    @given(identifiers, identifiers, st.sampled_from(FILL_CALLS), st.sampled_from(FILL_CALLS), spacing)
    @settings(max_examples=200)
    def test_initialize_then_fill_variants(self, key, nonce, key_fill, nonce_fill, sp):
        assume(key != nonce and not {key, nonce} & FILL_WORDS)
        source = FILL_VARIANT_TEMPLATE.format(
            key=key, nonce=nonce,
            key_fill=key_fill.format(name=key, sp=sp),
            nonce_fill=nonce_fill.format(name=nonce, sp=sp),
        )
        assert analyze(load_text(source)) == []

    @given(st.lists(st.none() | st.sampled_from(REGENERATIONS), min_size=2, max_size=6))
    @settings(max_examples=200)
    def test_regeneration_never_adds_findings(self, regenerations):
        baseline = analyze(load_text(_lifecycle_program([None] * len(regenerations))))
        regenerated = analyze(load_text(_lifecycle_program(regenerations)))
        assert len(regenerated) <= len(baseline)
        reused = [f for f in regenerated if f.rule_id is RuleId.NONCE_REUSE_MULTI_CALL]
        assert len(reused) == sum(1 for regeneration in regenerations[1:] if regeneration is None)

    @given(st.sampled_from(CORPUS_FINDING_LINES))
    @settings(max_examples=200)
    def test_commenting_out_a_flagged_line_adds_nothing(self, flagged):
        path, line = flagged
        text = load_source(path).raw_text
        before = Counter(_locations(analyze(load_text(text, str(path)))))
        after = Counter(_locations(analyze(load_text(_comment_out(text, line), str(path)))))
        added = after - before
        if ENTROPY_RE.search(text.splitlines()[line - 1]):
            assert {rule_id for rule_id, _, _ in added} <= ENTROPY_DEPENDENT
        else:
            assert not added

    def test_commenting_out_entropy_exposes_literal_key(self):
        path = CORPUS_DIR / "benchmark" / "cwe330_thread_rng_key.rs"
        text = path.read_text(encoding="utf-8")
        assert "fill_bytes" in text.splitlines()[8]
        findings = analyze(load_text(_comment_out(text, 9)))
        assert (RuleId.HARDCODED_SECRET, 8) in {(f.rule_id, f.location.line) for f in findings}
        assert RuleId.WEAK_RANDOMNESS not in {f.rule_id for f in findings}


class TestScanning:

    def test_scan_file_reads_from_disk(self):
        report = scan_file(CORPUS_DIR / "regression" / "byte_string_key.rs")
        assert report.error is None
        assert report.count(RuleId.HARDCODED_SECRET) == 1

    def test_missing_file_is_reported_not_raised(self, tmp_path):
        report = scan_file(tmp_path / "absent.rs")
        assert report.findings == []
        assert "cannot read file" in report.error

    def test_collect_sources_recurses_sorted(self, tmp_path):
        (tmp_path / "b").mkdir()
        (tmp_path / "b" / "z.rs").write_text("fn main() {}\n")
        (tmp_path / "a.rs").write_text("fn main() {}\n")
        (tmp_path / "notes.txt").write_text("not rust\n")
        assert collect_sources([tmp_path]) == [tmp_path / "a.rs", tmp_path / "b" / "z.rs"]

    def test_parallel_scan_keeps_input_order(self):
        serial = scan_paths([CORPUS_DIR / "benchmark"], workers=1)
        parallel = scan_paths([CORPUS_DIR / "benchmark"], workers=4)
        assert [r.to_dict() for r in parallel] == [r.to_dict() for r in serial]
        assert len(serial) == 20

    def test_report_round_trip(self):
        report = scan_file(CORPUS_DIR / "regression" / "multi_call_nonce_reuse.rs")
        assert ScanReport.from_dict(report.to_dict()).to_dict() == report.to_dict()

    def test_severity_threshold(self, make_unit):
        report = scan_unit(make_unit(MULTI_CALL_SNIPPET))
        assert [f.rule_id for f in report.at_least(Severity.CRITICAL)] == [RuleId.NONCE_REUSE_MULTI_CALL]
        assert len(report.at_least(Severity.MEDIUM)) == 3


class TestCatalog:

    def test_catalog_covers_every_rule(self):
        catalog = rule_catalog()
        assert [entry["rule_id"] for entry in catalog] == [rule_id.value for rule_id in RuleId]
        assert {entry["cwe"] for entry in catalog} == {252, 326, 327, 329, 330, 798}
        assert all(entry["title"] and entry["remediation"] for entry in catalog)
