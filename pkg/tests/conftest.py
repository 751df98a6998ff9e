"""Shared fixtures for the aeadscan test suite."""

import logging
from pathlib import Path

import pytest

from aeadscan.source import SourceUnit, load_text

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES = REPO_ROOT / "fixtures"
CORPUS_DIR = FIXTURES / "corpus"
GENERATIONS_DIR = FIXTURES / "generations"
DIAGNOSTICS_DIR = FIXTURES / "diagnostics"
STATS_COUNTS = FIXTURES / "stats" / "study_counts.yaml"
CODEQL_DIR = FIXTURES / "codeql"


# The generated snippet that encrypts twice under one nonce.
MULTI_CALL_SNIPPET = (CORPUS_DIR / "regression" / "multi_call_nonce_reuse.rs").read_text(encoding="utf-8")

INITIALIZE_THEN_FILL_SNIPPET = (CORPUS_DIR / "regression" / "initialize_then_fill.rs").read_text(encoding="utf-8")

SECURE_PROGRAM = """\
use aes_gcm::{
    aead::{Aead, AeadCore, KeyInit, OsRng},
    Aes256Gcm,
};

fn main() -> Result<(), aes_gcm::Error> {
    let key = Aes256Gcm::generate_key(&mut OsRng);
    let cipher = Aes256Gcm::new(&key);
    let nonce = Aes256Gcm::generate_nonce(&mut OsRng);
    let ciphertext = cipher.encrypt(&nonce, b"plaintext message".as_ref())?;
    let plaintext = cipher.decrypt(&nonce, ciphertext.as_ref())?;
    assert_eq!(&plaintext, b"plaintext message");
    Ok(())
}
"""


@pytest.fixture
def make_unit():
    """Build an in-memory SourceUnit from Rust text."""
    def _make(text: str, path: str = "sample.rs") -> SourceUnit:
        return load_text(text, path)
    return _make


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(autouse=True)
def _quiet_package_logger():
    """Leave the package logger without handlers between tests."""
    yield
    package_logger = logging.getLogger("aeadscan")
    for handler in list(package_logger.handlers):
        if getattr(handler, "_aeadscan", False):
            package_logger.removeHandler(handler)
            handler.close()
    package_logger.setLevel(logging.NOTSET)
