"""
aeadscan Build Stage

Turns a raw model response into a compilation outcome: pull the Rust
program out of the markdown, add the crates it imports to a Cargo
manifest, run ``cargo clippy --message-format=json`` in a throwaway
workspace and classify what comes back.

Two compilers share one interface:
- CargoCompiler runs the real toolchain (and can record its JSON stream)
- ReplayCompiler reads the stream recorded next to each generation fixture
"""

import logging
import os
import re
import shutil
import subprocess
import tempfile
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import tomli_w

from .diagnostics import CompilationOutcome, parse_diagnostics
from .providers.base import MissingFixture, fixture_path
from .source import blank_comments

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT_S = 120.0

STREAM_SUFFIX = ".clippy.jsonl"

# Rust path root → (crate name, pinned version)
DEPENDENCY_PINS: Dict[str, Tuple[str, str]] = {
    "aes_gcm": ("aes-gcm", "0.10"),
    "chacha20poly1305": ("chacha20poly1305", "0.10"),
    "rand": ("rand", "0.8"),
    "rand_core": ("rand_core", "0.6"),
    "hex": ("hex", "0.4"),
    "base64": ("base64", "0.21"),
    "generic_array": ("generic-array", "0.14"),
}

DEFAULT_MANIFEST = """\
[package]
name = "aeadscan-sample"
version = "0.1.0"
edition = "2021"

[dependencies]
"""

_FENCE_RE = re.compile(
    r"^[ \t]*(?P<fence>`{3,}|~{3,})[ \t]*(?P<tag>[\w+-]*)[^\n]*\n"
    r"(?P<body>.*?)"
    r"(?:^[ \t]*(?P=fence)[ \t]*$|\Z)",
    re.MULTILINE | re.DOTALL,
)

_RUST_TAGS = ("rust", "rs")


class BuildError(Exception):
    """Base class for build-stage failures."""
    def __init__(self, message: str, sample_id: Optional[str] = None):
        self.message = message
        self.sample_id = sample_id
        super().__init__(f"{sample_id}: {message}" if sample_id else message)


class ManifestParseError(BuildError):
    """The Cargo manifest is not valid TOML."""


class ToolchainMissing(BuildError):
    """cargo is not installed or not on PATH."""


class SubprocessTimeout(BuildError):
    """The lint/build subprocess exceeded its time limit."""


def _fenced_blocks(raw_response: str) -> List[Tuple[str, str]]:
    blocks = []
    for match in _FENCE_RE.finditer(raw_response):
        body = match.group("body").strip("\n")
        if body.strip():
            blocks.append((match.group("tag").lower(), body))
    return blocks


def extract_code(raw_response: str) -> Optional[str]:
    """Longest ```rust block, else the longest untagged block, else None.

    Blocks tagged for another language (toml, bash …) are never chosen.
    """
    blocks = _fenced_blocks(raw_response or "")
    tagged = [body for tag, body in blocks if tag in _RUST_TAGS]
    candidates = tagged or [body for tag, body in blocks if not tag]
    if not candidates:
        return None
    return max(candidates, key=len) + "\n"


def detect_crates(code: str) -> List[str]:
    """Path roots from the pin table that ``code`` references, in table order."""
    text = blank_comments(code)
    found = []
    for root in DEPENDENCY_PINS:
        pattern = rf"(?<![\w:])(?:{root}::|use\s+{root}\b|extern\s+crate\s+{root}\b)"
        if re.search(pattern, text):
            found.append(root)
    return found


def inject_dependencies(code: str, manifest: str = DEFAULT_MANIFEST) -> str:
    """Add a pinned dependency for every recognized crate ``code`` uses.

    Idempotent; when nothing needs adding the manifest text comes back
    unchanged.
    """
    try:
        data = tomllib.loads(manifest)
    except tomllib.TOMLDecodeError as e:
        raise ManifestParseError(f"invalid Cargo manifest: {e}")

    dependencies = data.setdefault("dependencies", {})
    if not isinstance(dependencies, dict):
        raise ManifestParseError("[dependencies] is not a table")
    present = {name.replace("_", "-") for name in dependencies}

    added = []
    for root in detect_crates(code):
        crate, version = DEPENDENCY_PINS[root]
        if crate.replace("_", "-") in present:
            continue
        dependencies[crate] = version
        present.add(crate.replace("_", "-"))
        added.append(crate)

    if not added:
        return manifest
    logger.debug("Injected dependencies: %s", ", ".join(added))
    return tomli_w.dumps(data)


def write_workspace(code: str, workspace: Union[str, Path], manifest: str = DEFAULT_MANIFEST) -> Path:
    """Lay out a single-binary Cargo package for ``code``."""
    root = Path(workspace)
    (root / "src").mkdir(parents=True, exist_ok=True)
    (root / "Cargo.toml").write_text(inject_dependencies(code, manifest), encoding="utf-8")
    (root / "src" / "main.rs").write_text(code, encoding="utf-8")
    return root


def run_clippy(workspace: Union[str, Path], timeout: float = DEFAULT_TIMEOUT_S,
               target_dir: Optional[str] = None, sample_id: Optional[str] = None) -> str:
    """Run clippy in ``workspace`` and return its JSON message stream."""
    env = dict(os.environ)
    if target_dir:
        env["CARGO_TARGET_DIR"] = str(target_dir)
    cmd = ["cargo", "clippy", "--quiet", "--message-format=json"]
    try:
        result = subprocess.run(cmd, cwd=str(workspace), capture_output=True, text=True,
                                timeout=timeout, env=env)
    except FileNotFoundError:
        raise ToolchainMissing("cargo not found on PATH", sample_id)
    except subprocess.TimeoutExpired:
        raise SubprocessTimeout(f"cargo clippy exceeded {timeout:.0f}s", sample_id)

    if result.returncode != 0 and '"reason":"compiler-message"' not in result.stdout.replace(" ", ""):
        tail = result.stderr.strip().splitlines()[-1:] or ["no output"]
        raise BuildError(f"cargo exited with {result.returncode} without diagnostics: {tail[0]}", sample_id)
    return result.stdout


def compile_sample(code: Optional[str], workspace: Union[str, Path], sample_id: str = "sample",
                   timeout: float = DEFAULT_TIMEOUT_S, target_dir: Optional[str] = None) -> CompilationOutcome:
    """Build ``code`` in ``workspace`` and classify the result."""
    if not code or not code.strip():
        return CompilationOutcome.extraction_failure(sample_id, "empty extracted code")
    write_workspace(code, workspace)
    stream = run_clippy(workspace, timeout, target_dir, sample_id)
    return CompilationOutcome.from_diagnostics(sample_id, parse_diagnostics(stream))


class CargoCompiler:
    """Compiles each sample in a disposable workspace.

    With ``record_dir`` set the raw clippy stream is also stored as
    ``<record_dir>/<sample_id>.clippy.jsonl`` for later replay.
    """

    def __init__(self, timeout: float = DEFAULT_TIMEOUT_S, target_dir: Optional[str] = None,
                 record_dir: Optional[Union[str, Path]] = None):
        self.timeout = timeout
        self.target_dir = target_dir
        self.record_dir = Path(record_dir) if record_dir else None
        if shutil.which("cargo") is None:
            raise ToolchainMissing("cargo not found on PATH")

    def compile(self, sample_id: str, code: Optional[str]) -> CompilationOutcome:
        if not code or not code.strip():
            return CompilationOutcome.extraction_failure(sample_id)
        with tempfile.TemporaryDirectory(prefix="aeadscan-") as workspace:
            write_workspace(code, workspace)
            stream = run_clippy(workspace, self.timeout, self.target_dir, sample_id)
        if self.record_dir is not None:
            path = fixture_path(self.record_dir, sample_id, STREAM_SUFFIX)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(stream, encoding="utf-8")
        return CompilationOutcome.from_diagnostics(sample_id, parse_diagnostics(stream))


class ReplayCompiler:
    """Reads recorded clippy streams instead of invoking cargo."""

    def __init__(self, fixture_dir: Union[str, Path]):
        self.fixture_dir = Path(fixture_dir)

    def compile(self, sample_id: str, code: Optional[str]) -> CompilationOutcome:
        if not code or not code.strip():
            return CompilationOutcome.extraction_failure(sample_id)
        path = fixture_path(self.fixture_dir, sample_id, STREAM_SUFFIX)
        if not path.is_file():
            raise MissingFixture(sample_id, path)
        return CompilationOutcome.from_diagnostics(sample_id, parse_diagnostics(path.read_text(encoding="utf-8")))
