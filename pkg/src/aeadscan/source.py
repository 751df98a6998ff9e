"""
aeadscan Source Model

Loads one Rust source file and normalizes it into a scan-ready form.
Comments are blanked with spaces so every offset in the normalized text
still points at the same line and column of the original file.
"""

import bisect
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union


class SourceError(Exception):
    """Base class for source loading and location errors."""
    def __init__(self, message: str, path: Optional[str] = None):
        self.message = message
        self.path = path
        super().__init__(f"{path or '<unknown>'}: {message}")


class IOFailure(SourceError):
    """Raised when a source file cannot be read."""


class EncodingError(SourceError):
    """Raised when a source file is not valid UTF-8."""


class OutOfRange(SourceError):
    """Raised when an offset lies outside the unit's text."""


# Char literal at the cursor: 'x', '\n', '\x7f', '\u{1F600}'. Anything else
# starting with a quote is a lifetime or label.
_CHAR_LITERAL_RE = re.compile(r"'(?:\\(?:x[0-9a-fA-F]{2}|u\{[0-9a-fA-F]{1,6}\}|.)|[^\\'\n])'")

MAX_RAW_HASHES = 3


@dataclass(frozen=True)
class SourceLocation:
    """A position inside a SourceUnit (1-based line and column)."""
    line: int
    column: int
    byte_offset: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class SourceUnit:
    """A single normalized source file.

    ``scan_text`` is ``raw_text`` with comments blanked. ``code_text`` further
    blanks the contents of string and char literals; structural matching
    (braces, receiver chains) runs on it.
    """
    path: str
    raw_text: str
    scan_text: str
    code_text: str
    line_starts: List[int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.raw_text)

    def offset_to_location(self, offset: int) -> SourceLocation:
        return offset_to_location(self, offset)

    def line_text(self, line: int) -> str:
        """Return the raw text of a 1-based line without its newline."""
        if not 1 <= line <= len(self.line_starts):
            raise OutOfRange(f"line {line} outside 1..{len(self.line_starts)}", self.path)
        start = self.line_starts[line - 1]
        end = self.raw_text.find("\n", start)
        return self.raw_text[start:] if end == -1 else self.raw_text[start:end]

    def snippet(self, start: int, end: int, limit: int = 120) -> str:
        """Excerpt of raw text collapsed to one line."""
        text = " ".join(self.raw_text[start:end].split())
        return text if len(text) <= limit else text[: limit - 3] + "..."


class CommentBlanker:
    """Single-pass scanner that blanks comments and, optionally, literal bodies.

    Strings, byte strings and raw strings (``r"…"``, ``r#"…"#`` with up to
    three hashes) are copied verbatim; line comments and nested block comments
    are replaced by spaces with newlines kept.
    """

    def __init__(self, source: str, blank_literals: bool = False):
        self.source = source
        self.blank_literals = blank_literals
        self.position = 0
        self.output: List[str] = []

    def run(self) -> str:
        while self.position < len(self.source):
            if self._match_line_comment():
                continue
            elif self._match_block_comment():
                continue
            elif self._match_raw_string():
                continue
            elif self._match_string():
                continue
            elif self._match_char():
                continue
            else:
                self._emit(self._advance())
        return "".join(self.output)

    def _current_char(self) -> str:
        if self.position >= len(self.source):
            return '\0'
        return self.source[self.position]

    def _peek_char(self, offset: int = 1) -> str:
        pos = self.position + offset
        if pos >= len(self.source):
            return '\0'
        return self.source[pos]

    def _advance(self) -> str:
        char = self.source[self.position]
        self.position += 1
        return char

    def _emit(self, char: str):
        self.output.append(char)

    def _blank(self, char: str):
        self.output.append('\n' if char == '\n' else ' ')

    def _literal_body(self, char: str):
        if self.blank_literals:
            self._blank(char)
        else:
            self._emit(char)

    def _at_identifier_boundary(self) -> bool:
        """True if the previous char cannot continue an identifier."""
        if self.position == 0:
            return True
        prev = self.source[self.position - 1]
        return not (prev.isalnum() or prev == '_')

    def _match_line_comment(self) -> bool:
        if self._current_char() == '/' and self._peek_char() == '/':
            while self.position < len(self.source) and self._current_char() != '\n':
                self._blank(self._advance())
            return True
        return False

    def _match_block_comment(self) -> bool:
        if not (self._current_char() == '/' and self._peek_char() == '*'):
            return False
        depth = 0
        while self.position < len(self.source):
            if self._current_char() == '/' and self._peek_char() == '*':
                depth += 1
                self._blank(self._advance())
                self._blank(self._advance())
            elif self._current_char() == '*' and self._peek_char() == '/':
                depth -= 1
                self._blank(self._advance())
                self._blank(self._advance())
                if depth == 0:
                    break
            else:
                self._blank(self._advance())
        return True

    def _match_raw_string(self) -> bool:
        if not self._at_identifier_boundary():
            return False
        prefix = 0
        if self._current_char() == 'b' and self._peek_char() == 'r':
            prefix = 2
        elif self._current_char() == 'r':
            prefix = 1
        else:
            return False
        hashes = 0
        while self._peek_char(prefix + hashes) == '#' and hashes < MAX_RAW_HASHES:
            hashes += 1
        if self._peek_char(prefix + hashes) != '"':
            return False

        for _ in range(prefix + hashes + 1):
            self._emit(self._advance())
        closing = '"' + '#' * hashes
        while self.position < len(self.source):
            if self.source.startswith(closing, self.position):
                for _ in range(len(closing)):
                    self._emit(self._advance())
                return True
            self._literal_body(self._advance())
        return True

    def _match_string(self) -> bool:
        if self._current_char() == 'b' and self._peek_char() == '"' and self._at_identifier_boundary():
            self._emit(self._advance())
        elif self._current_char() != '"':
            return False

        self._emit(self._advance())  # opening quote
        while self.position < len(self.source):
            char = self._current_char()
            if char == '\\' and self.position + 1 < len(self.source):
                self._literal_body(self._advance())
                self._literal_body(self._advance())
            elif char == '"':
                self._emit(self._advance())
                return True
            else:
                self._literal_body(self._advance())
        return True

    def _match_char(self) -> bool:
        if self._current_char() != "'":
            return False
        match = _CHAR_LITERAL_RE.match(self.source, self.position)
        if not match:
            return False
        self._emit(self._advance())
        while self.position < match.end() - 1:
            self._literal_body(self._advance())
        self._emit(self._advance())
        return True


def blank_comments(text: str) -> str:
    """Return text with all comments replaced by spaces."""
    return CommentBlanker(text).run()


def blank_literals(text: str) -> str:
    """Return comment-free text with literal contents blanked too."""
    return CommentBlanker(text, blank_literals=True).run()


def compute_line_starts(text: str) -> List[int]:
    starts = [0]
    for index, char in enumerate(text):
        if char == '\n':
            starts.append(index + 1)
    return starts


def load_text(text: str, path: str = "<memory>") -> SourceUnit:
    """Normalize in-memory source text into a SourceUnit."""
    scan_text = blank_comments(text)
    return SourceUnit(
        path=path,
        raw_text=text,
        scan_text=scan_text,
        code_text=blank_literals(scan_text),
        line_starts=compute_line_starts(text),
    )


def load_source(path: Union[str, Path]) -> SourceUnit:
    """Read a UTF-8 file from disk and normalize it."""
    file_path = Path(path)
    try:
        data = file_path.read_bytes()
    except OSError as e:
        raise IOFailure(f"cannot read file: {e.strerror or e}", str(file_path))
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise EncodingError(f"not valid UTF-8 at byte {e.start}", str(file_path))
    return load_text(text, str(file_path))


def offset_to_location(unit: SourceUnit, offset: int) -> SourceLocation:
    """Map a character offset to its 1-based line and column."""
    if not 0 <= offset <= len(unit.raw_text):
        raise OutOfRange(f"offset {offset} outside 0..{len(unit.raw_text)}", unit.path)
    line_index = bisect.bisect_right(unit.line_starts, offset) - 1
    column = offset - unit.line_starts[line_index] + 1
    return SourceLocation(line=line_index + 1, column=column, byte_offset=offset)
