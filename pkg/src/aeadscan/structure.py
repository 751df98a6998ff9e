"""
aeadscan Structural Analysis

Lightweight structure recovery over a normalized SourceUnit: brace-depth loop
extraction, statement boundaries, variable provenance, encrypt-call nonce
capture and key/nonce material sinks. Nothing here builds an AST; every helper
works on ``code_text`` (comments and literal contents blanked) so the offsets
it returns index straight into the original file.
"""

import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from enum import Enum
from typing import List, Optional, Tuple

from .source import SourceLocation, SourceUnit

logger = logging.getLogger(__name__)


# Entropy lexicon: CSPRNG sources and regeneration helpers.
ENTROPY_RE = re.compile(r'\b(?:OsRng|fill_bytes|try_fill_bytes|generate_nonce|generate_key)\b')

KDF_RE = re.compile(r'(?i)(?:argon2|pbkdf2|scrypt|hkdf|derive_key)')

ENCRYPT_CALL_RE = re.compile(r'\.encrypt(?:_in_place(?:_detached)?)?\s*\(')

# Nonce capture on encrypt-family calls; the first identifier argument.
NONCE_CAPTURE_RE = re.compile(
    r'\.encrypt(?:_in_place(?:_detached)?)?\s*\('
    r'\s*(?:&(?:mut\s+)?)?(\w+)'
)

LOOP_KEYWORD_RE = re.compile(r'\b(for|while|loop)\b')

IDENT_RE = re.compile(r'\b[A-Za-z_]\w*\b')

_PATH_CALL_RE = re.compile(r'(?:\s*::\s*(?:<[^<>()]*(?:<[^<>()]*>)?[^<>()]*>|\w+))+\s*\(')

_ARG_IDENT_RE = re.compile(
    r'^\s*(?:&\s*(?:mut\s+)?|\*\s*)*([A-Za-z_]\w*)'
    r'(?:\s*\.\s*(?:into|as_ref|as_slice|as_bytes|to_vec|clone|as_mut)\s*\(\s*\))*'
    r'(?:\s*\[\s*\.\.\s*\])?\s*$'
)

_LITERAL_PREFIX_RE = re.compile(r'(?:&\s*(?:mut\s+)?|\*\s*)*')

_LITERAL_TRAILER_RE = re.compile(
    r'(?:\s*\.\s*(?:into|as_ref|as_slice|to_vec|to_owned|clone)\s*\(\s*\))*\s*$'
)

_NUMBER_RE = re.compile(
    r'^(?:0x[0-9a-fA-F_]+|0o[0-7_]+|0b[01_]+|\d[\d_]*)(?:_?[ui](?:8|16|32|64|128|size))?$'
)

_BYTE_CHAR_RE = re.compile(r"^b'(?:\\.|[^\\'])*'$")

_LET_RE = re.compile(r'\blet\s+(?:mut\s+)?([A-Za-z_]\w*)\s*(?::[^=\n{}]+?)?=(?!=)')

_FN_PARAMS_RE = re.compile(r'\bfn\s+\w+\s*(?:<[^{};]*?>)?\s*\(')

_SINK_RE = re.compile(
    r'\b(?:'
    r'(?P<typed>Key|Nonce|XNonce|GenericArray)'
    r'(?:\s*::\s*<[^<>()]*(?:<[^<>()]*>)?[^<>()]*>)?\s*::\s*(?:from_slice|clone_from_slice|from)'
    r'|(?P<slice>new_from_slice)'
    r'|(?P<cipher>Aes(?:128|192|256)Gcm(?:Siv)?|X?ChaCha20Poly1305|Aes(?:128|256)Ccm)\s*::\s*new'
    r')\s*\('
)

NONCE_SIZES = (12, 24)


class StructureError(Exception):
    """Base class for structural analysis errors."""
    def __init__(self, message: str, path: Optional[str] = None, offset: Optional[int] = None):
        self.message = message
        self.path = path
        self.offset = offset
        where = path or '<unknown>'
        if offset is not None:
            where = f"{where}@{offset}"
        super().__init__(f"{where}: {message}")


class UnknownVariable(StructureError):
    """Raised when a variable has no `let` declaration before its use."""
    def __init__(self, variable: str, path: Optional[str] = None, offset: Optional[int] = None):
        self.variable = variable
        super().__init__(f"variable '{variable}' is not declared before use", path, offset)


class UnbalancedBraces(StructureError):
    """Raised when the file ends before a block is closed."""


class Provenance(Enum):
    LITERAL_ONLY = "LiteralOnly"
    RANDOMIZED_BEFORE_USE = "RandomizedBeforeUse"
    NON_LITERAL = "NonLiteral"


@dataclass(frozen=True)
class LoopBody:
    """Exact brace-balanced body of a `for`, `while` or `loop`."""
    header_kind: str
    body_text: str
    body_start: SourceLocation
    start: int
    end: int
    header_offset: int

    def contains(self, offset: int) -> bool:
        return self.start <= offset < self.end


@dataclass(frozen=True)
class NonceUse:
    """The nonce argument of one encrypt-family call.

    ``variable`` is the tracked identifier after resolving
    ``Nonce::from_slice(&x)`` style wrappers; it is None when the argument is a
    literal, a function call or an indexed expression.
    """
    variable: Optional[str]
    call_site: SourceLocation
    call_index: int
    offset: int
    method: str
    args_start: int
    args_end: int
    argument: str
    captured: Optional[str] = None
    literal: bool = False

    def encloses(self, offset: int) -> bool:
        return self.args_start <= offset < self.args_end


@dataclass(frozen=True)
class ProvenanceState:
    variable: str
    declared_at: SourceLocation
    classification: Provenance
    declaration_offset: int
    literal_size: Optional[int] = None


@dataclass(frozen=True)
class MaterialSink:
    """A call that turns bytes into key or nonce material."""
    kind: str  # "key" or "nonce"
    call: str
    offset: int
    args_start: int
    args_end: int
    argument: str
    literal: bool
    variable: Optional[str]
    size: Optional[int]
    bound_to: Optional[str] = None


@dataclass(frozen=True)
class LiteralSpan:
    start: int
    end: int
    size: Optional[int]


# -- delimiters and statements ------------------------------------------------

_PAIRS = {'(': ')', '[': ']', '{': '}'}
_REVERSE_PAIRS = {')': '(', ']': '[', '}': '{'}


def match_delimiter(text: str, open_index: int, path: Optional[str] = None) -> int:
    """Return the index of the delimiter closing the one at ``open_index``."""
    opening = text[open_index]
    closing = _PAIRS[opening]
    depth = 0
    for index in range(open_index, len(text)):
        char = text[index]
        if char == opening:
            depth += 1
        elif char == closing:
            depth -= 1
            if depth == 0:
                return index
    raise UnbalancedBraces(f"unclosed '{opening}' opened here", path, open_index)


def match_backward(text: str, close_index: int) -> int:
    """Return the index of the delimiter opening the one at ``close_index``, or -1."""
    closing = text[close_index]
    opening = _REVERSE_PAIRS[closing]
    depth = 0
    for index in range(close_index, -1, -1):
        char = text[index]
        if char == closing:
            depth += 1
        elif char == opening:
            depth -= 1
            if depth == 0:
                return index
    return -1


def statement_start(text: str, offset: int) -> int:
    """Index of the first character of the statement containing ``offset``."""
    depth = 0
    index = offset - 1
    while index >= 0:
        char = text[index]
        if char in ')]':
            depth += 1
        elif char in '([':
            depth = max(depth - 1, 0) if depth else depth
        elif char in ';{}' and depth == 0:
            return index + 1
        index -= 1
    return 0


def statement_end(text: str, offset: int) -> int:
    """Index of the `;` (or enclosing `}`) that ends the statement at ``offset``."""
    depth = 0
    for index in range(offset, len(text)):
        char = text[index]
        if char in '([{':
            depth += 1
        elif char in ')]}':
            if depth == 0:
                return index
            depth -= 1
        elif char == ';' and depth == 0:
            return index
    return len(text)


def first_argument_span(text: str, open_index: int, close_index: int) -> Tuple[int, int]:
    """Span of the first top-level argument between a call's parentheses."""
    depth = 0
    for index in range(open_index + 1, close_index):
        char = text[index]
        if char in '([{':
            depth += 1
        elif char in ')]}':
            depth -= 1
        elif char == ',' and depth == 0:
            return open_index + 1, index
    return open_index + 1, close_index


def call_arguments(text: str, open_index: int) -> Tuple[int, int, str]:
    """Return (args_start, args_end, first_argument) for the call at ``open_index``."""
    try:
        close_index = match_delimiter(text, open_index)
    except UnbalancedBraces:
        close_index = len(text)
    arg_start, arg_end = first_argument_span(text, open_index, close_index)
    return open_index + 1, close_index, text[arg_start:arg_end]


def statement_binding(text: str, offset: int) -> Optional[Tuple[str, int]]:
    """(name, value_start) of the `let` statement whose value contains ``offset``."""
    start = statement_start(text, offset)
    match = _LET_RE.search(text, start, offset)
    if not match:
        return None
    return match.group(1), match.end()


def binding_name(text: str, offset: int) -> Optional[str]:
    """Name bound by a `let` whose right-hand side starts at ``offset``."""
    binding = statement_binding(text, offset)
    if binding is None:
        return None
    name, value_start = binding
    if text[value_start:offset].strip() not in ('', '&'):
        return None
    return name


def iter_let_statements(text: str):
    """Yield (name, let_offset, value_start, value_end) for every `let` in file order."""
    for match in _LET_RE.finditer(text):
        yield match.group(1), match.start(), match.end(), statement_end(text, match.end())


# -- literals -----------------------------------------------------------------

def _byte_string_size(body: str) -> int:
    size = 0
    index = 0
    while index < len(body):
        if body[index] == '\\' and index + 1 < len(body):
            escape = body[index + 1]
            if escape == 'x':
                index += 4
            elif escape == '\n':
                index += 2
                while index < len(body) and body[index] in ' \t\n':
                    index += 1
                continue
            else:
                index += 2
            size += 1
            continue
        size += 1
        index += 1
    return size


def _array_literal_size(body: str) -> Optional[int]:
    """Element count of an array literal body, or None if it is not all literals."""
    body = body.strip()
    depth = 0
    for index, char in enumerate(body):
        if char in '([{':
            depth += 1
        elif char in ')]}':
            depth -= 1
        elif char == ';' and depth == 0:
            element, count = body[:index].strip(), body[index + 1:].strip()
            if not (_NUMBER_RE.match(element) or _BYTE_CHAR_RE.match(element)):
                return None
            count = count.replace('_', '')
            return int(count) if count.isdigit() else -1
    elements = [part.strip() for part in body.split(',')]
    if elements and elements[-1] == '':
        elements.pop()
    if not elements:
        return None
    for element in elements:
        if not (_NUMBER_RE.match(element) or _BYTE_CHAR_RE.match(element)):
            return None
    return len(elements)


def literal_span(text: str, start: int = 0, end: Optional[int] = None) -> Optional[LiteralSpan]:
    """Locate an inline literal expression that fills ``text[start:end]``.

    Recognized: byte strings (`b"…"`, `br"…"`, optionally `*`/`&` prefixed) and
    arrays whose elements are all numeric or byte-char literals
    (`[0u8; 12]`, `[0x00, 0x01, …]`), followed by conversion calls such as
    `.into()`. Plain `"…"` strings are not key material.
    """
    if end is None:
        end = len(text)
    prefix = _LITERAL_PREFIX_RE.match(text, _skip_space(text, start, end))
    pos = _skip_space(text, prefix.end(), end)
    if pos >= end:
        return None

    if text.startswith('b"', pos) or text.startswith('br', pos):
        quote = text.find('"', pos)
        if quote < 0 or quote >= end:
            return None
        raw = text.startswith('br', pos)
        hashes = text[pos + 2:quote] if raw else ''
        if hashes.strip('#'):
            return None
        closing = '"' + hashes
        index = quote + 1
        while index < end:
            if not raw and text[index] == '\\':
                index += 2
                continue
            if text.startswith(closing, index):
                break
            index += 1
        else:
            return None
        literal_end = index + len(closing)
        if not _LITERAL_TRAILER_RE.match(text, literal_end, end):
            return None
        body = text[quote + 1:index]
        size = len(body) if raw else _byte_string_size(body)
        return LiteralSpan(pos, literal_end, size)

    if text[pos] == '[':
        try:
            close = match_delimiter(text, pos)
        except UnbalancedBraces:
            return None
        if close >= end:
            return None
        size = _array_literal_size(text[pos + 1:close])
        if size is None:
            return None
        if not _LITERAL_TRAILER_RE.match(text, close + 1, end):
            return None
        return LiteralSpan(pos, close + 1, size if size >= 0 else None)
    return None


def is_literal_expr(expr: str) -> bool:
    return literal_span(expr) is not None


def literal_size(expr: str) -> Optional[int]:
    span = literal_span(expr)
    return span.size if span else None


def _skip_space(text: str, pos: int, end: int) -> int:
    while pos < end and text[pos].isspace():
        pos += 1
    return pos


def argument_identifier(argument: str) -> Optional[str]:
    """Identifier an argument expression reads, e.g. `&key.into()` → `key`."""
    match = _ARG_IDENT_RE.match(argument)
    return match.group(1) if match else None


# -- loops --------------------------------------------------------------------

def _find_loop_brace(text: str, pos: int, kind: str) -> Optional[int]:
    depth = 0
    for index in range(pos, len(text)):
        char = text[index]
        if char in '([':
            depth += 1
        elif char in ')]':
            depth -= 1
            if depth < 0:
                return None
        elif depth == 0 and char in ';}':
            return None
        elif depth == 0 and char == '{':
            header = text[pos:index]
            if kind == 'loop' and header.strip():
                return None
            if kind == 'for' and not re.search(r'\bin\b', header):
                return None
            if kind == 'while' and not header.strip():
                return None
            return index
    return None


def extract_loop_bodies(unit: SourceUnit, notes: Optional[List[str]] = None) -> List[LoopBody]:
    """Extract every `for`/`while`/`loop` body by brace-depth counting.

    Nested loops each produce their own body, in file order of their headers.
    A loop whose body runs off the end of the file is skipped and described
    in ``notes``.
    """
    text = unit.code_text
    bodies = []
    for match in LOOP_KEYWORD_RE.finditer(text):
        kind = match.group(1)
        open_index = _find_loop_brace(text, match.end(), kind)
        if open_index is None:
            continue
        try:
            close_index = match_delimiter(text, open_index, unit.path)
        except UnbalancedBraces as e:
            location = unit.offset_to_location(open_index)
            message = f"{unit.path}:{location}: unbalanced braces in '{kind}' loop body; loop skipped"
            logger.warning(message)
            if notes is not None:
                notes.append(message)
            continue
        bodies.append(LoopBody(
            header_kind=kind,
            body_text=unit.scan_text[open_index + 1:close_index],
            body_start=unit.offset_to_location(open_index + 1),
            start=open_index + 1,
            end=close_index,
            header_offset=match.start(),
        ))
    return bodies


# -- provenance ---------------------------------------------------------------

PATTERN_CACHE_SIZE = 512


@lru_cache(maxsize=PATTERN_CACHE_SIZE)
def declaration_pattern(variable: str) -> "re.Pattern[str]":
    v = re.escape(variable)
    return re.compile(rf'\blet\s+(?:mut\s+)?{v}\b\s*(?::[^=\n{{}}]+?)?=(?!=)')


@lru_cache(maxsize=PATTERN_CACHE_SIZE)
def regeneration_pattern(variable: str) -> "re.Pattern[str]":
    """Entropy write into ``variable``: a fill or a reassignment from a CSPRNG."""
    v = re.escape(variable)
    return re.compile(
        rf'(?:OsRng\s*\.\s*fill_bytes|try_fill_bytes|fill_bytes)\s*\(\s*(?:&\s*mut\s+)?{v}\b'
        rf'|\b{v}\s*=(?!=)[^;]*?(?:OsRng|generate_nonce|generate_key|\brand\b)'
    )


def find_declaration(unit: SourceUnit, variable: str, before: int) -> Optional["re.Match[str]"]:
    """Nearest complete `let` of ``variable`` ending before ``before``."""
    text = unit.code_text
    matches = list(declaration_pattern(variable).finditer(text, 0, before))
    for match in reversed(matches):
        if statement_end(text, match.end()) < before:
            return match
    return None


def track_provenance(unit: SourceUnit, variable: str, use_offset: int) -> ProvenanceState:
    """Classify the value ``variable`` holds at ``use_offset``.

    Shadowed declarations bind to the nearest preceding complete `let`.
    Raises UnknownVariable when there is none (parameters, statics, consts).
    """
    declaration = find_declaration(unit, variable, use_offset)
    if declaration is None:
        raise UnknownVariable(variable, unit.path, use_offset)

    text = unit.code_text
    rhs_start = declaration.end()
    rhs_end = statement_end(text, rhs_start)
    span = literal_span(unit.scan_text, rhs_start, rhs_end)
    declared_at = unit.offset_to_location(declaration.start())

    if span is None:
        classification = Provenance.NON_LITERAL
    elif regeneration_pattern(variable).search(text, rhs_end, use_offset):
        classification = Provenance.RANDOMIZED_BEFORE_USE
    else:
        classification = Provenance.LITERAL_ONLY

    return ProvenanceState(
        variable=variable,
        declared_at=declared_at,
        classification=classification,
        declaration_offset=declaration.start(),
        literal_size=span.size if span else None,
    )


def provenance_or_none(unit: SourceUnit, variable: str, use_offset: int) -> Optional[ProvenanceState]:
    try:
        return track_provenance(unit, variable, use_offset)
    except UnknownVariable:
        return None


def is_parameter_between(text: str, variable: str, start: int, end: int) -> bool:
    """True if a function between ``start`` and ``end`` declares ``variable`` as a parameter."""
    param = re.compile(rf'(?:^|[,(])\s*(?:mut\s+)?{re.escape(variable)}\s*:')
    for match in _FN_PARAMS_RE.finditer(text, start, end):
        open_index = match.end() - 1
        try:
            close_index = match_delimiter(text, open_index)
        except UnbalancedBraces:
            continue
        if param.search(text[open_index:close_index]):
            return True
    return False


# -- encrypt calls and material sinks -------------------------------------------

def _resolve_capture(text: str, capture: "re.Match[str]") -> Tuple[Optional[str], bool]:
    """Resolve the captured nonce identifier to the buffer it names.

    Returns (variable, literal).
    """
    name = capture.group(1)
    after = capture.end()
    if name in ('b', 'br') and after < len(text) and text[after] in '"#':
        return None, True
    path_call = _PATH_CALL_RE.match(text, after)
    if path_call:
        _, _, inner = call_arguments(text, path_call.end() - 1)
        if is_literal_expr(inner):
            return None, True
        return argument_identifier(inner), False
    rest = text[after:after + 64].lstrip()
    if rest.startswith('(') or rest.startswith('['):
        return None, False
    return name, False


def find_nonce_uses(unit: SourceUnit) -> List[NonceUse]:
    """Every encrypt-family call in file order with its captured nonce."""
    text = unit.code_text
    uses = []
    for index, match in enumerate(ENCRYPT_CALL_RE.finditer(text)):
        args_start, args_end, argument = call_arguments(text, match.end() - 1)
        capture = NONCE_CAPTURE_RE.match(text, match.start())
        captured = capture.group(1) if capture else None
        if capture:
            variable, literal = _resolve_capture(text, capture)
        else:
            variable, literal = None, is_literal_expr(argument)
        method = text[match.start() + 1:match.end() - 1].strip()
        uses.append(NonceUse(
            variable=variable,
            call_site=unit.offset_to_location(match.start() + 1),
            call_index=index,
            offset=match.start() + 1,
            method=method,
            args_start=args_start,
            args_end=args_end,
            argument=argument.strip(),
            captured=captured,
            literal=literal,
        ))
    return uses


def reaches_encrypt(text: str, offset: int, bound_to: Optional[str], uses: List[NonceUse]) -> bool:
    """True if a value built at ``offset`` is passed to an encrypt call."""
    for use in uses:
        if use.encloses(offset):
            return True
        if bound_to and use.offset > offset and bound_to in (use.variable, use.captured):
            return True
    return False


def find_material_sinks(unit: SourceUnit, uses: Optional[List[NonceUse]] = None) -> List[MaterialSink]:
    """Key and nonce constructors with their first argument classified.

    `Key::…` constructors, `new_from_slice` and AEAD `::new` take key
    material; `Nonce::…` takes nonce material. `GenericArray::from_slice`
    is classified by literal size (12 or 24 bytes is a nonce), or by
    whether the result reaches an encrypt call when the size is unknown.
    """
    text = unit.code_text
    if uses is None:
        uses = find_nonce_uses(unit)
    sinks = []
    for match in _SINK_RE.finditer(text):
        open_index = match.end() - 1
        args_start, args_end, argument = call_arguments(text, open_index)
        arg_start, arg_end = first_argument_span(text, open_index, args_end)
        span = literal_span(unit.scan_text, arg_start, arg_end)
        variable = None if span else argument_identifier(argument)
        size = span.size if span else None
        bound_to = binding_name(text, match.start())

        if match.group('slice') or match.group('cipher') or match.group('typed') == 'Key':
            kind = 'key'
        elif match.group('typed') in ('Nonce', 'XNonce'):
            kind = 'nonce'
        else:
            if size is None and variable:
                state = provenance_or_none(unit, variable, match.start())
                size = state.literal_size if state else None
            if size is not None:
                kind = 'nonce' if size in NONCE_SIZES else 'key'
            else:
                kind = 'nonce' if reaches_encrypt(text, match.start(), bound_to, uses) else 'key'

        sinks.append(MaterialSink(
            kind=kind,
            call=' '.join(match.group(0)[:-1].split()),
            offset=match.start(),
            args_start=args_start,
            args_end=args_end,
            argument=argument.strip(),
            literal=span is not None,
            variable=variable,
            size=size,
            bound_to=bound_to,
        ))
    return sinks


# -- receiver chains ------------------------------------------------------------

def _is_ident_char(char: str) -> bool:
    return char.isalnum() or char == '_'


class ReceiverWalker:
    """Walks a method chain backwards from the `.` before a method call.

    `cipher.encrypt(&n, m)\\n    .expect("…")` walked from the `.` of
    `expect` yields ``["encrypt"]``; `Aes256Gcm::new_from_slice(&k).unwrap()`
    yields ``["new_from_slice"]``. Only call names are collected.
    """

    def __init__(self, text: str, dot_index: int):
        self.text = text
        self.position = dot_index - 1
        self.calls: List[str] = []

    def walk(self) -> List[str]:
        self._skip_space()
        while self.position >= 0:
            if not self._match_element():
                break
            if not self._match_connector():
                break
        return self.calls

    def _current_char(self) -> str:
        if self.position < 0:
            return '\0'
        return self.text[self.position]

    def _skip_space(self):
        while self.position >= 0 and self.text[self.position].isspace():
            self.position -= 1

    def _read_identifier(self) -> str:
        end = self.position
        while self.position >= 0 and _is_ident_char(self.text[self.position]):
            self.position -= 1
        return self.text[self.position + 1:end + 1]

    def _skip_generics(self) -> bool:
        """Skip a `::<…>` turbofish ending at the cursor."""
        depth = 0
        while self.position >= 0:
            char = self.text[self.position]
            if char == '>':
                depth += 1
            elif char == '<':
                depth -= 1
                if depth == 0:
                    self.position -= 1
                    self._skip_space()
                    return self._match_path_separator()
            elif char in ';{}':
                return False
            self.position -= 1
        return False

    def _match_path_separator(self) -> bool:
        if self.position >= 1 and self.text[self.position - 1:self.position + 1] == '::':
            self.position -= 2
            self._skip_space()
            return True
        return False

    def _match_element(self) -> bool:
        while self._current_char() == '?':
            self.position -= 1
            self._skip_space()
        while self._current_char() == ']':
            opening = match_backward(self.text, self.position)
            if opening < 0:
                return False
            self.position = opening - 1
            self._skip_space()
        char = self._current_char()
        if char == ')':
            opening = match_backward(self.text, self.position)
            if opening < 0:
                return False
            self.position = opening - 1
            self._skip_space()
            if self._current_char() == '>' and not self._skip_generics():
                return False
            if not _is_ident_char(self._current_char()):
                return False
            self.calls.append(self._read_identifier())
            return True
        if char == '>':
            if not self._skip_generics():
                return False
            char = self._current_char()
        if _is_ident_char(char):
            self._read_identifier()
            return True
        return False

    def _match_connector(self) -> bool:
        self._skip_space()
        if self._current_char() == '.':
            self.position -= 1
            self._skip_space()
            return True
        return self._match_path_separator()


def receiver_chain(text: str, dot_index: int) -> List[str]:
    return ReceiverWalker(text, dot_index).walk()
