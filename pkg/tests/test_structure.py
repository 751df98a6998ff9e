"""Tests for loop extraction, provenance, nonce capture and material sinks."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aeadscan.source import load_text
from aeadscan.structure import (
    PATTERN_CACHE_SIZE,
    Provenance,
    UnbalancedBraces,
    UnknownVariable,
    argument_identifier,
    declaration_pattern,
    extract_loop_bodies,
    find_material_sinks,
    find_nonce_uses,
    literal_size,
    match_delimiter,
    receiver_chain,
    track_provenance,
)

_HEADERS = {
    "for": "for i in 0..n ",
    "while": "while c ",
    "loop": "loop ",
    "if": "if c ",
}

blocks = st.recursive(
    st.just("stmt"),
    lambda children: st.tuples(st.sampled_from(sorted(_HEADERS)), st.lists(children, max_size=3)),
    max_leaves=12,
)


class _Writer:
    """Renders a block tree and records each loop body's exact text."""

    def __init__(self):
        self.parts = []
        self.length = 0
        self.expected = []

    def write(self, text):
        self.parts.append(text)
        self.length += len(text)

    def render(self, node):
        if node == "stmt":
            self.write("x += 1; ")
            return
        kind, children = node
        self.write(_HEADERS[kind] + "{")
        slot = None
        if kind != "if":
            slot = len(self.expected)
            self.expected.append(None)
        start = self.length
        for child in children:
            self.render(child)
        end = self.length
        self.write("} ")
        if slot is not None:
            self.expected[slot] = (kind, start, end)

    @property
    def text(self):
        return "".join(self.parts)


class TestLoopExtraction:

    def test_nested_loops_each_produce_a_body(self, make_unit):
        unit = make_unit("fn main() {\n    for i in 0..3 {\n        while go {\n            step();\n        }\n    }\n}\n")
        bodies = extract_loop_bodies(unit)
        assert [body.header_kind for body in bodies] == ["for", "while"]
        assert "while go" in bodies[0].body_text
        assert bodies[1].body_text.strip() == "step();"
        assert bodies[0].body_start.line == 2

    def test_loops_in_comments_and_strings_are_ignored(self, make_unit):
        unit = make_unit('fn main() {\n    // for i in 0..3 { }\n    let s = "loop { }";\n}\n')
        assert extract_loop_bodies(unit) == []

    def test_format_braces_inside_body_do_not_end_it(self, make_unit):
        unit = make_unit('fn main() {\n    loop {\n        println!("{}", 1);\n        tick();\n    }\n}\n')
        bodies = extract_loop_bodies(unit)
        assert len(bodies) == 1
        assert "tick();" in bodies[0].body_text

    def test_unbalanced_body_is_skipped_with_note(self, make_unit):
        unit = make_unit("fn main() {\n    for i in 0..3 {\n        step();\n")
        notes = []
        assert extract_loop_bodies(unit, notes) == []
        assert len(notes) == 1
        assert "unbalanced braces" in notes[0]

    def test_while_let_and_labelled_loops(self, make_unit):
        unit = make_unit("fn f() {\n    'outer: loop {\n        while let Some(x) = it.next() {\n            use_it(x);\n        }\n    }\n}\n")
        assert [body.header_kind for body in extract_loop_bodies(unit)] == ["loop", "while"]

    @given(st.lists(blocks, max_size=4))
    @settings(max_examples=200)
    def test_bodies_match_brute_force_rendering(self, tree):
        writer = _Writer()
        writer.write("fn main() { ")
        for node in tree:
            writer.render(node)
        writer.write("}")
        unit = load_text(writer.text)

        bodies = extract_loop_bodies(unit)
        text = writer.text
        assert [(body.header_kind, body.body_text) for body in bodies] == [
            (kind, text[start:end]) for kind, start, end in writer.expected
        ]
        for body in bodies:
            assert text[body.start:body.end] == body.body_text


class TestDelimiters:

    def test_match_delimiter(self):
        assert match_delimiter("f(a, (b), c)", 1) == 11

    def test_unclosed_delimiter_raises(self):
        with pytest.raises(UnbalancedBraces):
            match_delimiter("f(a, (b)", 1)

    def test_receiver_chain_across_lines(self):
        text = 'cipher.encrypt(&n, m)\n    .expect("x")'
        assert receiver_chain(text, text.index(".expect")) == ["encrypt"]

    def test_receiver_chain_through_path_call(self):
        text = "Aes256Gcm::new_from_slice(&k).unwrap()"
        assert receiver_chain(text, text.index(".unwrap")) == ["new_from_slice"]

    def test_argument_identifier(self):
        assert argument_identifier("&key.into()") == "key"
        assert argument_identifier("&mut buffer") == "buffer"
        assert argument_identifier("make_key()") is None


class TestLiterals:

    def test_repeat_array_size(self):
        assert literal_size("[0u8; 12]") == 12

    def test_byte_string_size_counts_escapes(self):
        assert literal_size('b"\\x00\\x01ab"') == 4

    def test_element_array(self):
        assert literal_size("&[0x00, 0x01, 0x02]") == 3

    def test_plain_string_is_not_material(self):
        assert literal_size('"not bytes"') is None

    def test_array_of_calls_is_not_literal(self):
        assert literal_size("[rng.gen(), 1]") is None


class TestProvenance:

    def _use_offset(self, unit, marker="cipher.encrypt"):
        return unit.code_text.index(marker)

    def test_literal_only(self, make_unit):
        unit = make_unit("let nonce = [0u8; 12];\ncipher.encrypt(Nonce::from_slice(&nonce), pt);\n")
        state = track_provenance(unit, "nonce", self._use_offset(unit))
        assert state.classification is Provenance.LITERAL_ONLY
        assert state.literal_size == 12
        assert state.declared_at.line == 1

    def test_filled_before_use(self, make_unit):
        unit = make_unit(
            "let mut nonce = [0u8; 12];\nOsRng.fill_bytes(&mut nonce);\n"
            "cipher.encrypt(Nonce::from_slice(&nonce), pt);\n"
        )
        state = track_provenance(unit, "nonce", self._use_offset(unit))
        assert state.classification is Provenance.RANDOMIZED_BEFORE_USE

    def test_fill_after_use_does_not_count(self, make_unit):
        unit = make_unit(
            "let mut nonce = [0u8; 12];\ncipher.encrypt(Nonce::from_slice(&nonce), pt);\n"
            "OsRng.fill_bytes(&mut nonce);\n"
        )
        state = track_provenance(unit, "nonce", self._use_offset(unit))
        assert state.classification is Provenance.LITERAL_ONLY

    def test_generated_value_is_non_literal(self, make_unit):
        unit = make_unit("let nonce = Aes256Gcm::generate_nonce(&mut OsRng);\ncipher.encrypt(&nonce, pt);\n")
        state = track_provenance(unit, "nonce", self._use_offset(unit))
        assert state.classification is Provenance.NON_LITERAL

    def test_shadowing_binds_nearest_declaration(self, make_unit):
        unit = make_unit(
            "let nonce = [0u8; 12];\nlet nonce = Aes256Gcm::generate_nonce(&mut OsRng);\n"
            "cipher.encrypt(&nonce, pt);\n"
        )
        state = track_provenance(unit, "nonce", self._use_offset(unit))
        assert state.classification is Provenance.NON_LITERAL
        assert state.declared_at.line == 2

    def test_declaration_still_open_at_use_is_skipped(self, make_unit):
        unit = make_unit(
            "let nonce = [0u8; 12];\n"
            "let nonce = {\n    cipher.encrypt(&nonce, pt)\n};\n"
        )
        state = track_provenance(unit, "nonce", self._use_offset(unit))
        assert state.declared_at.line == 1

    def test_compiled_patterns_stay_bounded(self, make_unit):
        count = PATTERN_CACHE_SIZE + 100
        unit = make_unit("".join(f"let v{i} = [0u8; 12];\n" for i in range(count)) + "cipher.encrypt(&v0, pt);\n")
        use = self._use_offset(unit)
        for i in range(count):
            assert track_provenance(unit, f"v{i}", use).declared_at.line == i + 1
        assert declaration_pattern.cache_info().currsize <= PATTERN_CACHE_SIZE

    def test_undeclared_variable(self, make_unit):
        unit = make_unit("fn seal(nonce: &[u8]) {\n    cipher.encrypt(Nonce::from_slice(nonce), pt);\n}\n")
        with pytest.raises(UnknownVariable) as excinfo:
            track_provenance(unit, "nonce", self._use_offset(unit))
        assert excinfo.value.variable == "nonce"


class TestNonceUses:

    def test_wrapped_nonce_resolves_to_buffer(self, make_unit):
        unit = make_unit("cipher.encrypt(Nonce::from_slice(&nonce), pt);\ncipher.encrypt(&nonce, pt2);\n")
        uses = find_nonce_uses(unit)
        assert [(use.variable, use.call_index, use.method) for use in uses] == [
            ("nonce", 0, "encrypt"),
            ("nonce", 1, "encrypt"),
        ]
        assert uses[1].call_site.line == 2

    def test_literal_nonce_argument(self, make_unit):
        unit = make_unit('cipher.encrypt(Nonce::from_slice(b"unique nonce"), pt);\n')
        (use,) = find_nonce_uses(unit)
        assert use.literal
        assert use.variable is None

    def test_in_place_variants(self, make_unit):
        unit = make_unit("cipher.encrypt_in_place(&nonce, b\"\", &mut buffer);\n")
        (use,) = find_nonce_uses(unit)
        assert use.method == "encrypt_in_place"
        assert use.variable == "nonce"


class TestMaterialSinks:

    def test_typed_key_from_byte_string(self, make_unit):
        unit = make_unit('let key = Key::<Aes256Gcm>::from_slice(b"an example very very secret key.");\n')
        (sink,) = find_material_sinks(unit)
        assert sink.kind == "key"
        assert sink.literal
        assert sink.size == 32
        assert sink.bound_to == "key"
        assert sink.call == "Key::<Aes256Gcm>::from_slice"

    def test_generic_array_classified_by_size(self, make_unit):
        unit = make_unit(
            "let n = GenericArray::from_slice(&[0u8; 12]);\n"
            "let k = GenericArray::from_slice(&[0u8; 32]);\n"
        )
        assert [sink.kind for sink in find_material_sinks(unit)] == ["nonce", "key"]

    def test_cipher_constructor_takes_key_variable(self, make_unit):
        unit = make_unit("let cipher = Aes256Gcm::new(&key);\n")
        (sink,) = find_material_sinks(unit)
        assert sink.kind == "key"
        assert not sink.literal
        assert sink.variable == "key"
