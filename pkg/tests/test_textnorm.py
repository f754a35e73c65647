"""Normalization policies: examples, idempotence and line-break invariants."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ocrkit.textnorm import (
    LineBreakMode,
    NormalizationPolicy,
    POLICIES,
    get_policy,
    normalize,
    split_sentences,
    tokenize_words,
)

JOIN = NormalizationPolicy(LineBreakMode.JOIN, collapse_whitespace=False)
JOIN_COLLAPSE = NormalizationPolicy(LineBreakMode.JOIN, collapse_whitespace=True)
PRESERVE = NormalizationPolicy(LineBreakMode.PRESERVE, collapse_whitespace=False)
PRESERVE_DEHYPH = NormalizationPolicy(
    LineBreakMode.PRESERVE, dehyphenate=True, collapse_whitespace=False
)

ALL_POLICIES = [
    NormalizationPolicy(mode, dehyphenate=dehyph, collapse_whitespace=collapse)
    for mode in LineBreakMode
    for dehyph in (False, True)
    for collapse in (False, True)
]

# Plain text plus the characters the policies act on.
text_strategy = st.text(
    alphabet=st.sampled_from("ab -\n\tñé."), min_size=0, max_size=40
)


def test_join_single_newline():
    assert normalize("a\nb", JOIN) == "a b"


def test_dehyphenation_merges_split_word():
    assert normalize("Mathe-\nmáticas", PRESERVE_DEHYPH) == "Mathemáticas"


def test_empty_input():
    for policy in ALL_POLICIES:
        assert normalize("", policy) == ""


def test_join_collapses_whitespace():
    assert normalize("x  y\t z", JOIN_COLLAPSE) == "x y z"


def test_preserve_keeps_newlines():
    assert normalize("a\nb\nc", PRESERVE) == "a\nb\nc"


def test_join_output_has_no_newlines():
    assert "\n" not in normalize("a\nb\r\nc\rd", JOIN)


def test_dehyphenation_needs_letters_on_both_sides():
    assert normalize("3-\n4", PRESERVE_DEHYPH) == "3-\n4"
    assert normalize("x -\ny", PRESERVE_DEHYPH) == "x -\ny"
    assert normalize("x-\n y", PRESERVE_DEHYPH) == "x-\n y"


def test_dehyphenation_mid_line_hyphen_kept():
    assert normalize("tele-fono", PRESERVE_DEHYPH) == "tele-fono"


def test_dehyphenation_chain():
    assert normalize("a-\nb-\nc", PRESERVE_DEHYPH) == "abc"


def test_carriage_returns_become_newlines():
    assert normalize("a\r\nb\rc", PRESERVE) == "a\nb\nc"


def test_nfc_applied():
    decomposed = "Matemáticas"
    assert normalize(decomposed, PRESERVE) == "Matemáticas"


def test_join_strips_edges():
    assert normalize("\nhola\n", JOIN_COLLAPSE) == "hola"


def test_unicode_form_fixed():
    with pytest.raises(ValueError):
        NormalizationPolicy(unicode_form="NFD")


def test_policy_presets():
    assert POLICIES["preserve"].line_break_mode is LineBreakMode.PRESERVE
    assert POLICIES["join"].line_break_mode is LineBreakMode.JOIN
    assert POLICIES["preserve-dehyph"].dehyphenate
    assert POLICIES["join-dehyph"].dehyphenate
    with pytest.raises(ValueError):
        get_policy("nope")


@settings(max_examples=300, deadline=None)
@given(text_strategy, st.sampled_from(ALL_POLICIES))
def test_idempotence(text, policy):
    once = normalize(text, policy)
    assert normalize(once, policy) == once


@settings(max_examples=300, deadline=None)
@given(text_strategy, st.booleans())
def test_preserve_newline_count(text, collapse):
    policy = NormalizationPolicy(
        LineBreakMode.PRESERVE, dehyphenate=False, collapse_whitespace=collapse
    )
    clean = text.replace("\r", "")
    assert normalize(clean, policy).count("\n") == clean.count("\n")


@settings(max_examples=300, deadline=None)
@given(text_strategy)
def test_join_never_leaves_newlines(text):
    for policy in ALL_POLICIES:
        if policy.line_break_mode is LineBreakMode.JOIN:
            assert "\n" not in normalize(text, policy)


def test_tokenize_examples():
    assert tokenize_words("el gato negro") == ["el", "gato", "negro"]
    assert tokenize_words("") == []
    assert tokenize_words("a\nb c") == ["a", "b", "c"]


@settings(max_examples=200, deadline=None)
@given(text_strategy)
def test_tokenize_never_yields_empty_tokens(text):
    assert all(token for token in tokenize_words(text))


def test_split_sentences_examples():
    assert split_sentences("a b\nc d") == ["a b", "c d"]
    assert split_sentences("a b") == ["a b"]
    assert split_sentences("\n\n") == []
