"""Text normalization applied to references and hypotheses before scoring.

Every run is compared under an explicit policy so that line-break handling,
hyphenation repair and whitespace are never an accident of the input files.
Normalization is idempotent: applying the same policy twice is a no-op.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum

# Letter "-" newline letter, where letter excludes digits and underscore.
# Matches hyphenated line wraps such as "Mathe-\nmáticas" but not "3-\n4"
# or "x -\ny" (space before the hyphen).
_DEHYPHEN_RE = re.compile(r"(?<=[^\W\d_])-\n(?=[^\W\d_])")

# Runs of spaces and tabs only; newlines are handled by the line-break mode.
_SPACE_RUN_RE = re.compile(r"[ \t]+")


class LineBreakMode(Enum):
    """What to do with newline characters before scoring."""

    PRESERVE = "preserve"
    JOIN = "join"


@dataclass(frozen=True)
class NormalizationPolicy:
    """A named combination of the normalization switches.

    ``unicode_form`` is fixed to NFC; it is kept as a field so serialized
    policies state it explicitly.
    """

    line_break_mode: LineBreakMode = LineBreakMode.PRESERVE
    dehyphenate: bool = False
    collapse_whitespace: bool = True
    unicode_form: str = field(default="NFC")

    def __post_init__(self) -> None:
        if self.unicode_form != "NFC":
            raise ValueError("unicode_form is fixed to NFC")


# Named presets selectable from the command line. "preserve" keeps the
# line structure of the transcription; "join" flattens each document to a
# single line. The dehyphenating variants additionally merge words split
# across line wraps.
POLICIES: dict[str, NormalizationPolicy] = {
    "preserve": NormalizationPolicy(LineBreakMode.PRESERVE),
    "join": NormalizationPolicy(LineBreakMode.JOIN),
    "preserve-dehyph": NormalizationPolicy(LineBreakMode.PRESERVE, dehyphenate=True),
    "join-dehyph": NormalizationPolicy(LineBreakMode.JOIN, dehyphenate=True),
}


def get_policy(name: str) -> NormalizationPolicy:
    """Look up a preset policy by name."""
    try:
        return POLICIES[name]
    except KeyError:
        known = ", ".join(sorted(POLICIES))
        raise ValueError(f"unknown policy {name!r} (known: {known})") from None


def normalize(text: str, policy: NormalizationPolicy) -> str:
    """Apply ``policy`` to ``text``.

    Order: NFC, carriage-return conversion, optional dehyphenation, the
    line-break mode, optional whitespace collapsing. In JOIN mode the result
    is additionally stripped; PRESERVE mode never adds or removes newlines
    except through dehyphenation (one newline per merged word).
    """
    if not text:
        return ""
    text = unicodedata.normalize("NFC", text)
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    if policy.dehyphenate:
        text = _DEHYPHEN_RE.sub("", text)
    if policy.line_break_mode is LineBreakMode.JOIN:
        text = text.replace("\n", " ")
    if policy.collapse_whitespace:
        text = _SPACE_RUN_RE.sub(" ", text)
    if policy.line_break_mode is LineBreakMode.JOIN:
        text = text.strip()
    return text


def tokenize_words(text: str) -> list[str]:
    """Whitespace tokenization; no case folding, punctuation kept."""
    return text.split()


def split_sentences(text: str) -> list[str]:
    """Sentence units for the summary-level LCS metric: non-blank lines."""
    return [line for line in text.split("\n") if line.strip()]
