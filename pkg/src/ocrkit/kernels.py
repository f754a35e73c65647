"""Kernel backend selection and sequence encoding.

The compiled extension (ocrkit._editcore) is preferred when built; otherwise
the pure-Python twin is used. Set OCRKIT_KERNEL=pure or OCRKIT_KERNEL=compiled
to force a backend; "compiled" raises if the extension is missing.
"""

from __future__ import annotations

import os
from array import array
from typing import Sequence

from . import _editpure

_choice = os.environ.get("OCRKIT_KERNEL", "auto").strip().lower()
if _choice not in ("auto", "compiled", "pure"):
    raise ValueError(
        f"OCRKIT_KERNEL must be auto, compiled or pure, not {_choice!r}"
    )

if _choice == "pure":
    _impl = _editpure
    BACKEND = "pure"
else:
    try:
        from . import _editcore as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise ImportError(
                "OCRKIT_KERNEL=compiled but the ocrkit._editcore extension "
                "is not built; reinstall the package or use OCRKIT_KERNEL=pure"
            ) from None
        _impl = _editpure
        BACKEND = "pure"


def encode_chars(text: str) -> array:
    """Encode a string as an int32 array of code points."""
    return array("i", map(ord, text))


def encode_token_pair(
    a_tokens: Sequence[str], b_tokens: Sequence[str]
) -> tuple[array, array]:
    """Encode two token sequences over a shared vocabulary."""
    vocab: dict[str, int] = {}
    out: list[array] = []
    for tokens in (a_tokens, b_tokens):
        ids = array("i")
        for tok in tokens:
            code = vocab.get(tok)
            if code is None:
                code = len(vocab)
                vocab[tok] = code
            ids.append(code)
        out.append(ids)
    return out[0], out[1]


def char_edit_distance(a: str, b: str) -> int:
    """Character-level edit distance between two strings."""
    return _impl.edit_distance(encode_chars(a), encode_chars(b))


def token_edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Token-level edit distance between two token sequences."""
    ea, eb = encode_token_pair(a, b)
    return _impl.edit_distance(ea, eb)


def token_lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest common token subsequence."""
    ea, eb = encode_token_pair(a, b)
    return _impl.lcs_length(ea, eb)


def token_lcs_positions(a: Sequence[str], b: Sequence[str]) -> list[int]:
    """Positions in ``a`` covered by one longest common subsequence."""
    ea, eb = encode_token_pair(a, b)
    return _impl.lcs_hit_positions(ea, eb)
