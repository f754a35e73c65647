"""The eight-metric evaluation battery.

Character edit distance, word error rate, normalized edit distance, BLEU and
the four ROUGE variants, plus the per-pair scoring entry point and the
per-run aggregate. All text is expected to be normalized already; only
score_pair applies a policy itself.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, fields
from enum import Enum
from typing import Iterable, Sequence

from . import kernels
from .textnorm import NormalizationPolicy, normalize, split_sentences, tokenize_words


class Direction(Enum):
    """Whether smaller or larger values indicate a better run."""

    LOWER_IS_BETTER = "lower"
    HIGHER_IS_BETTER = "higher"


@dataclass(frozen=True)
class MetricSpec:
    name: str
    column: str
    direction: Direction


# Canonical metric order used by every table, CSV and report.
METRIC_SPECS: tuple[MetricSpec, ...] = (
    MetricSpec("levenshtein", "LEVENSHTEIN", Direction.LOWER_IS_BETTER),
    MetricSpec("wer", "WER", Direction.LOWER_IS_BETTER),
    MetricSpec("ned", "NED", Direction.LOWER_IS_BETTER),
    MetricSpec("bleu", "BLEU", Direction.HIGHER_IS_BETTER),
    MetricSpec("rouge1", "ROUGE1", Direction.HIGHER_IS_BETTER),
    MetricSpec("rouge2", "ROUGE2", Direction.HIGHER_IS_BETTER),
    MetricSpec("rougeL", "ROUGEL", Direction.HIGHER_IS_BETTER),
    MetricSpec("rougeLsum", "ROUGELSUM", Direction.HIGHER_IS_BETTER),
)

METRIC_NAMES: tuple[str, ...] = tuple(spec.name for spec in METRIC_SPECS)
METRIC_BY_NAME: dict[str, MetricSpec] = {spec.name: spec for spec in METRIC_SPECS}
_BOUNDED = ("ned", "bleu", "rouge1", "rouge2", "rougeL", "rougeLsum")


@dataclass(frozen=True)
class MetricVector:
    """One value per metric, in canonical order."""

    levenshtein: float
    wer: float
    ned: float
    bleu: float
    rouge1: float
    rouge2: float
    rougeL: float
    rougeLsum: float

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(f"{f.name} must be finite and >= 0, got {value!r}")
        for name in _BOUNDED:
            value = getattr(self, name)
            if value > 1.0:
                raise ValueError(f"{name} must be <= 1, got {value!r}")

    @classmethod
    def perfect(cls) -> "MetricVector":
        """The vector of a hypothesis identical to its reference."""
        return cls(0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0)

    def get(self, name: str) -> float:
        return getattr(self, name)

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def levenshtein(ref: str, hyp: str) -> int:
    """Character-level edit distance (insert, delete, substitute)."""
    return kernels.char_edit_distance(ref, hyp)


def wer(ref_tokens: Sequence[str], hyp_tokens: Sequence[str]) -> float:
    """Word error rate: token edit distance over max(1, len(ref))."""
    distance = kernels.token_edit_distance(ref_tokens, hyp_tokens)
    return distance / max(1, len(ref_tokens))


def ned(ref: str, hyp: str) -> float:
    """Edit distance normalized by max(1, len(ref), len(hyp)); in [0, 1]."""
    distance = kernels.char_edit_distance(ref, hyp)
    return distance / max(1, len(ref), len(hyp))


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(ref_tokens: Sequence[str], hyp_tokens: Sequence[str]) -> float:
    """Sentence BLEU with n-grams up to 4, clipped counts, add-one smoothing
    for empty matches and the standard brevity penalty.

    An empty side scores 0. Orders longer than the hypothesis contribute a
    smoothed 1, so identical short inputs still score 1.
    """
    if not hyp_tokens or not ref_tokens:
        return 0.0
    log_sum = 0.0
    for n in range(1, 5):
        hyp_counts = _ngram_counts(hyp_tokens, n)
        ref_counts = _ngram_counts(ref_tokens, n)
        total = max(len(hyp_tokens) - n + 1, 0)
        matched = sum(min(count, ref_counts[gram]) for gram, count in hyp_counts.items())
        if matched > 0:
            precision = matched / total
        else:
            precision = (matched + 1) / (total + 1)
        log_sum += math.log(precision)
    if len(hyp_tokens) >= len(ref_tokens):
        brevity = 1.0
    else:
        brevity = math.exp(1.0 - len(ref_tokens) / len(hyp_tokens))
    return brevity * math.exp(log_sum / 4.0)


def _f1(overlap: int, ref_total: int, hyp_total: int) -> float:
    if ref_total == 0 and hyp_total == 0:
        return 1.0
    if ref_total == 0 or hyp_total == 0 or overlap == 0:
        return 0.0
    precision = overlap / hyp_total
    recall = overlap / ref_total
    return 2.0 * precision * recall / (precision + recall)


def _rouge_n(ref_tokens: Sequence[str], hyp_tokens: Sequence[str], n: int) -> float:
    ref_counts = _ngram_counts(ref_tokens, n)
    hyp_counts = _ngram_counts(hyp_tokens, n)
    overlap = sum(min(count, ref_counts[gram]) for gram, count in hyp_counts.items())
    return _f1(overlap, sum(ref_counts.values()), sum(hyp_counts.values()))


def rouge1(ref_tokens: Sequence[str], hyp_tokens: Sequence[str]) -> float:
    """Unigram overlap F1 with clipped counts."""
    return _rouge_n(ref_tokens, hyp_tokens, 1)


def rouge2(ref_tokens: Sequence[str], hyp_tokens: Sequence[str]) -> float:
    """Bigram overlap F1 with clipped counts."""
    return _rouge_n(ref_tokens, hyp_tokens, 2)


def rougeL(ref_tokens: Sequence[str], hyp_tokens: Sequence[str]) -> float:
    """F1 over the longest common token subsequence."""
    if not ref_tokens and not hyp_tokens:
        return 1.0
    if not ref_tokens or not hyp_tokens:
        return 0.0
    length = kernels.token_lcs_length(ref_tokens, hyp_tokens)
    return _f1(length, len(ref_tokens), len(hyp_tokens))


def rougeLsum(ref_sentences: Sequence[str], hyp_sentences: Sequence[str]) -> float:
    """Summary-level LCS F1.

    For each reference sentence, the union of LCS hit positions against every
    hypothesis sentence is taken; hits are then counted with clipping against
    remaining token budgets on both sides, so repeated tokens are never
    credited more often than they occur. Equals rougeL when each side is a
    single sentence.
    """
    ref_tokenized = [tokenize_words(s) for s in ref_sentences]
    hyp_tokenized = [tokenize_words(s) for s in hyp_sentences]
    ref_total = sum(len(toks) for toks in ref_tokenized)
    hyp_total = sum(len(toks) for toks in hyp_tokenized)
    if ref_total == 0 and hyp_total == 0:
        return 1.0
    if ref_total == 0 or hyp_total == 0:
        return 0.0
    ref_budget: Counter = Counter()
    hyp_budget: Counter = Counter()
    for toks in ref_tokenized:
        ref_budget.update(toks)
    for toks in hyp_tokenized:
        hyp_budget.update(toks)
    hits = 0
    for ref_toks in ref_tokenized:
        if not ref_toks:
            continue
        marked: set[int] = set()
        for hyp_toks in hyp_tokenized:
            if hyp_toks:
                marked.update(kernels.token_lcs_positions(ref_toks, hyp_toks))
        for position in sorted(marked):
            token = ref_toks[position]
            if ref_budget[token] > 0 and hyp_budget[token] > 0:
                hits += 1
                ref_budget[token] -= 1
                hyp_budget[token] -= 1
    return _f1(hits, ref_total, hyp_total)


def score_pair(
    reference: str, hypothesis: str, policy: NormalizationPolicy
) -> MetricVector:
    """Normalize both sides under ``policy`` and compute all eight metrics.

    Identical normalized content scores perfect by definition. This also
    covers the blank-page rule (both sides empty) and whitespace-only pages,
    which have no tokens for the n-gram metrics to agree on.
    """
    ref = normalize(reference, policy)
    hyp = normalize(hypothesis, policy)
    if ref == hyp:
        return MetricVector.perfect()
    ref_tokens = tokenize_words(ref)
    hyp_tokens = tokenize_words(hyp)
    return MetricVector(
        levenshtein=float(levenshtein(ref, hyp)),
        wer=wer(ref_tokens, hyp_tokens),
        ned=ned(ref, hyp),
        bleu=bleu(ref_tokens, hyp_tokens),
        rouge1=rouge1(ref_tokens, hyp_tokens),
        rouge2=rouge2(ref_tokens, hyp_tokens),
        rougeL=rougeL(ref_tokens, hyp_tokens),
        rougeLsum=rougeLsum(split_sentences(ref), split_sentences(hyp)),
    )


def aggregate(vectors: Iterable[MetricVector]) -> MetricVector:
    """Arithmetic mean per metric, computed from exact sums so the result
    does not depend on input order."""
    items = list(vectors)
    if not items:
        raise ValueError("no documents scored")
    count = len(items)
    means = {
        name: math.fsum(v.get(name) for v in items) / count for name in METRIC_NAMES
    }
    return MetricVector(**means)
