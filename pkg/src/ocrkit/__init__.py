"""OCR evaluation and pipeline toolkit.

Normalization policies, an eight-metric battery (edit distance, WER, NED,
BLEU and four ROUGE variants), corpus preparation for training and
fine-tuning, external-engine orchestration, leaderboard and worst-file
analysis, and energy/CO2 accounting.
"""

from .analysis import LeaderboardRow, WorstFileReport, rank, worst_files
from .corpus import (
    DocumentPair,
    FineTuneConfig,
    WorkspaceLayout,
    discover_pairs,
    split_dataset,
)
from .engines import EngineSpec, FitGeometry, compute_fit_geometry, run_engine
from .footprint import FootprintEstimate, Phase, estimate, per_example
from .kernels import BACKEND as KERNEL_BACKEND
from .metrics import (
    METRIC_NAMES,
    METRIC_SPECS,
    MetricVector,
    aggregate,
    bleu,
    levenshtein,
    ned,
    rouge1,
    rouge2,
    rougeL,
    rougeLsum,
    score_pair,
    wer,
)
from .textnorm import (
    LineBreakMode,
    NormalizationPolicy,
    POLICIES,
    normalize,
    split_sentences,
    tokenize_words,
)

__version__ = "0.1.0"

__all__ = [
    "DocumentPair",
    "EngineSpec",
    "FineTuneConfig",
    "FitGeometry",
    "FootprintEstimate",
    "KERNEL_BACKEND",
    "LeaderboardRow",
    "LineBreakMode",
    "METRIC_NAMES",
    "METRIC_SPECS",
    "MetricVector",
    "NormalizationPolicy",
    "POLICIES",
    "Phase",
    "WorkspaceLayout",
    "WorstFileReport",
    "aggregate",
    "bleu",
    "compute_fit_geometry",
    "discover_pairs",
    "estimate",
    "levenshtein",
    "ned",
    "normalize",
    "per_example",
    "rank",
    "rouge1",
    "rouge2",
    "rougeL",
    "rougeLsum",
    "run_engine",
    "score_pair",
    "split_dataset",
    "split_sentences",
    "tokenize_words",
    "wer",
    "worst_files",
    "__version__",
]
