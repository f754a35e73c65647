"""Corpus handling: pairing references with hypotheses, ground-truth naming,
training manifests, chat-format export and the train/test split.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

from .fileio import atomic_write_text, read_ingested_text

log = logging.getLogger(__name__)

# Prompts used for every chat record. The instruction block is indented and
# blank-line separated exactly as the fine-tuned model saw it.
SYSTEM_PROMPT = """You are an OCR expert specialised in Spanish documents.
You are analysing an old book scan with potentially low quality.

INSTRUCTIONS:

    Extract ALL text exactly as it appears.

    Do not correct, interpret or modify the text in any way.

    Return ONLY the raw text, without any additional comments or formatting.

    Do not invent content not present in the image.

The output must be EXACTLY the recognised text, without adding anything else."""

USER_PROMPT = "Please perform OCR on this Spanish document."

_IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".tif", ".tiff")


@dataclass(frozen=True)
class DocumentPair:
    """One document id with its reference text and a run's hypothesis."""

    doc_id: str
    reference: str
    hypothesis: str
    ref_path: Path | None = None
    hyp_path: Path | None = None


@dataclass(frozen=True)
class PairingResult:
    """Pairs plus the ids that could not be matched on either side."""

    pairs: list[DocumentPair]
    unmatched_ref: list[str]
    unmatched_hyp: list[str]


@dataclass(frozen=True)
class ChatExportReport:
    """Outcome of a chat-record export."""

    written: int
    skipped: list[str]


def pair_id(path: Path) -> str:
    """Document id: the filename before the first extension dot."""
    return Path(path).name.split(".", 1)[0]


def _scan_text_files(directory: Path) -> dict[str, Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"not a directory: {directory}")
    seen: dict[str, Path] = {}
    for entry in sorted(directory.iterdir()):
        if not entry.is_file() or not entry.name.endswith(".txt"):
            continue
        doc_id = pair_id(entry)
        if doc_id in seen:
            raise ValueError(
                f"duplicate document id {doc_id!r} in {directory}: "
                f"{seen[doc_id].name} and {entry.name}"
            )
        seen[doc_id] = entry
    return seen


def discover_pairs(ref_dir: Path, hyp_dir: Path) -> PairingResult:
    """Pair reference and hypothesis files by document id.

    Unpaired ids are reported in the result, never silently dropped. Pairs
    come back sorted by id.
    """
    refs = _scan_text_files(ref_dir)
    hyps = _scan_text_files(hyp_dir)
    shared = sorted(refs.keys() & hyps.keys())
    pairs = [
        DocumentPair(
            doc_id=doc_id,
            reference=read_ingested_text(refs[doc_id]),
            hypothesis=read_ingested_text(hyps[doc_id]),
            ref_path=refs[doc_id],
            hyp_path=hyps[doc_id],
        )
        for doc_id in shared
    ]
    return PairingResult(
        pairs=pairs,
        unmatched_ref=sorted(refs.keys() - hyps.keys()),
        unmatched_hyp=sorted(hyps.keys() - refs.keys()),
    )


def load_references(ref_dir: Path) -> list[DocumentPair]:
    """Load reference texts only (hypothesis left empty), sorted by id."""
    refs = _scan_text_files(ref_dir)
    return [
        DocumentPair(
            doc_id=doc_id,
            reference=read_ingested_text(path),
            hypothesis="",
            ref_path=path,
        )
        for doc_id, path in sorted(refs.items())
    ]


def rename_to_gt(ocr_dir: Path) -> list[tuple[Path, Path]]:
    """Plan the .txt → .gt.txt renames for a transcription directory.

    Already-conforming files are left out of the plan. The plan is returned
    without touching the filesystem; apply it with apply_rename.
    """
    ocr_dir = Path(ocr_dir)
    if not ocr_dir.is_dir():
        raise FileNotFoundError(f"not a directory: {ocr_dir}")
    plan: list[tuple[Path, Path]] = []
    existing = {entry.name for entry in ocr_dir.iterdir() if entry.is_file()}
    for entry in sorted(ocr_dir.iterdir()):
        if not entry.is_file() or not entry.name.endswith(".txt"):
            continue
        if entry.name.endswith(".gt.txt"):
            continue
        target = entry.with_name(entry.name[: -len(".txt")] + ".gt.txt")
        if target.name in existing:
            raise ValueError(
                f"rename collision: {entry.name} → {target.name} already exists"
            )
        plan.append((entry, target))
    targets = [new.name for _, new in plan]
    if len(targets) != len(set(targets)):
        raise ValueError("rename collision: two sources map to the same target")
    return plan


def apply_rename(plan: Sequence[tuple[Path, Path]]) -> int:
    """Apply a rename plan; returns the number of files renamed."""
    for old, new in plan:
        old.rename(new)
    return len(plan)


def write_manifest(lstmf_dir: Path, out: Path) -> int:
    """Write the newline-delimited manifest of absolute .lstmf paths.

    Entries are sorted; an empty directory produces an empty manifest and a
    warning. Returns the entry count.
    """
    lstmf_dir = Path(lstmf_dir)
    if not lstmf_dir.is_dir():
        raise FileNotFoundError(f"not a directory: {lstmf_dir}")
    entries = sorted(
        str(entry.resolve())
        for entry in lstmf_dir.iterdir()
        if entry.is_file() and entry.suffix == ".lstmf"
    )
    if not entries:
        log.warning("no .lstmf files under %s; manifest will be empty", lstmf_dir)
    data = "".join(line + "\n" for line in entries)
    atomic_write_text(Path(out), data)
    return len(entries)


@dataclass(frozen=True)
class ChatRecord:
    """One fine-tuning conversation: system and user prompts, the page image
    and the ground-truth transcription as the assistant answer."""

    system_text: str
    user_text: str
    image_ref: Path
    assistant_text: str

    def to_chat(self) -> list[dict]:
        return [
            {
                "role": "system",
                "content": [{"type": "text", "text": self.system_text}],
            },
            {
                "role": "user",
                "content": [
                    {"type": "image", "image": str(self.image_ref)},
                    {"type": "text", "text": self.user_text},
                ],
            },
            {
                "role": "assistant",
                "content": [{"type": "text", "text": self.assistant_text}],
            },
        ]


def find_image(image_dir: Path, doc_id: str) -> Path | None:
    """Locate the page image for a document id, trying common suffixes."""
    image_dir = Path(image_dir)
    for suffix in _IMAGE_SUFFIXES:
        candidate = image_dir / f"{doc_id}{suffix}"
        if candidate.is_file():
            return candidate
    return None


def export_chat_records(
    pairs: Iterable[DocumentPair], image_dir: Path, out: Path
) -> ChatExportReport:
    """Write one chat record per pair as newline-delimited JSON.

    Records mirror the in-memory chat structure: a list of role entries with
    system prompt, image + user prompt, and the reference transcription as
    the assistant text. Pairs without an image are skipped and reported.
    """
    image_dir = Path(image_dir)
    if not image_dir.is_dir():
        raise FileNotFoundError(f"not a directory: {image_dir}")
    lines: list[str] = []
    skipped: list[str] = []
    for pair in pairs:
        image = find_image(image_dir, pair.doc_id)
        if image is None:
            skipped.append(pair.doc_id)
            continue
        record = ChatRecord(
            system_text=SYSTEM_PROMPT,
            user_text=USER_PROMPT,
            image_ref=image,
            assistant_text=pair.reference,
        )
        lines.append(json.dumps(record.to_chat(), ensure_ascii=False))
    atomic_write_text(Path(out), "".join(line + "\n" for line in lines))
    if skipped:
        log.warning("skipped %d pairs without images: %s", len(skipped), skipped)
    return ChatExportReport(written=len(lines), skipped=skipped)


def read_chat_records(path: Path) -> list[list[dict]]:
    """Read back a chat export; inverse of export_chat_records."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                records.append(json.loads(line))
    return records


def split_dataset(
    pairs: Sequence[DocumentPair], train_fraction: float, seed: int
) -> tuple[list[DocumentPair], list[DocumentPair]]:
    """Deterministic seeded shuffle and split into train/test.

    The train size is round(N * fraction), guarded so that neither side is
    empty whenever N >= 2.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    shuffled = list(pairs)
    random.Random(seed).shuffle(shuffled)
    n = len(shuffled)
    n_train = round(n * train_fraction)
    if n >= 2:
        n_train = min(max(n_train, 1), n - 1)
    return shuffled[:n_train], shuffled[n_train:]


@dataclass(frozen=True)
class FineTuneConfig:
    """Trainer settings for the vision-model fine-tune, serialized as a flat
    key=value file."""

    epochs: int = 1
    per_device_batch: int = 1
    grad_accum_steps: int = 8
    warmup_steps: int = 10
    learning_rate: float = 1e-4
    weight_decay: float = 0.01
    logging_steps: int = 10
    save_strategy: str = "steps"
    save_steps: int = 20
    save_total_limit: int = 1
    optimizer: str = "adamw_torch_fused"
    bf16: bool = True
    remove_unused_columns: bool = False
    gradient_checkpointing: bool = True
    dataset_text_field: str = ""
    skip_prepare_dataset: bool = True

    def __post_init__(self) -> None:
        for name in (
            "epochs",
            "per_device_batch",
            "grad_accum_steps",
            "warmup_steps",
            "learning_rate",
            "logging_steps",
            "save_steps",
            "save_total_limit",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be >= 0")

    def to_config_text(self) -> str:
        parts = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool):
                text = "true" if value else "false"
            else:
                text = str(value)
            parts.append(f"{f.name}={text}\n")
        return "".join(parts)


def write_finetune_config(config: FineTuneConfig, out: Path) -> None:
    """Serialize a FineTuneConfig to its key=value file."""
    atomic_write_text(Path(out), config.to_config_text())


def read_finetune_config(path: Path) -> FineTuneConfig:
    """Parse a key=value file back into a FineTuneConfig."""
    values: dict[str, object] = {}
    types = {f.name: f.type for f in fields(FineTuneConfig)}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, text = line.partition("=")
        key = key.strip()
        text = text.strip()
        if key not in types:
            raise ValueError(f"unknown config key {key!r}")
        kind = types[key]
        if kind in ("bool", bool):
            values[key] = text == "true"
        elif kind in ("int", int):
            values[key] = int(text)
        elif kind in ("float", float):
            values[key] = float(text)
        else:
            values[key] = text
    return FineTuneConfig(**values)  # type: ignore[arg-type]


@dataclass(frozen=True)
class WorkspaceLayout:
    """Directory layout of a training workspace.

    root/
      train/{pdf,ocr,tiff,lstmf}/
      finetuning/
    """

    root: Path

    @property
    def train_dir(self) -> Path:
        return self.root / "train"

    @property
    def pdf_dir(self) -> Path:
        return self.train_dir / "pdf"

    @property
    def ocr_dir(self) -> Path:
        return self.train_dir / "ocr"

    @property
    def tiff_dir(self) -> Path:
        return self.train_dir / "tiff"

    @property
    def lstmf_dir(self) -> Path:
        return self.train_dir / "lstmf"

    @property
    def finetune_dir(self) -> Path:
        return self.root / "finetuning"

    @property
    def manifest_path(self) -> Path:
        return self.lstmf_dir / "list.txt"

    def create(self) -> list[Path]:
        """Create any missing directories; returns the ones created."""
        created = []
        for directory in (
            self.train_dir,
            self.pdf_dir,
            self.ocr_dir,
            self.tiff_dir,
            self.lstmf_dir,
            self.finetune_dir,
        ):
            if not directory.is_dir():
                directory.mkdir(parents=True)
                created.append(directory)
        return created
