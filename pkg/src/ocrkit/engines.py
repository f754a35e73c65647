"""External-engine invocation and deterministic image preparation.

Engines are described by command templates rendered to argument vectors and
run without a shell. Image preparation covers the PDF → TIFF rasterization
contract and the fixed 414x585 fit-and-pad geometry used to build the
vision-model dataset.
"""

from __future__ import annotations

import math
import re
import shlex
import shutil
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from PIL import Image

# Target frame for vision-model inputs.
TARGET_W = 414
TARGET_H = 585

# tesseract <image> <output_base> -l <model>; mode 6 assumes one text block.
TESSERACT_TEMPLATE = "tesseract {input} {output_base} -l {model}"
DEFAULT_PSM_ARGS = ("--psm", "6")

# 300 DPI is the conventional resolution for recognition-quality scans.
DEFAULT_RASTERIZER_TEMPLATE = "pdftoppm -tiff -r 300 {input} {output_base}"

_PAGED_OUTPUT_RE = re.compile(r"-(\d+)$")


@dataclass(frozen=True)
class EngineSpec:
    """How to invoke one OCR engine.

    The template must use each of {input}, {output_base} and {model} exactly
    once; extra_args are appended verbatim after substitution.
    """

    name: str
    command_template: str
    model_name: str
    extra_args: tuple[str, ...] = ()
    expected_output_suffix: str = ".txt"

    def __post_init__(self) -> None:
        for placeholder in ("{input}", "{output_base}", "{model}"):
            count = self.command_template.count(placeholder)
            if count != 1:
                raise ValueError(
                    f"template must contain {placeholder} exactly once, "
                    f"found {count}: {self.command_template!r}"
                )


def tesseract_spec(model_name: str = "spa") -> EngineSpec:
    """The stock tesseract invocation for a given traineddata model."""
    return EngineSpec(
        name="tesseract",
        command_template=TESSERACT_TEMPLATE,
        model_name=model_name,
        extra_args=DEFAULT_PSM_ARGS,
    )


def render_command(spec: EngineSpec, input: Path, output_base: Path) -> list[str]:
    """Substitute the placeholders into an argument vector.

    No shell is involved; each template token becomes one argument.
    """
    argv = []
    for token in shlex.split(spec.command_template):
        argv.append(
            token.format(
                input=str(input),
                output_base=str(output_base),
                model=spec.model_name,
            )
        )
    argv.extend(spec.extra_args)
    return argv


@dataclass(frozen=True)
class FileResult:
    """Outcome of one engine invocation."""

    input: Path
    status: str  # "ok" or "failed"
    output: Path | None
    duration_s: float
    returncode: int
    log_path: Path
    message: str = ""


@dataclass(frozen=True)
class RunReport:
    """Per-file outcomes of a batch run, sorted by input path."""

    engine: str
    results: tuple[FileResult, ...]

    @property
    def ok(self) -> list[FileResult]:
        return [r for r in self.results if r.status == "ok"]

    @property
    def failed(self) -> list[FileResult]:
        return [r for r in self.results if r.status == "failed"]

    @property
    def total_duration_s(self) -> float:
        return math.fsum(r.duration_s for r in self.results)


def _executable_of(template: str) -> str:
    argv = shlex.split(template)
    if not argv:
        raise ValueError("empty command template")
    return argv[0]


def _require_executable(template: str) -> None:
    executable = _executable_of(template)
    if shutil.which(executable) is None:
        raise FileNotFoundError(f"executable not found on PATH: {executable}")


def run_engine(
    spec: EngineSpec,
    inputs: Sequence[Path],
    parallelism: int = 1,
    out_dir: Path | None = None,
) -> RunReport:
    """Run the engine over every input, up to ``parallelism`` at a time.

    Each input yields output_base + expected_output_suffix next to the input
    (or under out_dir) and a .log capturing stdout/stderr. A nonzero exit or
    a missing output file is recorded as a per-file failure; the batch always
    runs to completion. A missing executable aborts before any invocation.
    """
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    _require_executable(spec.command_template)
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)

    def run_one(input_path: Path) -> FileResult:
        input_path = Path(input_path)
        base_dir = out_dir if out_dir is not None else input_path.parent
        output_base = base_dir / input_path.stem
        argv = render_command(spec, input_path, output_base)
        log_path = output_base.with_suffix(".log")
        started = time.perf_counter()
        proc = subprocess.run(argv, capture_output=True, text=True)
        duration = time.perf_counter() - started
        log_path.write_text(
            f"$ {shlex.join(argv)}\n{proc.stdout}{proc.stderr}", encoding="utf-8"
        )
        expected = output_base.with_name(
            output_base.name + spec.expected_output_suffix
        )
        if proc.returncode != 0:
            return FileResult(
                input=input_path,
                status="failed",
                output=None,
                duration_s=duration,
                returncode=proc.returncode,
                log_path=log_path,
                message=f"exit code {proc.returncode}",
            )
        if not expected.is_file():
            return FileResult(
                input=input_path,
                status="failed",
                output=None,
                duration_s=duration,
                returncode=proc.returncode,
                log_path=log_path,
                message=f"expected output missing: {expected.name}",
            )
        return FileResult(
            input=input_path,
            status="ok",
            output=expected,
            duration_s=duration,
            returncode=proc.returncode,
            log_path=log_path,
        )

    if not inputs:
        return RunReport(engine=spec.name, results=())
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        results = list(pool.map(run_one, inputs))
    results.sort(key=lambda r: str(r.input))
    return RunReport(engine=spec.name, results=tuple(results))


@dataclass(frozen=True)
class FitGeometry:
    """Resize-and-pad plan fitting a source image into the target frame."""

    scale: float
    scaled_w: int
    scaled_h: int
    pad_right: int
    pad_bottom: int
    target_w: int = TARGET_W
    target_h: int = TARGET_H


def compute_fit_geometry(
    src_w: int, src_h: int, target_w: int = TARGET_W, target_h: int = TARGET_H
) -> FitGeometry:
    """Aspect-preserving fit of (src_w, src_h) into the target frame.

    scale = min(target_w/src_w, target_h/src_h), capped at 1 so sources
    smaller than the frame are padded, never upscaled. Scaled dims use floor
    with a 1-pixel minimum; padding fills the remainder exactly.
    """
    if src_w <= 0 or src_h <= 0:
        raise ValueError(f"source dimensions must be positive, got {src_w}x{src_h}")
    if target_w <= 0 or target_h <= 0:
        raise ValueError("target dimensions must be positive")
    scale = min(target_w / src_w, target_h / src_h, 1.0)
    scaled_w = max(1, math.floor(src_w * scale))
    scaled_h = max(1, math.floor(src_h * scale))
    return FitGeometry(
        scale=scale,
        scaled_w=scaled_w,
        scaled_h=scaled_h,
        pad_right=target_w - scaled_w,
        pad_bottom=target_h - scaled_h,
        target_w=target_w,
        target_h=target_h,
    )


def fit_image(
    src: Path,
    out: Path,
    target_w: int = TARGET_W,
    target_h: int = TARGET_H,
    background: tuple[int, int, int] = (255, 255, 255),
) -> FitGeometry:
    """Resize ``src`` per compute_fit_geometry and pad to the exact frame.

    The image is anchored top-left; padding extends right and bottom with
    the background color (white by default).
    """
    out = Path(out)
    with Image.open(src) as image:
        geometry = compute_fit_geometry(*image.size, target_w, target_h)
        resized = image.convert("RGB").resize(
            (geometry.scaled_w, geometry.scaled_h), Image.Resampling.LANCZOS
        )
    canvas = Image.new("RGB", (target_w, target_h), background)
    canvas.paste(resized, (0, 0))
    out.parent.mkdir(parents=True, exist_ok=True)
    canvas.save(out)
    return geometry


@dataclass(frozen=True)
class RasterizeResult:
    """Outcome of rasterizing one PDF."""

    pdf: Path
    status: str  # "ok" or "failed"
    pages: tuple[Path, ...]
    message: str = ""


def rasterize_contract(
    pdf: Path,
    out_dir: Path,
    template: str = DEFAULT_RASTERIZER_TEMPLATE,
) -> RasterizeResult:
    """Rasterize one PDF to TIFF pages in ``out_dir``.

    The template uses {input} and {output_base}. Single-page documents are
    normalized to <stem>.tiff, multi-page ones to <stem>-<page>.tiff. A
    failing rasterizer or a zero-page result is recorded as a failure entry;
    a missing rasterizer executable raises before any invocation.
    """
    for placeholder in ("{input}", "{output_base}"):
        if template.count(placeholder) != 1:
            raise ValueError(
                f"rasterizer template must contain {placeholder} exactly once"
            )
    _require_executable(template)
    pdf = Path(pdf)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not pdf.is_file():
        return RasterizeResult(
            pdf=pdf, status="failed", pages=(), message="missing pdf"
        )
    stem = pdf.stem
    output_base = out_dir / stem
    argv = [
        token.format(input=str(pdf), output_base=str(output_base))
        for token in shlex.split(template)
    ]
    proc = subprocess.run(argv, capture_output=True, text=True)
    if proc.returncode != 0:
        detail = proc.stderr.strip() or f"exit code {proc.returncode}"
        return RasterizeResult(pdf=pdf, status="failed", pages=(), message=detail)
    produced = _collect_pages(out_dir, stem)
    if not produced:
        return RasterizeResult(pdf=pdf, status="failed", pages=(), message="no pages")
    pages = _normalize_page_names(produced, out_dir, stem)
    return RasterizeResult(pdf=pdf, status="ok", pages=tuple(pages))


def _collect_pages(out_dir: Path, stem: str) -> list[Path]:
    """TIFFs belonging to ``stem``: the exact name or <stem>-<number>."""
    found = []
    for entry in out_dir.iterdir():
        if not entry.is_file() or entry.suffix.lower() not in (".tif", ".tiff"):
            continue
        base = entry.name[: -len(entry.suffix)]
        if base == stem or (
            base.startswith(stem) and _PAGED_OUTPUT_RE.fullmatch(base[len(stem) :])
        ):
            found.append(entry)

    def page_key(path: Path) -> int:
        base = path.name[: -len(path.suffix)]
        match = _PAGED_OUTPUT_RE.fullmatch(base[len(stem) :])
        return int(match.group(1)) if match else 0

    found.sort(key=page_key)
    return found


def _normalize_page_names(
    produced: list[Path], out_dir: Path, stem: str
) -> list[Path]:
    if len(produced) == 1:
        target = out_dir / f"{stem}.tiff"
        if produced[0] != target:
            produced[0].rename(target)
        return [target]
    normalized = []
    for index, page in enumerate(produced, start=1):
        target = out_dir / f"{stem}-{index}.tiff"
        if page != target:
            page.rename(target)
        normalized.append(target)
    return normalized
