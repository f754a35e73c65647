"""Command-line entry point wiring the toolkit together.

Subcommands: prepare, run, score, leaderboard, worst, scatter, chat-export,
footprint, geometry. Exit codes: 0 success, 1 validation error, 2
environment error (missing files, directories or executables).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from PIL import Image

from . import analysis, corpus, engines, footprint, metrics
from .config import ToolkitConfig, load_config
from .fileio import atomic_write_text
from .textnorm import POLICIES, get_policy


def _display(vector: metrics.MetricVector) -> str:
    return " ".join(
        f"{spec.column}={vector.get(spec.name):.4f}" for spec in metrics.METRIC_SPECS
    )


def cmd_prepare(config: ToolkitConfig, args: argparse.Namespace) -> int:
    layout = corpus.WorkspaceLayout(config.workspace)
    if not layout.pdf_dir.is_dir():
        raise FileNotFoundError(f"missing pdf directory: {layout.pdf_dir}")
    if not layout.ocr_dir.is_dir():
        raise FileNotFoundError(f"missing ocr directory: {layout.ocr_dir}")
    created = layout.create()

    plan = corpus.rename_to_gt(layout.ocr_dir)
    for old, new in plan:
        print(f"rename {old.name} -> {new.name}")
    renamed = corpus.apply_rename(plan)

    pdfs = sorted(layout.pdf_dir.glob("*.pdf"))
    rasterized = 0
    failures = 0
    for pdf in pdfs:
        single = layout.tiff_dir / f"{pdf.stem}.tiff"
        first_page = layout.tiff_dir / f"{pdf.stem}-1.tiff"
        if single.is_file() or first_page.is_file():
            continue
        result = engines.rasterize_contract(
            pdf, layout.tiff_dir, config.rasterizer_template
        )
        if result.status == "ok":
            rasterized += len(result.pages)
        else:
            failures += 1
            print(f"rasterize failed: {pdf.name}: {result.message}", file=sys.stderr)

    before = (
        layout.manifest_path.read_text(encoding="utf-8")
        if layout.manifest_path.is_file()
        else None
    )
    entries = corpus.write_manifest(layout.lstmf_dir, layout.manifest_path)
    after = layout.manifest_path.read_text(encoding="utf-8")
    manifest_changed = before != after

    print(
        f"dirs_created={len(created)} renamed={renamed} "
        f"pages_rasterized={rasterized} rasterize_failures={failures} "
        f"manifest_entries={entries} "
        f"manifest_changed={'true' if manifest_changed else 'false'}"
    )
    return 0


def cmd_run(config: ToolkitConfig, args: argparse.Namespace) -> int:
    spec = config.engine(args.engine)
    layout = corpus.WorkspaceLayout(config.workspace)
    inputs_dir = Path(args.inputs) if args.inputs else layout.tiff_dir
    if not inputs_dir.is_dir():
        raise FileNotFoundError(f"missing inputs directory: {inputs_dir}")
    inputs = sorted(
        entry
        for entry in inputs_dir.iterdir()
        if entry.is_file() and entry.suffix.lower() in (".tif", ".tiff", ".png", ".jpg")
    )
    out_dir = Path(args.out_dir) if args.out_dir else config.workspace / "output" / spec.name
    report = engines.run_engine(spec, inputs, parallelism=args.parallelism, out_dir=out_dir)
    for result in report.results:
        line = f"{result.status}: {result.input.name} ({result.duration_s:.2f}s)"
        if result.message:
            line += f" - {result.message}"
        print(line)
    record = footprint.estimate(
        duration_s=report.total_duration_s,
        avg_power_w=config.avg_power_w,
        carbon_intensity=config.carbon_intensity,
        n_examples=len(report.ok) or None,
        run_label=spec.name,
        phase=footprint.Phase.INFERENCE,
    )
    footprint.EstimateLog(config.workspace / "footprint.csv").append(record)
    print(
        f"ok={len(report.ok)} failed={len(report.failed)} "
        f"duration_s={report.total_duration_s:.2f} "
        f"energy_kwh={record.energy_kwh:.6f} co2_kg={record.co2_kg:.6f}"
    )
    return 0


def cmd_score(config: ToolkitConfig, args: argparse.Namespace) -> int:
    policy = get_policy(args.policy or config.policy)
    result = corpus.discover_pairs(Path(args.ref_dir), Path(args.hyp_dir))
    if result.unmatched_ref:
        print(
            "unmatched reference ids: " + ", ".join(result.unmatched_ref),
            file=sys.stderr,
        )
    if result.unmatched_hyp:
        print(
            "unmatched hypothesis ids: " + ", ".join(result.unmatched_hyp),
            file=sys.stderr,
        )
    if not result.pairs:
        raise ValueError("no reference/hypothesis pairs found")
    scores = {
        pair.doc_id: metrics.score_pair(pair.reference, pair.hypothesis, policy)
        for pair in result.pairs
    }
    analysis.write_per_file_csv(scores, Path(args.out))
    total = metrics.aggregate(scores.values())
    print(f"files={len(scores)} {_display(total)}")
    return 0


def _load_rows(paths: list[str]) -> list[analysis.LeaderboardRow]:
    """Rows from aggregate leaderboard CSVs and/or per-file score CSVs.

    A file whose first column is file_id is aggregated into a single row
    labeled by the file's stem.
    """
    rows: list[analysis.LeaderboardRow] = []
    for raw in paths:
        path = Path(raw)
        with open(path, newline="", encoding="utf-8") as handle:
            header = next(csv.reader(handle), None)
        if header is None:
            raise ValueError(f"empty CSV: {path}")
        if header[0] == "file_id":
            rows.append(analysis.row_from_per_file(path.stem, path))
        else:
            rows.extend(analysis.read_leaderboard_csv(path))
    return rows


def cmd_leaderboard(config: ToolkitConfig, args: argparse.Namespace) -> int:
    rows = _load_rows(args.scores)
    spec = metrics.METRIC_BY_NAME[args.metric]
    ranked = analysis.rank(rows, spec)
    print(analysis.format_leaderboard_table(ranked), end="")
    if args.out:
        analysis.write_leaderboard_csv(ranked, Path(args.out))
    return 0


def cmd_worst(config: ToolkitConfig, args: argparse.Namespace) -> int:
    scores = analysis.read_per_file_csv(Path(args.scores))
    n = args.n if args.n is not None else config.worst_n
    threshold = args.threshold if args.threshold is not None else config.worst_threshold
    report = analysis.worst_files(scores, n=n, threshold=threshold)
    for spec in metrics.METRIC_SPECS:
        ids = report.per_metric_bottom[spec.name]
        print(f"{spec.column} worst: {' '.join(ids)}")
    print(f"flagged (> {threshold} of {len(metrics.METRIC_SPECS)} lists):")
    for doc_id, count in report.flagged:
        print(f"  {doc_id} {count}")
    if args.out:
        payload = {
            "n": report.n,
            "threshold": report.threshold,
            "per_metric_bottom": report.per_metric_bottom,
            "flagged": [
                {"file_id": doc_id, "count": count} for doc_id, count in report.flagged
            ],
        }
        atomic_write_text(Path(args.out), json.dumps(payload, indent=2) + "\n")
    return 0


def cmd_scatter(config: ToolkitConfig, args: argparse.Namespace) -> int:
    rows = _load_rows(args.scores)
    count = analysis.export_scatter(rows, Path(args.out))
    print(f"rows={count}")
    return 0


def cmd_chat_export(config: ToolkitConfig, args: argparse.Namespace) -> int:
    pairs = corpus.load_references(Path(args.ref_dir))
    report = corpus.export_chat_records(pairs, Path(args.image_dir), Path(args.out))
    print(f"written={report.written} skipped={len(report.skipped)}")
    for doc_id in report.skipped:
        print(f"skipped (no image): {doc_id}", file=sys.stderr)
    return 0


def cmd_footprint(config: ToolkitConfig, args: argparse.Namespace) -> int:
    phase = footprint.Phase(args.phase)
    if args.duration_only:
        record = footprint.duration_only(
            run_label=args.label,
            phase=phase,
            duration_s=args.duration,
            n_examples=args.examples,
        )
        print(
            f"run={record.run_label} phase={phase.value} "
            f"duration_s={record.duration_s} energy=unavailable"
        )
    else:
        power = args.power if args.power is not None else config.avg_power_w
        intensity = (
            args.intensity if args.intensity is not None else config.carbon_intensity
        )
        record = footprint.estimate(
            duration_s=args.duration,
            avg_power_w=power,
            carbon_intensity=intensity,
            n_examples=args.examples,
            run_label=args.label,
            phase=phase,
        )
        print(
            f"run={record.run_label} phase={phase.value} "
            f"duration_s={record.duration_s} "
            f"energy_kwh={record.energy_kwh} co2_kg={record.co2_kg}"
        )
        if args.examples:
            kwh_each, kg_each = footprint.per_example(record)
            print(f"per_example energy_kwh={kwh_each} co2_kg={kg_each}")
    if args.log:
        footprint.EstimateLog(Path(args.log)).append(record)
    if args.chart_out:
        records = (
            footprint.read_estimate_log(Path(args.log))
            if args.log and Path(args.log).is_file()
            else [record]
        )
        footprint.log_scale_export(records, Path(args.chart_out))
    return 0


def cmd_geometry(config: ToolkitConfig, args: argparse.Namespace) -> int:
    if args.size:
        try:
            width, height = (int(part) for part in args.size.lower().split("x"))
        except ValueError:
            raise ValueError(f"size must look like 1000x3000, got {args.size!r}")
    elif args.image:
        with Image.open(args.image) as image:
            width, height = image.size
    else:
        raise ValueError("pass a WIDTHxHEIGHT size or --image")
    geometry = engines.compute_fit_geometry(width, height)
    print(
        f"source={width}x{height} scale={geometry.scale!r} "
        f"scaled={geometry.scaled_w}x{geometry.scaled_h} "
        f"pad_right={geometry.pad_right} pad_bottom={geometry.pad_bottom} "
        f"target={geometry.target_w}x{geometry.target_h}"
    )
    if args.fit_out:
        if not args.image:
            raise ValueError("--fit-out requires --image")
        engines.fit_image(Path(args.image), Path(args.fit_out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ocrkit",
        description="OCR evaluation toolkit: scoring, leaderboards, corpus "
        "preparation, engine runs and energy accounting.",
    )
    parser.add_argument("--config", help="path to the toolkit JSON config")
    parser.add_argument("--workspace", help="workspace root (overrides config)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="create the training layout and manifest")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("run", help="run an OCR engine over the workspace images")
    p.add_argument("--engine", help="configured engine name (default from config)")
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--inputs", help="image directory (default: workspace tiff dir)")
    p.add_argument("--out-dir", help="hypothesis output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("score", help="score a hypothesis directory against references")
    p.add_argument("ref_dir")
    p.add_argument("hyp_dir")
    p.add_argument("--policy", help=f"one of: {', '.join(sorted(POLICIES))}")
    p.add_argument("--out", required=True, help="per-file scores CSV")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("leaderboard", help="rank runs on one metric")
    p.add_argument("scores", nargs="+", help="leaderboard CSVs or per-file score CSVs")
    p.add_argument(
        "--metric", default="levenshtein", choices=list(metrics.METRIC_NAMES)
    )
    p.add_argument("--out", help="ranked leaderboard CSV")
    p.set_defaults(func=cmd_leaderboard)

    p = sub.add_parser("worst", help="bottom-N files per metric and cross-metric flags")
    p.add_argument("scores", help="per-file scores CSV")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--threshold", type=int, default=None)
    p.add_argument("--out", help="JSON report path")
    p.set_defaults(func=cmd_worst)

    p = sub.add_parser("scatter", help="export rank/value chart data per metric")
    p.add_argument("scores", nargs="+", help="leaderboard CSVs or per-file score CSVs")
    p.add_argument("--out", required=True, help="scatter CSV path")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("chat-export", help="export fine-tuning chat records")
    p.add_argument("ref_dir", help="reference transcription directory")
    p.add_argument("image_dir", help="page image directory")
    p.add_argument("--out", required=True, help="records file (one JSON per line)")
    p.set_defaults(func=cmd_chat_export)

    p = sub.add_parser("footprint", help="energy/CO2 estimate for a run")
    p.add_argument("--label", default="run")
    p.add_argument(
        "--phase",
        default=footprint.Phase.INFERENCE.value,
        choices=[phase.value for phase in footprint.Phase],
    )
    p.add_argument("--duration", type=float, required=True, help="seconds")
    p.add_argument("--power", type=float, help="average draw in watts")
    p.add_argument("--intensity", type=float, help="kg CO2 per kWh")
    p.add_argument("--examples", type=int)
    p.add_argument(
        "--duration-only",
        action="store_true",
        help="record duration with energy unavailable (hosted runs)",
    )
    p.add_argument("--log", help="append to this estimate log CSV")
    p.add_argument("--chart-out", help="write log-scale chart data CSV")
    p.set_defaults(func=cmd_footprint)

    p = sub.add_parser("geometry", help="fit-and-pad geometry for an image size")
    p.add_argument("size", nargs="?", help="WIDTHxHEIGHT, e.g. 1000x3000")
    p.add_argument("--image", help="read the size from an image file")
    p.add_argument("--fit-out", help="write the fitted image here")
    p.set_defaults(func=cmd_geometry)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(
            Path(args.config) if args.config else None,
            Path(args.workspace) if args.workspace else None,
        )
        return args.func(config, args)
    except ValueError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1
    except OSError as error:
        print(f"error: {error}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
