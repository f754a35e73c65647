"""End-to-end checks of the command-line interface."""

import json
import os
import subprocess
from pathlib import Path

import pytest
from PIL import Image

from ocrkit.cli import main
from ocrkit.footprint import read_estimate_log

DATA = Path(__file__).parent / "data"

OCR_STUB = """\
#!/bin/sh
case "$1" in
  *bad*) echo "boom" >&2; exit 3 ;;
  *) printf 'stub text\\n' > "$2.txt" ;;
esac
"""

RASTER_STUB = """\
#!/bin/sh
: > "$2-1.tif"
"""


@pytest.fixture
def stub_path(tmp_path, monkeypatch):
    bindir = tmp_path / "bin"
    bindir.mkdir()
    for name, body in (("ocrstub", OCR_STUB), ("rasterstub", RASTER_STUB)):
        script = bindir / name
        script.write_text(body, encoding="utf-8")
        script.chmod(0o755)
    monkeypatch.setenv("PATH", f"{bindir}:{os.environ['PATH']}")
    return bindir


@pytest.fixture
def pair_dirs(tmp_path):
    ref = tmp_path / "ref"
    hyp = tmp_path / "hyp"
    ref.mkdir()
    hyp.mkdir()
    (ref / "1.txt").write_text("uno dos tres", encoding="utf-8")
    (hyp / "1.txt").write_text("uno dos tres", encoding="utf-8")
    (ref / "2.txt").write_text("quatro", encoding="utf-8")
    (hyp / "2.txt").write_text("quatro", encoding="utf-8")
    return ref, hyp


def test_entry_point_help():
    proc = subprocess.run(
        ["ocrkit", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    for name in ("prepare", "run", "score", "leaderboard", "worst", "scatter"):
        assert name in proc.stdout


def test_score_identical_pairs(pair_dirs, tmp_path, capsys):
    ref, hyp = pair_dirs
    out = tmp_path / "scores.csv"
    code = main(["score", str(ref), str(hyp), "--out", str(out)])
    assert code == 0
    printed = capsys.readouterr().out
    assert printed.startswith("files=2 ")
    assert "LEVENSHTEIN=0.0000" in printed
    assert "BLEU=1.0000" in printed
    assert "ROUGELSUM=1.0000" in printed
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("file_id,")
    assert len(lines) == 3


def test_score_reports_orphans(pair_dirs, tmp_path, capsys):
    ref, hyp = pair_dirs
    (ref / "3.txt").write_text("solo", encoding="utf-8")
    code = main(["score", str(ref), str(hyp), "--out", str(tmp_path / "s.csv")])
    assert code == 0
    captured = capsys.readouterr()
    assert "unmatched reference ids: 3" in captured.err


def test_score_no_pairs_is_validation_error(tmp_path, capsys):
    ref = tmp_path / "ref"
    hyp = tmp_path / "hyp"
    ref.mkdir()
    hyp.mkdir()
    code = main(["score", str(ref), str(hyp), "--out", str(tmp_path / "s.csv")])
    assert code == 1
    assert "no reference/hypothesis pairs" in capsys.readouterr().err


def test_score_missing_dir_is_environment_error(tmp_path, capsys):
    hyp = tmp_path / "hyp"
    hyp.mkdir()
    code = main(
        ["score", str(tmp_path / "ghost"), str(hyp), "--out", str(tmp_path / "s.csv")]
    )
    assert code == 2


def test_score_policy_changes_result(tmp_path, capsys):
    ref = tmp_path / "ref"
    hyp = tmp_path / "hyp"
    ref.mkdir()
    hyp.mkdir()
    (ref / "1.txt").write_text("uno\ndos", encoding="utf-8")
    (hyp / "1.txt").write_text("uno dos", encoding="utf-8")
    out = tmp_path / "s.csv"
    assert main(["score", str(ref), str(hyp), "--policy", "join", "--out", str(out)]) == 0
    joined = capsys.readouterr().out
    assert "LEVENSHTEIN=0.0000" in joined
    assert main(["score", str(ref), str(hyp), "--policy", "preserve", "--out", str(out)]) == 0
    preserved = capsys.readouterr().out
    assert "LEVENSHTEIN=1.0000" in preserved


def test_leaderboard_from_fixture(tmp_path, capsys):
    out = tmp_path / "board.csv"
    code = main(
        [
            "leaderboard",
            str(DATA / "sample_leaderboard.csv"),
            "--metric",
            "levenshtein",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("TEAM")
    assert lines[1].startswith("OCRTITS_run1")
    assert lines[-1].startswith("GRESEL2_run2")
    saved = out.read_text(encoding="utf-8").splitlines()
    assert saved[1].startswith("OCRTITS_run1,")


def test_leaderboard_other_metric(capsys):
    code = main(
        ["leaderboard", str(DATA / "sample_leaderboard.csv"), "--metric", "bleu"]
    )
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1].startswith("OCRTITS_run1")
    assert lines[2].startswith("GRESEL2_run2")


def test_leaderboard_accepts_per_file_scores(pair_dirs, tmp_path, capsys):
    ref, hyp = pair_dirs
    scores = tmp_path / "myrun.csv"
    assert main(["score", str(ref), str(hyp), "--out", str(scores)]) == 0
    capsys.readouterr()
    code = main(["leaderboard", str(scores)])
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1].startswith("myrun")
    assert "0.0000" in lines[1]


def test_worst_output_and_json(pair_dirs, tmp_path, capsys):
    ref, hyp = pair_dirs
    (hyp / "2.txt").write_text("todo distinto aqui", encoding="utf-8")
    scores = tmp_path / "scores.csv"
    assert main(["score", str(ref), str(hyp), "--out", str(scores)]) == 0
    capsys.readouterr()
    report_path = tmp_path / "worst.json"
    code = main(
        [
            "worst",
            str(scores),
            "--n",
            "1",
            "--threshold",
            "1",
            "--out",
            str(report_path),
        ]
    )
    assert code == 0
    printed = capsys.readouterr().out.splitlines()
    assert printed[0] == "LEVENSHTEIN worst: 2"
    assert "flagged (> 1 of 8 lists):" in printed
    assert any(line.strip().startswith("2 ") for line in printed)
    payload = json.loads(report_path.read_text(encoding="utf-8"))
    assert payload["n"] == 1
    assert payload["threshold"] == 1
    assert payload["per_metric_bottom"]["levenshtein"] == ["2"]
    assert payload["flagged"][0]["file_id"] == "2"
    assert payload["flagged"][0]["count"] == 8


def test_scatter_from_fixture(tmp_path, capsys):
    out = tmp_path / "scatter.csv"
    code = main(["scatter", str(DATA / "sample_leaderboard.csv"), "--out", str(out)])
    assert code == 0
    assert capsys.readouterr().out.strip() == "rows=56"
    assert len(out.read_text(encoding="utf-8").splitlines()) == 57


def test_chat_export_cli(tmp_path, capsys):
    ref = tmp_path / "ref"
    images = tmp_path / "img"
    ref.mkdir()
    images.mkdir()
    (ref / "1.gt.txt").write_text("texto", encoding="utf-8")
    (ref / "2.gt.txt").write_text("sin imagen", encoding="utf-8")
    (images / "1.png").write_bytes(b"")
    out = tmp_path / "records.jsonl"
    code = main(["chat-export", str(ref), str(images), "--out", str(out)])
    assert code == 0
    captured = capsys.readouterr()
    assert captured.out.strip() == "written=1 skipped=1"
    assert "skipped (no image): 2" in captured.err


def test_footprint_measured(tmp_path, capsys):
    log = tmp_path / "fp.csv"
    chart = tmp_path / "chart.csv"
    code = main(
        [
            "footprint",
            "--label",
            "demo",
            "--duration",
            "7200",
            "--power",
            "250",
            "--intensity",
            "0.25",
            "--examples",
            "3000",
            "--log",
            str(log),
            "--chart-out",
            str(chart),
        ]
    )
    assert code == 0
    printed = capsys.readouterr().out
    assert "energy_kwh=0.5" in printed
    assert "co2_kg=0.125" in printed
    assert "per_example" in printed
    records = read_estimate_log(log)
    assert len(records) == 1
    assert records[0].run_label == "demo"
    assert chart.is_file()


def test_footprint_duration_only(capsys):
    code = main(
        ["footprint", "--label", "cloud", "--duration", "60", "--duration-only"]
    )
    assert code == 0
    assert "energy=unavailable" in capsys.readouterr().out


def test_footprint_rejects_negative_duration(capsys):
    code = main(["footprint", "--duration", "-5"])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_geometry_size(capsys):
    code = main(["geometry", "1000x3000"])
    assert code == 0
    line = capsys.readouterr().out.strip()
    assert line.startswith("source=1000x3000 scale=0.195 scaled=195x585")
    assert "pad_right=219 pad_bottom=0 target=414x585" in line


def test_geometry_from_image(tmp_path, capsys):
    src = tmp_path / "page.png"
    Image.new("RGB", (828, 1170), (0, 0, 0)).save(src)
    fitted = tmp_path / "fitted.png"
    code = main(["geometry", "--image", str(src), "--fit-out", str(fitted)])
    assert code == 0
    assert "scaled=414x585" in capsys.readouterr().out
    with Image.open(fitted) as image:
        assert image.size == (414, 585)


def test_geometry_bad_inputs(tmp_path, capsys):
    assert main(["geometry", "oops"]) == 1
    assert main(["geometry"]) == 1
    assert main(["geometry", "--fit-out", str(tmp_path / "x.png")]) == 1
    capsys.readouterr()


def test_prepare_and_rerun(stub_path, tmp_path, capsys):
    workspace = tmp_path / "ws"
    (workspace / "train" / "pdf").mkdir(parents=True)
    (workspace / "train" / "ocr").mkdir(parents=True)
    (workspace / "train" / "pdf" / "9100.pdf").write_bytes(b"%PDF")
    (workspace / "train" / "ocr" / "9100.txt").write_text("texto", encoding="utf-8")
    (workspace / "ocrkit.json").write_text(
        json.dumps({"rasterizer_template": "rasterstub {input} {output_base}"}),
        encoding="utf-8",
    )
    code = main(["--workspace", str(workspace), "prepare"])
    assert code == 0
    printed = capsys.readouterr().out
    assert "rename 9100.txt -> 9100.gt.txt" in printed
    summary = printed.strip().splitlines()[-1]
    assert "renamed=1" in summary
    assert "pages_rasterized=1" in summary
    assert "manifest_entries=0" in summary
    assert "manifest_changed=true" in summary
    assert (workspace / "train" / "ocr" / "9100.gt.txt").is_file()
    assert (workspace / "train" / "tiff" / "9100.tiff").is_file()
    assert (workspace / "train" / "lstmf" / "list.txt").is_file()

    code = main(["--workspace", str(workspace), "prepare"])
    assert code == 0
    summary = capsys.readouterr().out.strip().splitlines()[-1]
    assert "renamed=0" in summary
    assert "pages_rasterized=0" in summary
    assert "manifest_changed=false" in summary


def test_prepare_requires_input_dirs(tmp_path, capsys):
    workspace = tmp_path / "ws"
    workspace.mkdir()
    code = main(["--workspace", str(workspace), "prepare"])
    assert code == 2
    assert "missing pdf directory" in capsys.readouterr().err


def test_run_with_configured_engine(stub_path, tmp_path, capsys):
    workspace = tmp_path / "ws"
    images = workspace / "train" / "tiff"
    images.mkdir(parents=True)
    (images / "a.tiff").write_bytes(b"")
    (images / "bad.tiff").write_bytes(b"")
    (images / "ignored.xml").write_text("x", encoding="utf-8")
    (workspace / "ocrkit.json").write_text(
        json.dumps(
            {
                "engines": [
                    {
                        "name": "stub",
                        "command_template": "ocrstub {input} {output_base} -l {model}",
                        "model_name": "m",
                    }
                ],
                "default_engine": "stub",
            }
        ),
        encoding="utf-8",
    )
    code = main(["--workspace", str(workspace), "run"])
    assert code == 0
    printed = capsys.readouterr().out
    assert "ok: a.tiff" in printed
    assert "failed: bad.tiff" in printed
    assert "ok=1 failed=1" in printed
    assert (workspace / "output" / "stub" / "a.txt").is_file()
    records = read_estimate_log(workspace / "footprint.csv")
    assert len(records) == 1
    assert records[0].run_label == "stub"
    assert records[0].n_examples == 1


def test_run_unknown_engine(stub_path, tmp_path, capsys):
    workspace = tmp_path / "ws"
    (workspace / "train" / "tiff").mkdir(parents=True)
    code = main(["--workspace", str(workspace), "run", "--engine", "ghost"])
    assert code == 1
    assert "unknown engine" in capsys.readouterr().err


def test_workspace_env_var(tmp_path, monkeypatch, capsys):
    workspace = tmp_path / "ws"
    workspace.mkdir()
    (workspace / "ocrkit.json").write_text(
        json.dumps({"worst_n": 1, "worst_threshold": 1}), encoding="utf-8"
    )
    ref = tmp_path / "ref"
    hyp = tmp_path / "hyp"
    ref.mkdir()
    hyp.mkdir()
    (ref / "1.txt").write_text("hola", encoding="utf-8")
    (hyp / "1.txt").write_text("hola", encoding="utf-8")
    scores = tmp_path / "s.csv"
    assert main(["score", str(ref), str(hyp), "--out", str(scores)]) == 0
    capsys.readouterr()
    monkeypatch.setenv("OCRKIT_WORKSPACE", str(workspace))
    code = main(["worst", str(scores)])
    assert code == 0
    assert "flagged (> 1 of 8 lists):" in capsys.readouterr().out


def test_workspace_flag_beats_env(tmp_path, monkeypatch, capsys):
    good = tmp_path / "good"
    good.mkdir()
    monkeypatch.setenv("OCRKIT_WORKSPACE", str(tmp_path / "missing"))
    code = main(["--workspace", str(good), "geometry", "828x1170"])
    assert code == 0
    capsys.readouterr()


def test_missing_workspace_is_environment_error(tmp_path, capsys):
    code = main(["--workspace", str(tmp_path / "nope"), "geometry", "828x1170"])
    assert code == 2
    assert "workspace does not exist" in capsys.readouterr().err


def test_explicit_config_path(tmp_path, capsys):
    config = tmp_path / "custom.json"
    config.write_text(json.dumps({"worst_n": 2}), encoding="utf-8")
    ref = tmp_path / "ref"
    hyp = tmp_path / "hyp"
    ref.mkdir()
    hyp.mkdir()
    for i in ("1", "2", "3"):
        (ref / f"{i}.txt").write_text(f"texto {i}", encoding="utf-8")
        (hyp / f"{i}.txt").write_text(f"texto {i}", encoding="utf-8")
    scores = tmp_path / "s.csv"
    assert main(["score", str(ref), str(hyp), "--out", str(scores)]) == 0
    capsys.readouterr()
    code = main(["--config", str(config), "worst", str(scores)])
    assert code == 0
    printed = capsys.readouterr().out
    # n=2 from the config file: two ids per list
    assert printed.splitlines()[0] == "LEVENSHTEIN worst: 1 2"
