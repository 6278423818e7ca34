import json
import os
import shutil
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("DRAWNET_CLI", "drawnet")
TMP = Path(os.environ.get("DRAWNET_TMP", "/tmp/drawnet_cli_tmp"))

PERIOD = "early:2003-04-01:2004-06-01"


def drawnet(*args, cwd=None):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, cwd=cwd)


@pytest.fixture(scope="module")
def work():
    if TMP.exists():
        shutil.rmtree(TMP)
    TMP.mkdir(parents=True)
    r = drawnet("--out-dir", TMP / "data", "--seed", 3, "synth", "--entities", 8, "--days", 800,
                "--planted", "reciprocal")
    assert r.returncode == 0, r.stderr
    return TMP


def test_synth_writes_panel_and_truth(work):
    panel = (work / "data" / "panel.csv").read_text().splitlines()
    assert panel[0] == "date,entity,price"
    assert len(panel) == 1 + 8 * 800
    truth = json.loads((work / "data" / "truth.json").read_text())
    assert len(truth["edges"]) == 8


def test_run_writes_summary_and_period_artifacts(work):
    out = work / "run1"
    r = drawnet("--out-dir", out, "--period", PERIOD, "run", work / "data" / "panel.csv")
    assert r.returncode == 0, r.stderr
    summary = json.loads((out / "summary.json").read_text())
    assert [p["label"] for p in summary["periods"]] == ["early"]
    stats = summary["periods"][0]["stats"]
    assert stats["n_entities"] == 8
    assert 0.0 <= stats["significant_pair_fraction"] <= 1.0
    for name in ["W.csv", "bowtie.svg", "centrality.csv", "network.json", "drawups.csv"]:
        assert (out / "early" / name).is_file(), name
    assert (out / "run.conf").is_file()


def test_rerun_is_byte_identical(work):
    a, b = work / "rep_a", work / "rep_b"
    for out in (a, b):
        r = drawnet("--out-dir", out, "--period", PERIOD, "run", work / "data" / "panel.csv")
        assert r.returncode == 0, r.stderr
    for f in sorted((a / "early").iterdir()):
        assert f.read_bytes() == (b / "early" / f.name).read_bytes(), f.name
    assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()


def test_run_from_config_file(work):
    conf = work / "pipeline.conf"
    conf.write_text(
        f"# comment\ninput = {work / 'data' / 'panel.csv'}\nperiod = {PERIOD}\n"
        f"out_dir = {work / 'from_conf'}\nseed = 5\n"
    )
    r = drawnet("--config", conf, "run")
    assert r.returncode == 0, r.stderr
    summary = json.loads((work / "from_conf" / "summary.json").read_text())
    assert summary["parameters"]["seed"] == 5


def test_stage_subcommands_chain(work):
    out = work / "stages"
    panel = work / "data" / "panel.csv"
    r = drawnet("--out-dir", out, "--period", PERIOD, "ingest", panel)
    assert r.returncode == 0, r.stderr
    assert "entities" in json.loads((out / "panel.json").read_text())

    r = drawnet("--out-dir", out, "--period", PERIOD, "detect", panel)
    assert r.returncode == 0, r.stderr
    assert r.stdout.startswith("detect:")

    r = drawnet("--out-dir", out, "network", "--drawups", out / "drawups.csv", "--report")
    assert r.returncode == 0, r.stderr
    report = json.loads(r.stdout)
    assert "lscc_size" in json.dumps(report)
    assert (out / "W.csv").is_file()

    r = drawnet("--out-dir", out, "centrality", "--weights", out / "W.csv")
    assert r.returncode == 0, r.stderr
    lines = r.stdout.splitlines()
    assert lines[0] == "entity,b,c,r,region"
    assert len(lines) == 9

    r = drawnet("--out-dir", out, "bowtie", "--weights", out / "W.csv")
    assert r.returncode == 0, r.stderr
    assert r.stdout.startswith("bowtie: IN ")

    svg = out / "picture.svg"
    r = drawnet("--out-dir", out, "render", "--weights", out / "W.csv", "--out", svg, "--labels")
    assert r.returncode == 0, r.stderr
    assert svg.read_text().lstrip().startswith(("<?xml", "<svg"))


def test_exit_codes(work):
    assert drawnet().returncode == 2  # no subcommand
    assert drawnet("run", "--no-such-flag").returncode == 2
    assert drawnet("--config", work / "missing.conf", "run").returncode == 2

    bad = work / "bad.conf"
    bad.write_text("n_perm = 3\n")
    r = drawnet("--config", bad, "run")
    assert r.returncode == 2
    assert "config" in r.stderr

    r = drawnet("--out-dir", work / "x", "run", work / "missing.csv")
    assert r.returncode == 3  # ingest stage
    assert "ingest" in r.stderr
