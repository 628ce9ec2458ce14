"""End-to-end checks of the hetsep command-line tool.

HETSEP_CLI points at the binary. HETSEP_UPDATE_SNAPSHOTS=1 rewrites the
--help snapshots instead of comparing against them.
"""

import filecmp
import json
import os
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("HETSEP_CLI", "hetsep")
HELP_DIR = Path(__file__).parent / "help"
SUBCOMMANDS = ["", "generate", "train", "eval", "ablate", "perturb-sweep", "transform", "export"]

SPEC = {
    "num_target_nodes": 90,
    "num_classes": 3,
    "p_in": 0.25,
    "p_out": 0.03,
    "feature_dim": 8,
    "seed": 4,
    "attribute_types": [{"name": "a", "count": 12}, {"name": "b", "count": 15}],
}
CONFIG = {"epochs": 4, "hidden_dim": 8, "seed": 1}


def hetsep(*args, check=True):
    proc = subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)
    if check and proc.returncode != 0:
        raise AssertionError(f"hetsep {' '.join(map(str, args))} -> {proc.returncode}\n{proc.stderr}")
    return proc


@pytest.fixture(scope="module")
def synth(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    spec = root / "synth.json"
    spec.write_text(json.dumps(SPEC))
    config = root / "cfg.json"
    config.write_text(json.dumps(CONFIG))
    hetsep("generate", "--spec", spec, "--out", root / "synth")
    return root


@pytest.mark.parametrize("sub", SUBCOMMANDS)
def test_help_snapshot(sub):
    text = hetsep(*([sub] if sub else []), "--help").stdout
    snap = HELP_DIR / f"{sub or 'main'}.txt"
    if os.environ.get("HETSEP_UPDATE_SNAPSHOTS") == "1":
        snap.write_text(text)
    assert text == snap.read_text()


def test_generate_is_byte_identical(synth, tmp_path):
    hetsep("generate", "--spec", synth / "synth.json", "--out", tmp_path / "again")
    cmp = filecmp.dircmp(synth / "synth", tmp_path / "again")
    assert not cmp.left_only and not cmp.right_only
    _, mismatch, errors = filecmp.cmpfiles(synth / "synth", tmp_path / "again", cmp.common_files, shallow=False)
    assert mismatch == [] and errors == []


def test_train_then_eval(synth, tmp_path):
    run = tmp_path / "run1"
    hetsep("train", "--data", synth / "synth", "--config", synth / "cfg.json", "--out", run)
    for name in ["checkpoint.bin", "train_log.tsv", "embeddings.tsv", "run.json"]:
        assert (run / name).exists(), name
    hetsep("eval", "--run", run, "--split", 20)
    report = json.loads((run / "report_20.json").read_text())
    for key in ["micro_f1", "macro_f1", "auc"]:
        assert key in report["metrics"]
        assert report["metrics"][key]["std"] >= 0
    assert report["trials"] == 10
    assert report["metadata"]["config_hash"] == json.loads((run / "run.json").read_text())["config_hash"]

    # Same inputs, same outputs.
    first = (run / "train_log.tsv").read_bytes()
    hetsep("train", "--data", synth / "synth", "--config", synth / "cfg.json", "--out", run)
    assert (run / "train_log.tsv").read_bytes() == first

    out = tmp_path / "emb.tsv"
    hetsep("export", "--run", run, "--out", out)
    rows = out.read_text().splitlines()
    assert len(rows) == SPEC["num_target_nodes"]
    assert len(rows[0].split("\t")) == 1 + CONFIG["hidden_dim"]


def test_ablate_two_rows(synth, tmp_path):
    proc = hetsep("ablate", "--variants", "full,no_hete", "--data", synth / "synth", "--config", synth / "cfg.json",
                  "--out", tmp_path)
    lines = proc.stdout.strip().splitlines()
    assert len(lines) == 3
    assert [l.split("\t")[0] for l in lines[1:]] == ["full", "no_hete"]
    assert (tmp_path / "ablation.tsv").read_text() == proc.stdout


def test_perturb_sweep_one_row_per_rate(synth, tmp_path):
    proc = hetsep("perturb-sweep", "--rates", "0,0.5", "--data", synth / "synth", "--config", synth / "cfg.json")
    lines = proc.stdout.strip().splitlines()
    assert lines[0] == "rate\tmicro_f1_mean\tmicro_f1_std\ttrials"
    assert len(lines) == 3


def test_transform_writes_dumps(synth, tmp_path):
    run = tmp_path / "run"
    hetsep("train", "--data", synth / "synth", "--config", synth / "cfg.json", "--out", run)
    hetsep("transform", "--data", synth / "synth", "--out", tmp_path / "t", "--relation", "target-a", "--run", run)
    names = sorted(p.name for p in (tmp_path / "t").iterdir())
    assert "target-a.incidence.tsv" in names
    assert "target-a.dual.tsv" in names
    assert "target-a.weights.tsv" in names
    assert "target-a.ho.graph.tsv" in names


def test_random_features_flag(synth, tmp_path):
    run = tmp_path / "rf"
    hetsep("train", "--data", synth / "synth", "--config", synth / "cfg.json", "--out", run, "--random-features", 16)
    assert json.loads((run / "run.json").read_text())["random_features"] == 16
    hetsep("eval", "--run", run)


def test_exit_codes(synth, tmp_path):
    assert hetsep("train", "--bogus", check=False).returncode == 1
    missing = hetsep("train", "--data", tmp_path / "nope", "--config", synth / "cfg.json", "--out", tmp_path / "o",
                     check=False)
    assert missing.returncode == 1
    assert "no such directory" in missing.stderr
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"learning_rate": 0.1}))
    proc = hetsep("train", "--data", synth / "synth", "--config", bad, "--out", tmp_path / "o", check=False)
    assert proc.returncode == 1
    assert "unknown config key 'learning_rate'" in proc.stderr
    proc = hetsep("ablate", "--data", synth / "synth", "--variants", "full,nope", check=False)
    assert proc.returncode == 1
    assert "unknown ablation variant" in proc.stderr
    proc = hetsep("eval", "--run", tmp_path, check=False)
    assert proc.returncode == 1
    assert "run.json" in proc.stderr

    # A corrupt checkpoint is a runtime failure, not a usage error.
    run = tmp_path / "broken"
    hetsep("train", "--data", synth / "synth", "--config", synth / "cfg.json", "--out", run)
    (run / "checkpoint.bin").write_bytes(b"garbage")
    assert hetsep("eval", "--run", run, check=False).returncode == 2
