import json
import os
import subprocess
import sys
from pathlib import Path


from glepoch.cli import main, slug

GOLDEN = Path(__file__).parent / "golden" / "toy"
TOY_EPOCHS = "early=2001:2001,mid=2003:2003,late=2005:2005"
STAGES = ("ingest", "extract", "transform", "compare", "report")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_synth_deterministic(tmp_path, capsys):
    for name in ("a", "b"):
        code, out, _ = run(capsys, "synth", "--n", "500", "--seed", "7",
                           "--corpus-dir", str(tmp_path / name), "--out", str(tmp_path / "o"))
        assert code == 0 and json.loads(out)["articles"] == 500
    for f in ("articles.tsv", "citations.tsv", "authorship.tsv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_toy_pipeline_matches_golden(toy_dir, tmp_path, capsys):
    out = tmp_path / "o"
    for stage in STAGES:
        code, stdout, err = run(capsys, stage, "--corpus-dir", str(toy_dir), "--out", str(out),
                                "--epochs", TOY_EPOCHS, "--threads", "1")
        assert code == 0, err
        assert json.loads(stdout)["ok"] is True
    pairs = {
        "agreement.csv": out / "compare" / "agreement.csv",
        "cohort_mid.csv": out / "compare" / "cohort_mid.csv",
        "cohort_table.csv": out / "report" / "cohort_table.csv",
        "spectrogram_mid.csv": out / "transform" / "mid" / "spectrogram.csv",
        "persistent_common.csv": out / "report" / "persistent_common.csv",
    }
    for golden, produced in pairs.items():
        assert produced.read_text() == (GOLDEN / golden).read_text(), golden
    meta = json.loads((out / "extract" / "mid" / "meta.json").read_text())
    assert (meta["core"], meta["cout"], meta["cin"]) == (1, 1, 1)
    assert meta["cohort_sizes"] == [1, 0, 1, 1, 1, 0, 0]


def test_single_epoch_compare(toy_dir, tmp_path, capsys):
    args = ["--corpus-dir", str(toy_dir), "--out", str(tmp_path), "--epochs", "only=2003:2003"]
    for stage in ("ingest", "extract", "transform", "compare"):
        assert run(capsys, stage, *args)[0] == 0
    summary = json.loads((tmp_path / "compare" / "summary.json").read_text())
    assert summary["agreement"] == [[1.0]]
    assert (tmp_path / "compare" / "agreement.csv").read_text() == ",only\nonly,1.0\n"


def test_compare_before_transform_is_dependency_error(toy_dir, tmp_path, capsys):
    args = ["--corpus-dir", str(toy_dir), "--out", str(tmp_path), "--epochs", TOY_EPOCHS]
    run(capsys, "ingest", *args)
    run(capsys, "extract", *args)
    code, out, err = run(capsys, "compare", *args)
    assert code != 0 and out == ""
    msg = json.loads(err)
    assert msg["error"] == "DependencyError" and msg["exit_code"] == code
    assert "field.npy" in msg["message"]


def test_extract_without_cache(tmp_path, capsys):
    code, _, err = run(capsys, "extract", "--out", str(tmp_path))
    assert code == 1 and "corpus.lgc" in json.loads(err)["message"]


def test_bad_epoch_is_config_error(tmp_path, capsys):
    code, _, err = run(capsys, "extract", "--out", str(tmp_path), "--epochs", "x=2005:2001")
    assert code == 2 and json.loads(err)["exit_code"] == 2
    code, _, err = run(capsys, "extract", "--out", str(tmp_path), "--epochs", "a b=2001:2002,a-b=2003:2004")
    assert code == 2


def test_ingest_missing_corpus_file(toy_dir, tmp_path, capsys):
    (toy_dir / "citations.tsv").unlink()
    code, _, err = run(capsys, "ingest", "--corpus-dir", str(toy_dir), "--out", str(tmp_path))
    assert code == 1 and "citations.tsv" in json.loads(err)["message"]
    assert not (tmp_path / "corpus.lgc").exists()


def test_config_file_and_flag_override(toy_dir, tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# toy run\ncorpus_dir = {toy_dir}\nout = {tmp_path / 'o'}\n"
                   f"epochs = {TOY_EPOCHS}\nholder_p = 3\n")
    for stage in ("ingest", "extract", "transform"):
        assert run(capsys, stage, "--config", str(cfg))[0] == 0
    assert run(capsys, "compare", "--config", str(cfg), "--holder-p", "2", "--no-sigma0")[0] == 0
    s = json.loads((tmp_path / "o" / "compare" / "summary.json").read_text())
    assert s["holder_p"] == 2.0 and s["include_sigma0"] is False
    assert s["labels"] == ["early", "mid", "late"]


def test_config_file_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "extract", "--config", str(cfg))
    assert code == 2 and "colour" in json.loads(err)["message"]


def test_cache_env_var(toy_dir, tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("GLEPOCH_CACHE_DIR", str(tmp_path / "cache"))
    assert run(capsys, "ingest", "--corpus-dir", str(toy_dir), "--out", str(tmp_path / "o"))[0] == 0
    assert (tmp_path / "cache" / "corpus.lgc").is_file()
    assert not (tmp_path / "o" / "corpus.lgc").exists()


def test_stage_rerun_is_idempotent(toy_dir, tmp_path, capsys):
    args = ["--corpus-dir", str(toy_dir), "--out", str(tmp_path), "--epochs", TOY_EPOCHS]
    for stage in STAGES:
        run(capsys, stage, *args)
    before = (tmp_path / "compare" / "reports" / "early__mid.json").read_bytes()
    assert run(capsys, "compare", *args)[0] == 0
    assert (tmp_path / "compare" / "reports" / "early__mid.json").read_bytes() == before


def test_slug():
    assert slug("Swine flu") == "swine_flu" and slug("COVID-19") == "covid_19"


def test_console_entry_point(tmp_path):
    env = dict(os.environ)
    r = subprocess.run([sys.executable, "-m", "glepoch.cli", "synth", "--n", "20",
                        "--corpus-dir", str(tmp_path / "c"), "--out", str(tmp_path / "o")],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 0, r.stderr
    assert json.loads(r.stdout)["command"] == "synth"
    r = subprocess.run([sys.executable, "-m", "glepoch.cli", "bogus"], capture_output=True, text=True)
    assert r.returncode == 2
    assert json.loads(r.stderr)["error"] == "ConfigError"
