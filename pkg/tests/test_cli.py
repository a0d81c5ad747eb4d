"""CLI subcommands, exit codes, and file outputs."""

import json

import pytest

from dualgrad import cli


def run(argv):
    return cli.main(argv)


# --- gradcheck -------------------------------------------------------------------


def test_gradcheck_self_comparison(capsys):
    code = run(["gradcheck", "--n", "3", "--trials", "10",
                "--engine-a", "backprop", "--engine-b", "backprop",
                "--tol", "0", "--seed", "1"])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["pass"] is True
    assert report["max_abs_err"] == 0.0 and report["max_rel_err"] == 0.0


def test_gradcheck_ones_vs_backprop(capsys):
    code = run(["gradcheck", "--n", "2", "--trials", "100",
                "--engine-a", "ones", "--engine-b", "backprop",
                "--tol", "1e-10", "--seed", "0"])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["pass"] is True and report["trials"] == 100


def test_gradcheck_zero_tolerance_fails(capsys):
    # distinct engines round differently somewhere in 100 random models
    code = run(["gradcheck", "--n", "4", "--trials", "100",
                "--engine-a", "seeded", "--engine-b", "backprop",
                "--tol", "0", "--seed", "0"])
    assert code == 1
    report = json.loads(capsys.readouterr().out)
    assert report["pass"] is False and report["max_rel_err"] > 0


def test_gradcheck_unknown_engine(capsys):
    assert run(["gradcheck", "--engine-a", "magic"]) == 2


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        run(["gradcheck", "--frobnicate", "1"])
    assert exc.value.code == 2


# --- train ------------------------------------------------------------------------


def test_train_writes_logs(tmp_path, capsys):
    out = tmp_path / "run"
    code = run(["train", "--dataset", "and", "--engine", "ones",
                "--lr", "0.5", "--epochs", "50", "--seed", "0",
                "--out", str(out)])
    assert code == 0
    assert (out / "log.json").exists() and (out / "log.csv").exists()
    blob = json.loads((out / "log.json").read_text())
    assert blob["config"]["engine"] == "ones"
    assert len(blob["records"]) == 50
    assert "final_loss=" in capsys.readouterr().out


def test_train_missing_dataset_file(capsys):
    assert run(["train", "--dataset", "nosuch.csv"]) == 2


def test_train_zero_epochs_rejected(capsys):
    assert run(["train", "--dataset", "and", "--epochs", "0"]) == 2


def test_train_csv_dataset(tmp_path, capsys):
    data = tmp_path / "half.csv"
    rows = ["x1,x2,y"] + [f"{x1},{x2},{1 if x1 + x2 > 0 else 0}"
                          for x1 in (-1.0, -0.5, 0.5, 1.0) for x2 in (-1.0, 1.0)]
    data.write_text("\n".join(rows) + "\n")
    out = tmp_path / "run"
    code = run(["train", "--dataset", str(data), "--epochs", "20", "--out", str(out)])
    assert code == 0
    blob = json.loads((out / "log.json").read_text())
    assert blob["config"]["dataset"] == str(data)


# --- bench ------------------------------------------------------------------------


def test_bench_small_sweep(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    code = run(["bench", "--widths", "4,8", "--engines", "seeded,backprop",
                "--reps", "10", "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 5  # header + 2 widths x 2 engines
    assert "ns/param" in capsys.readouterr().out


def test_bench_low_reps_rejected(capsys):
    assert run(["bench", "--widths", "4", "--reps", "5"]) == 2


def test_bench_malformed_widths():
    with pytest.raises(SystemExit) as exc:
        run(["bench", "--widths", "8,abc"])
    assert exc.value.code == 2


# --- config files -------------------------------------------------------------------


def test_config_file_fills_defaults_and_flags_win(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# demo config\nlr=0.9\nepochs=30\ndataset=or\n")
    out = tmp_path / "run"
    code = run(["train", "--config", str(cfg), "--lr", "0.25", "--out", str(out)])
    assert code == 0
    blob = json.loads((out / "log.json").read_text())
    assert blob["config"]["learning_rate"] == 0.25  # flag beats file
    assert blob["config"]["epochs"] == 30  # file beats default
    assert blob["config"]["dataset"] == "or"


def test_config_file_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("momentum=0.9\n")
    assert run(["train", "--config", str(cfg)]) == 2


def test_config_file_bad_syntax(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("epochs 30\n")
    assert run(["train", "--config", str(cfg)]) == 2
