import os

from dsomrl.cli import main

CONFIG = """\
env=mountain_car
episodes=2
seeds=0
agent.variant=online
agent.hidden=8
optimizer.kind=sgd
optimizer.alpha=0.01
"""


def write_cfg(tmp_path, extra=""):
    p = tmp_path / "exp.cfg"
    p.write_text(CONFIG + extra)
    return str(p)


def test_train_command(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    out = str(tmp_path / "out")
    assert main(["train", cfg, "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "runs.csv"))
    assert "final-window mean" in capsys.readouterr().out


def test_train_seed_and_episode_overrides(tmp_path):
    cfg = write_cfg(tmp_path)
    out = str(tmp_path / "out")
    assert main(["train", cfg, "--out", out, "--seeds", "3,4",
                 "--episodes", "1"]) == 0
    with open(os.path.join(out, "runs.csv")) as f:
        lines = f.read().strip().split("\n")
    assert len(lines) == 3
    assert lines[1].startswith("3,0,") and lines[2].startswith("4,0,")


def test_sweep_command(tmp_path):
    cfg = write_cfg(tmp_path, "optimizer.alpha=0.001\n")
    out = str(tmp_path / "sweep")
    assert main(["sweep", cfg, "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "summary.csv"))


def test_units_sweep_command(tmp_path):
    cfg = write_cfg(tmp_path)
    out = str(tmp_path / "units")
    assert main(["units-sweep", cfg, "--out", out, "--counts", "4,8",
                 "--episodes", "1"]) == 0
    assert os.path.exists(os.path.join(out, "units_summary.csv"))


def test_analyze_command(tmp_path):
    cfg = write_cfg(tmp_path)
    out = str(tmp_path / "out")
    main(["train", cfg, "--out", out])
    an = str(tmp_path / "an")
    assert main(["analyze", os.path.join(out, "checkpoint_seed0.bin"),
                 "--out", an]) == 0
    assert os.path.exists(os.path.join(an, "heatmap.csv"))
    assert os.path.exists(os.path.join(an, "interference.csv"))


def test_bad_config_exits_nonzero(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("nonsense=1\n")
    assert main(["train", str(p)]) == 1
    assert "error:" in capsys.readouterr().err


def test_missing_checkpoint_exits_nonzero(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "nope.bin"),
                 "--out", str(tmp_path)]) == 1
    assert "error:" in capsys.readouterr().err
