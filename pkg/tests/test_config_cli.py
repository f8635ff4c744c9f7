import csv
import os
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from kuramoto_rc import __version__
from kuramoto_rc.cli import main
from kuramoto_rc.config import DEFAULTS, parse_config, read_config_file
from kuramoto_rc.dynamics import ReservoirConfig
from kuramoto_rc.ensemble import Gaussian
from kuramoto_rc.exceptions import ConfigError
from kuramoto_rc.tasks import TaskSpec, run_trial

# short windows keep the end-to-end runs quick
SHORT = ["--set", "task.stabilize=20", "--set", "task.train=5", "--set", "task.test=5", "--set", "n_oscillators=100"]


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_defaults_are_the_reference_settings():
    cfg = parse_config()
    res = cfg.reservoir()
    assert (res.n_oscillators, res.dt, res.input_gain, res.n_modes) == (500, 0.01, 0.01, 10)
    assert cfg["task.omega_hat"] == 0.5
    assert (cfg["task.stabilize"], cfg["task.train"], cfg["task.test"]) == (240.0, 30.0, 30.0)
    assert cfg["sweep.trials"] == 10
    assert cfg.task().t_end == 300.0


def test_flag_overrides_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nreservoir.coupling = 0.6\ndist.kind = uniform  # trailing\n")
    assert parse_config(path)["coupling"] == 0.6
    cfg = parse_config(path, {"coupling": "0.7"})
    assert cfg["reservoir.coupling"] == 0.7
    assert cfg["dist.kind"] == "uniform"
    assert read_config_file(path) == {"reservoir.coupling": "0.6", "dist.kind": "uniform"}


@pytest.mark.parametrize(
    "key,value,name",
    [
        ("dt", "-0.01", "reservoir.dt"),
        ("n_oscillators", "0", "reservoir.n_oscillators"),
        ("n_oscillators", "2.5", "reservoir.n_oscillators"),
        ("integrator", "rk45", "reservoir.integrator"),
        ("K_values", "0.5,nan", "sweep.K_values"),
        ("seed", "-1", "run.seed"),
    ],
)
def test_invalid_values_name_the_key(key, value, name):
    with pytest.raises(ConfigError) as info:
        parse_config(None, {key: value})
    assert info.value.key == name
    assert name in str(info.value)


def test_unknown_and_cross_field_errors():
    with pytest.raises(ConfigError):
        parse_config(None, {"reservoir.bogus": "1"})
    with pytest.raises(ConfigError):
        parse_config(None, {"dist.kind": "uniform", "dist.lo": "1", "dist.hi": "0"})
    with pytest.raises(ConfigError):
        parse_config(None, {"task.train": "0.005"})


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["simulate", "--out", str(tmp_path), "--set", "dt=-0.01"]) == 2
    assert "reservoir.dt" in capsys.readouterr().err
    assert main(["theory", "--out", str(tmp_path), "--set", "nope=1"]) == 2
    assert main(["render", "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("format_version = 1\n")
    assert main(["predict", "--out", str(tmp_path), "--weights", str(bad), "--series", str(bad)]) == 3
    with pytest.raises(SystemExit):
        main(["nosuchcommand"])


def test_resolved_config_records_run_metadata(tmp_path):
    out = tmp_path / "o"
    assert main(["theory", "--out", str(out), "--seed", "17", "--set", "sweep.K_values=0.5,0.7", "--n-modes", "3"]) == 0
    text = (out / "resolved_config").read_text()
    assert f"meta.version = {__version__}" in text
    assert "meta.rng_algorithm = numpy.random.PCG64" in text
    assert "run.seed = 17" in text
    # the echoed config is itself a valid config
    cfg = parse_config(out / "resolved_config")
    assert cfg["run.seed"] == 17 and cfg["reservoir.n_modes"] == 3
    assert set(cfg.values) == set(DEFAULTS)


def test_theory_grid_branches(tmp_path):
    grid = ",".join(f"{k:.2f}" for k in np.arange(0.5, 0.905, 0.01))
    assert main(["theory", "--out", str(tmp_path), "--set", f"sweep.K_values={grid}", "--n-modes", "2"]) == 0
    rows = _read(tmp_path / "theory.csv")
    assert rows[0] == ["K", "branch", "r_star", "c_0", "c_1", "c_2", "err_0", "err_1", "err_2"]
    for row in rows[1:]:
        K, c1 = float(row[0]), float(row[4])
        if K <= 0.63 + 1e-12:
            assert c1 == 0.0 and row[1] == "incoherent"
        elif K >= 0.64 - 1e-12:
            assert c1 > 0.0 and row[1] == "synchronized"
    assert len(rows) == 42


def test_train_predict_matches_run_trial(tmp_path):
    out = str(tmp_path)
    assert main(["simulate", "--out", out, "--seed", "0", *SHORT]) == 0
    assert main(["train", "--out", out, "--seed", "0", *SHORT]) == 0
    assert main(["predict", "--out", out, "--seed", "0", *SHORT]) == 0
    metrics = dict((r[0], float(r[1])) for r in _read(tmp_path / "metrics.csv")[1:])
    task = TaskSpec.prediction(0.5, 0.01, stabilize=20.0, train_window=5.0, test_window=5.0)
    ref = run_trial(task, ReservoirConfig(n_oscillators=100), Gaussian(0.5, 0.4), 0)
    assert metrics["train"] == pytest.approx(ref.train_mse, abs=1e-12)
    assert metrics["test"] == pytest.approx(ref.test_mse, abs=1e-12)
    header = _read(tmp_path / "series.csv")[0]
    assert header[:3] == ["t", "r0_re", "r0_im"] and len(header) == 23
    assert (tmp_path / "weights.txt").read_text().startswith("format_version = 1")


def _run_all(out, extra=()):
    out = str(out)
    common = ["--out", out, "--seed", "3", *SHORT, *extra]
    grid = ["--set", "sweep.K_values=0.6,0.7", "--set", "sweep.trials=2"]
    bif = ["--set", "sweep.t_end=20", "--set", "sweep.average=5"]
    for cmd in (["simulate"], ["train"], ["predict"], ["sweep", *grid], ["bifurcation", *grid, *bif], ["theory", *grid]):
        assert main([*cmd, *common]) == 0


def _files(out):
    return {name: (out / name).read_bytes() for name in sorted(os.listdir(out))}


def test_outputs_byte_identical_on_rerun(tmp_path):
    for sub in ("a", "b"):
        _run_all(tmp_path / sub)
    a, b = _files(tmp_path / "a"), _files(tmp_path / "b")
    assert a.keys() == b.keys()
    for name in a:
        if name == "resolved_config":
            # differs only in the output directory it records
            strip = lambda text: [ln for ln in text.splitlines() if not ln.startswith(b"run.out")]  # noqa: E731
            assert strip(a[name]) == strip(b[name])
        else:
            assert a[name] == b[name], name
    expected = {
        "series.csv",
        "weights.txt",
        "prediction.csv",
        "metrics.csv",
        "sweep_trials.csv",
        "sweep_aggregate.csv",
        "bifurcation_trials.csv",
        "bifurcation_aggregate.csv",
        "theory.csv",
        "resolved_config",
    }
    assert expected <= set(a)


def test_rerun_from_resolved_config(tmp_path):
    first = tmp_path / "first"
    assert main(["sweep", "--out", str(first), "--seed", "9", *SHORT, "--set", "sweep.K_values=0.7", "--set", "sweep.trials=2"]) == 0
    second = tmp_path / "second"
    assert main(["sweep", "--config", str(first / "resolved_config"), "--out", str(second)]) == 0
    for name in ("sweep_trials.csv", "sweep_aggregate.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_render_aggregate(tmp_path):
    out = str(tmp_path)
    args = ["sweep", "--out", out, *SHORT, "--set", "sweep.K_values=0.6,0.65,0.7", "--set", "sweep.trials=3"]
    assert main(args) == 0
    agg = tmp_path / "sweep_aggregate.csv"
    assert main(["render", "--input", str(agg), "--output", str(tmp_path / "a.svg")]) == 0
    assert main(["render", "--input", str(agg), "--output", str(tmp_path / "b.svg")]) == 0
    svg = (tmp_path / "a.svg").read_bytes()
    assert svg == (tmp_path / "b.svg").read_bytes()
    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    assert len(root.findall(f"{ns}polyline")) == 2
    bands = [p for p in root.findall(f"{ns}polygon") if p.get("class") == "band"]
    assert len(bands) == 2
    assert main(["render", "--input", str(tmp_path / "sweep_trials.csv")]) == 0
    assert (tmp_path / "sweep_trials.svg").exists()
