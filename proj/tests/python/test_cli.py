import json
import os
import shutil
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("ELASTNTD_CLI")
CONFIG_DIR = Path(os.environ.get("ELASTNTD_CONFIG_DIR", "configs"))

pytestmark = pytest.mark.skipif(CLI is None or not Path(CLI).exists(),
                                reason="CLI binary not provided")


def run(args, cwd):
    return subprocess.run([CLI, *args], cwd=cwd, capture_output=True, text=True)


@pytest.fixture()
def workdir(tmp_path):
    return tmp_path


def reference_config(tmp_path, **overrides):
    cfg = json.loads((CONFIG_DIR / "reference.json").read_text())
    for dotted, value in overrides.items():
        node = cfg
        keys = dotted.split(".")
        for key in keys[:-1]:
            node = node[key]
        node[keys[-1]] = value
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


def single_run_dir(workdir):
    runs = list((workdir / "runs").iterdir())
    assert len(runs) == 1
    return runs[0]


def test_forward_zero_load(workdir):
    cfg = reference_config(workdir, forward_load="zero")
    r = run(["forward", "--config", str(cfg)], workdir)
    assert r.returncode == 0, r.stderr
    body = (single_run_dir(workdir) / "displacement.csv").read_text()
    values = [line.split(",")[1:] for line in body.splitlines()[1:]]
    assert all(float(v) == 0.0 for row in values for v in row)


def test_forward_corner_load(workdir):
    cfg = reference_config(workdir)
    r = run(["forward", "--config", str(cfg)], workdir)
    assert r.returncode == 0, r.stderr
    summary = json.loads((single_run_dir(workdir) / "summary.json").read_text())
    assert summary["max_displacement"] > 0


def test_bad_config_exits_2(workdir):
    cfg = reference_config(workdir)
    data = json.loads(cfg.read_text())
    data["material"]["a"] = 3.0  # a >= b
    cfg.write_text(json.dumps(data))
    r = run(["construct", "--config", str(cfg)], workdir)
    assert r.returncode == 2
    r = run(["mono", "--config", str(workdir / "missing.json")], workdir)
    assert r.returncode == 2
    r = run(["sweep"], workdir)
    assert r.returncode == 2
    shallow = reference_config(workdir, **{"probe.levels": 1})
    r = run(["locpot", "--config", str(shallow)], workdir)
    assert r.returncode == 2
    overlapping = reference_config(workdir, **{"probe.d1_cells": [5], "probe.d2_cells": [5]})
    r = run(["locpot", "--config", str(overlapping)], workdir)
    assert r.returncode == 2
    assert "overlap" in r.stderr


def test_mono_passes_and_is_deterministic(workdir):
    cfg = reference_config(workdir, **{"sweep.n_pairs": 3, "sweep.n_loads": 2})
    r = run(["mono", "--config", str(cfg)], workdir)
    assert r.returncode == 0, r.stderr
    run_dir = single_run_dir(workdir)
    first = (run_dir / "mono_rho.csv").read_bytes(), (run_dir / "mono_full.csv").read_bytes()
    r = run(["mono", "--config", str(cfg)], workdir)
    assert r.returncode == 0
    second = (run_dir / "mono_rho.csv").read_bytes(), (run_dir / "mono_full.csv").read_bytes()
    assert first == second


def test_construct_resumes_and_sweep_clears_alpha(workdir):
    cfg = reference_config(workdir, **{"sweep.n_pairs": 10})
    r = run(["construct", "--config", str(cfg)], workdir)
    assert r.returncode == 0, r.stderr
    assert r.stdout.startswith("alpha = ")
    run_dir = single_run_dir(workdir)
    loads = json.loads((run_dir / "probing_loads.json").read_text())
    assert len(loads["loads"]) == 24
    stamp = (run_dir / "probing_loads.json").stat().st_mtime_ns

    # rerun: existing entries are reused
    r = run(["construct", "--config", str(cfg)], workdir)
    assert r.returncode == 0
    again = json.loads((run_dir / "probing_loads.json").read_text())
    assert again["loads"] == loads["loads"]

    r = run(["sweep", "--config", str(cfg), "--mode", "density"], workdir)
    assert r.returncode == 0, r.stderr
    summary = json.loads((run_dir / "summary.json").read_text())
    assert summary["pass"] is True
    assert summary["min_ratio"] >= summary["alpha"] * (1 - 1e-6)


def test_sweep_simultaneous_and_seed_override(workdir):
    cfg = reference_config(workdir, **{"sweep.n_pairs": 5})
    r = run(["sweep", "--config", str(cfg), "--mode", "simultaneous"], workdir)
    assert r.returncode == 0, r.stderr
    base = None
    for d in (workdir / "runs").iterdir():
        if (d / "sweep_simultaneous.csv").exists():
            base = (d / "sweep_simultaneous.csv").read_bytes()
    assert base is not None

    shutil.rmtree(workdir / "runs")
    r = run(["sweep", "--config", str(cfg), "--mode", "simultaneous"], workdir)
    assert r.returncode == 0
    second = None
    for d in (workdir / "runs").iterdir():
        if (d / "sweep_simultaneous.csv").exists():
            second = (d / "sweep_simultaneous.csv").read_bytes()
    assert second == base

    # a different seed lands in a different run directory (new config hash)
    r = run(["sweep", "--config", str(cfg), "--mode", "simultaneous", "--seed", "1"], workdir)
    assert r.returncode == 0
    assert len(list((workdir / "runs").iterdir())) == 2


def test_locpot_table(workdir):
    cfg_path = CONFIG_DIR / "locpot.json"
    cfg = json.loads(cfg_path.read_text())
    local = workdir / "locpot.json"
    local.write_text(json.dumps(cfg))
    r = run(["locpot", "--config", str(local)], workdir)
    assert r.returncode == 0, r.stderr
    run_dir = single_run_dir(workdir)
    lines = (run_dir / "locpot_levels.csv").read_text().splitlines()
    assert lines[0].startswith("level,n_loads")
    ratios = [float(line.split(",")[4]) for line in lines[1:]]
    assert len(ratios) >= 3
    assert all(ratios[i + 1] >= ratios[i] * (1 - 1e-9) for i in range(len(ratios) - 1))
    assert ratios[-1] > 100.0
    ray = (run_dir / "locpot_rayleigh.csv").read_text().splitlines()
    eps_ratio = [tuple(map(float, line.split(","))) for line in ray[1:]]
    assert eps_ratio[1][0] < eps_ratio[0][0]
    assert eps_ratio[1][1] > eps_ratio[0][1]
