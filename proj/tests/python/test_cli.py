import json
import os
import subprocess

import pytest

CLI = os.environ.get("NLSLAB_CLI", "")
pytestmark = pytest.mark.skipif(not CLI or not os.path.exists(CLI), reason="nlslab executable not available")


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("NLSLAB_OUTPUT_DIR", None)
    full_env.update(env or {})
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=full_env, timeout=300)


def test_groundstate_passes(tmp_path):
    out = tmp_path / "gs"
    p = run("groundstate", "--output_dir", str(out))
    assert p.returncode == 0, p.stdout + p.stderr
    summary = json.loads((out / "summary.json").read_text())
    assert summary["experiment"] == "groundstate"
    assert summary["status"] == "pass"
    assert (out / "profile.csv").exists()


def test_unknown_flag_and_bad_value(tmp_path):
    assert run("groundstate", "--no-such-flag").returncode == 2
    p = run("evolve", "--dt", "-1", "--output_dir", str(tmp_path / "x"))
    assert p.returncode == 2
    assert "dt" in p.stderr
    assert not (tmp_path / "x").exists()
    assert run().returncode == 2


def test_env_output_dir(tmp_path):
    out = tmp_path / "from_env"
    p = run("groundstate", env={"NLSLAB_OUTPUT_DIR": str(out)})
    assert p.returncode == 0, p.stderr
    assert (out / "summary.json").exists()


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    out = tmp_path / "cfg_out"
    cfg.write_text(f'output_dir = "{tmp_path / "ignored"}"\ndimension = 2\n[extra]\ntrials = 20\n')
    p = run("gn-sweep", "--config", str(cfg), "--output_dir", str(out))
    assert p.returncode == 0, p.stdout + p.stderr
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["dimension"] == 2
    assert summary["config"]["trials"] == 20
    assert not (tmp_path / "ignored").exists()


def test_malformed_config_file(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("dimension = 1\nbogus = 2\n")
    p = run("groundstate", "--config", str(cfg))
    assert p.returncode == 2
    assert "line 2" in p.stderr
