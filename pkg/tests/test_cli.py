import json
import shutil
import subprocess

import pytest

from quotsing.cli import EXIT_FAILED, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE, main, verification_exit
from quotsing.tilt import GridReport


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze(capsys):
    code, out, _ = run(capsys, "analyze", "-g", "m=3:a=1,1,1")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert (doc["sl"], doc["small"], doc["isolated"]) == (True, True, True)
    code, out, _ = run(capsys, "analyze", "-g", "m=2:a=1,0")
    assert json.loads(out)["small"] is False


@pytest.mark.parametrize("argv", [
    ["analyze", "-g", "m=3:a=1;1"],
    ["analyze"],
    [],
    ["mckay", "-g", "m=3:a=1,1,1", "--which", "twisted"],
    ["ext", "-g", "m=3:a=1,1,1", "-X", "Q"],
    ["ext", "-g", "m=3:a=1,1,1", "-X", "Npi:p=7:i=1"],
    ["analyze", "-g", "m=4:a=2,2"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE and err.startswith("quotsing:")


def test_hilbert(capsys):
    code, out, _ = run(capsys, "hilbert", "-g", "m=3:a=1,1,1", "--degmax", "4")
    assert code == EXIT_OK
    assert json.loads(out) == {"0": [1, 0, 0, 10, 0], "1": [0, 3, 0, 0, 15], "2": [0, 0, 6, 0, 0]}


def test_mckay_dot_and_json(capsys):
    code, out, _ = run(capsys, "mckay", "-g", "m=3:a=1,1,1", "--format", "dot")
    assert code == EXIT_OK and out.startswith("digraph") and out.count("->") == 9
    code, out, _ = run(capsys, "mckay", "-g", "m=5:a=1,2,2", "--which", "stable")
    assert len(json.loads(out)["vertices"]) == 12


def test_endo(capsys):
    code, out, _ = run(capsys, "endo", "-g", "m=3:a=1,1,1", "--which", "U_stable", "--global-dimension")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["dim"] == 15 and doc["global_dimension"] == 1


def test_ext_local_duality(capsys):
    code, out, _ = run(capsys, "ext", "-g", "m=3:a=1,1,1", "-X", "k", "-Y", "R", "--twists=-6:3",
                       "--no-timestamp")
    doc = json.loads(out)
    assert code == EXIT_OK
    nonzero = [(c["n"], c["i"], c["dim"]) for c in doc["cells"] if c["dim"]]
    assert nonzero == [(3, -3, 1)]


def test_ext_window_limited_exit(capsys):
    code, _, _ = run(capsys, "ext", "-g", "m=3:a=1,1,1", "-X", "S:i=1", "-Y", "S:i=2", "--nmax", "2",
                     "--degmax", "3", "--no-timestamp")
    assert code == EXIT_INCONCLUSIVE


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify-tilting", "-g", "m=4:a=1,3", "--object", "T", "--no-timestamp")
    assert code == EXIT_OK and json.loads(out)["verdict"] == "TILTING"
    code, out, _ = run(capsys, "verify-tilting", "-g", "m=3:a=1,1,1", "--object", "T", "--no-timestamp")
    assert code == EXIT_OK and json.loads(out)["verdict"] == "SILTING"


def test_verification_exit_rule():
    cells = [{"n": 1, "dim": 2, "confidence": "conclusive"}]
    assert verification_exit(GridReport("U", "g", "NEITHER", cells, True), 3) == EXIT_FAILED
    cells = [{"n": -1, "dim": 2, "confidence": "conclusive"}]
    assert verification_exit(GridReport("T", "g", "SILTING", cells, True), 3) == EXIT_OK
    assert verification_exit(GridReport("T", "g", "SILTING", cells, False), 3) == EXIT_INCONCLUSIVE
    assert verification_exit(GridReport("U", "g", "SILTING", cells, True), 3) == EXIT_FAILED


def test_deterministic_output(capsys, tmp_path):
    argv = ["verify-tilting", "-g", "m=3:a=1,1,1", "--object", "U", "--no-timestamp"]
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    assert main(argv + ["-o", str(first)]) == EXIT_OK
    assert main(argv + ["-o", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    for cmd in (["endo", "-g", "m=5:a=1,2,2", "--which", "Utilde", "--basis"],
                ["mckay", "-g", "m=5:a=1,2,2", "--which", "folded", "--format", "dot"]):
        _, a, _ = run(capsys, *cmd)
        _, b, _ = run(capsys, *cmd)
        assert a == b


def test_config_merging(capsys, tmp_path):
    cfg = tmp_path / "q.toml"
    cfg.write_text('version = 1\ngroup = "m=3:a=1,1,1"\ndegmax = 4\n\n[mckay]\nwhich = "folded"\n')
    code, out, _ = run(capsys, "hilbert", "-c", str(cfg))
    assert code == EXIT_OK and json.loads(out)["1"] == [0, 3, 0, 0, 15]
    code, out, _ = run(capsys, "mckay", "-c", str(cfg))
    assert len(json.loads(out)["vertices"]) == 9
    # flags override the config
    code, out, _ = run(capsys, "mckay", "-c", str(cfg), "--which", "plain")
    assert len(json.loads(out)["vertices"]) == 3
    code, out, _ = run(capsys, "hilbert", "-c", str(cfg), "--degmax", "2")
    assert json.loads(out)["1"] == [0, 3, 0]


def test_config_group_table_and_version(capsys, tmp_path):
    cfg = tmp_path / "g.toml"
    cfg.write_text("version = 1\n[group]\ninvariant_factors = [5]\nweights = [[1], [2], [2]]\n")
    code, out, _ = run(capsys, "analyze", "-c", str(cfg))
    assert code == EXIT_OK and json.loads(out)["order"] == 5
    bad = tmp_path / "bad.toml"
    bad.write_text('version = 2\ngroup = "m=3:a=1,1,1"\n')
    assert run(capsys, "analyze", "-c", str(bad))[0] == EXIT_USAGE


@pytest.mark.skipif(shutil.which("quotsing") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["quotsing", "analyze", "-g", "m=5:a=1,2,2"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["order"] == 5
