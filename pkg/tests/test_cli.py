"""Benchmark CLI: subcommands, formats, reproducibility, exit codes."""

import json
import subprocess
import sys

import numpy as np
import pytest

from semipar.cli import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_OK,
    ExperimentConfig,
    TrialRecord,
    gen_keys,
    main,
    tail_report,
)


def run_cli(args):
    return main(list(args))


# ---------------------------------------------------------------------------
# Key generation


@pytest.mark.parametrize("dist", ["uniform", "zipf", "all_equal", "all_distinct"])
def test_gen_keys_distributions(dist):
    r = gen_keys(dist, 1000, seed=3)
    assert len(r) == 1000
    if dist == "all_equal":
        assert len(np.unique(r.keys)) == 1
    if dist == "all_distinct":
        assert len(np.unique(r.keys)) == 1000


def test_gen_keys_deterministic():
    a = gen_keys("zipf", 500, seed=7, theta=1.2)
    b = gen_keys("zipf", 500, seed=7, theta=1.2)
    assert np.array_equal(a.keys, b.keys)


def test_zipf_is_skewed():
    r = gen_keys("zipf", 20_000, seed=1, theta=1.2)
    _, counts = np.unique(r.keys, return_counts=True)
    assert counts.max() > 50 * counts.mean()


# ---------------------------------------------------------------------------
# Config


def test_config_validation():
    from semipar.cli import ConfigError

    with pytest.raises(ConfigError):
        ExperimentConfig("semisort", trials=0).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig("semisort", dist="nope").validate()
    with pytest.raises(ConfigError):
        ExperimentConfig("semisort", fmt="xml").validate()


def test_resolved_k_defaults_to_log_n():
    assert ExperimentConfig("mis", n=1 << 16).resolved_k() == 16
    assert ExperimentConfig("mis", n=1 << 16, k=3).resolved_k() == 3


def test_tail_report_summary():
    recs = [
        TrialRecord(trial=i, seed=i, n=1000, charged_work=1000 * (i + 1))
        for i in range(10)
    ]
    rep = tail_report(recs)
    assert rep["trials"] == 10
    assert rep["charged_work"]["max"] == 10_000
    assert rep["charged_work"]["mean"] == 5500


# ---------------------------------------------------------------------------
# End-to-end runs (in-process via main())


def test_semisort_csv_roundtrip(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code = run_cli(
        ["semisort", "--n", "4096", "--trials", "2", "--seed", "5", "--out", str(out)]
    )
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# ")
    header = json.loads(lines[0][2:])
    assert header["n"] == 4096 and header["trials"] == 2
    assert lines[1].split(",")[0] == "trial"
    assert len(lines) == 4
    assert all(row.endswith(",1") for row in lines[2:])  # verified column


def test_csv_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert run_cli(["semisort", "--n", "2048", "--trials", "3", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_json_format(tmp_path):
    out = tmp_path / "t.json"
    code = run_cli(
        ["mis", "--n", "500", "--m", "1500", "--trials", "1", "--format", "json",
         "--out", str(out)]
    )
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["config"]["algorithm"] == "mis"
    assert doc["trials"][0]["verified"] == 1


@pytest.mark.parametrize(
    "cmd,extra",
    [
        ("intsort", ["--n", "3000"]),
        ("placement", ["--n", "4096"]),
        ("partition", ["--n", "600", "--m", "2400", "--k", "3"]),
        ("color", ["--n", "500", "--m", "1500", "--k", "3"]),
    ],
)
def test_all_subcommands_pass(cmd, extra, tmp_path):
    out = tmp_path / "o.csv"
    assert run_cli([cmd, *extra, "--trials", "1", "--out", str(out)]) == EXIT_OK


def test_param_overrides_reach_semisort(tmp_path):
    out = tmp_path / "o.csv"
    code = run_cli(
        ["semisort", "--n", "4096", "--param", "K=4", "--param", "max_restarts=5",
         "--out", str(out)]
    )
    assert code == EXIT_OK
    header = json.loads(out.read_text().splitlines()[0][2:])
    assert header["semisort_params"]["K"] == 4
    assert header["semisort_params"]["max_restarts"] == 5


def test_config_file(tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("n = 2048\ntrials = 2\n# comment\nseed = 42\n")
    out = tmp_path / "o.csv"
    code = run_cli(["semisort", "--config", str(cfgfile), "--out", str(out)])
    assert code == EXIT_OK
    header = json.loads(out.read_text().splitlines()[0][2:])
    assert header["n"] == 2048 and header["trials"] == 2 and header["seed"] == 42


def test_cli_flag_beats_config_file(tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("n = 2048\n")
    out = tmp_path / "o.csv"
    assert run_cli(["semisort", "--config", str(cfgfile), "--n", "1024",
                    "--out", str(out)]) == EXIT_OK
    header = json.loads(out.read_text().splitlines()[0][2:])
    assert header["n"] == 1024


def test_bounds_subcommand(capsys):
    code = run_cli(["bounds", "--bound", "chernoff_upper",
                    "--param", "mu=100", "--param", "delta=0.5"])
    assert code == EXIT_OK
    import math

    printed = float(capsys.readouterr().out.strip())
    assert printed == pytest.approx(math.exp(-0.25 * 100 / 2.5))


def test_bounds_weights(capsys):
    code = run_cli(["bounds", "--bound", "weighted_geom",
                    "--weights", "1,2,3", "--param", "t=4"])
    assert code == EXIT_OK


def test_bounds_bad_params():
    assert run_cli(["bounds", "--bound", "chernoff_upper",
                    "--param", "mu=-5", "--param", "delta=0.5"]) == EXIT_CONFIG


def test_exit_code_config_error():
    assert run_cli(["semisort", "--trials", "0"]) == EXIT_CONFIG


def test_exit_code_io_error(tmp_path):
    assert run_cli(["semisort", "--n", "1024",
                    "--out", str(tmp_path / "no_dir" / "x.csv")]) == EXIT_IO


def test_installed_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "semipar.cli", "semisort", "--n", "1024"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "trial,seed" in proc.stdout
