import json
import subprocess
import sys
from pathlib import Path

import pytest

from conftest import BENCH
from loft.cli import main
from loft.speclang import parse_params


def run_cli(*args):
    return main([str(a) for a in args])


def test_solve_writes_verified_solution(tmp_path, capsys):
    code = run_cli("solve", BENCH / "knapsack.spec", BENCH / "knapsack_tiny.param",
                   "--seed", 2, "--eval-limit", 6000, "--out", tmp_path)
    assert code == 0
    out = capsys.readouterr().out
    assert "solution verified" in out
    sol = tmp_path / "knapsack_knapsack_tiny_seed2.solution"
    assert sol.exists()
    parsed = parse_params(sol.read_text())
    assert "picked" in parsed
    traj = tmp_path / "knapsack_knapsack_tiny_seed2.trajectory.jsonl"
    records = [json.loads(line) for line in traj.read_text().splitlines()]
    assert records and set(records[0]) == {"elapsed_ms", "evaluations",
                                           "violation", "objective"}


def test_malformed_param_exits_1_without_artifacts(tmp_path):
    bad = tmp_path / "bad.param"
    bad.write_text("letting capacity be be 10\n")
    out = tmp_path / "artifacts"
    code = run_cli("solve", BENCH / "knapsack.spec", bad, "--out", out)
    assert code == 1
    assert not out.exists() or not list(out.iterdir())


def test_unsatisfiable_instance_exits_20(tmp_path):
    spec = tmp_path / "unsat.spec"
    spec.write_text("find x : int(1..3)\nsuch that x >= 9\n")
    code = run_cli("solve", spec, "--eval-limit", 2000, "--out", tmp_path)
    assert code == 20


def test_deterministic_trajectories_byte_identical(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    for out in (out1, out2):
        code = run_cli("solve", BENCH / "sonet.spec", BENCH / "sonet_micro.param",
                       "--seed", 7, "--eval-limit", 4000, "--out", out)
        assert code == 0
    t1 = (out1 / "sonet_sonet_micro_seed7.trajectory.jsonl").read_bytes()
    t2 = (out2 / "sonet_sonet_micro_seed7.trajectory.jsonl").read_bytes()
    assert t1 == t2
    s1 = (out1 / "sonet_sonet_micro_seed7.solution").read_bytes()
    s2 = (out2 / "sonet_sonet_micro_seed7.solution").read_bytes()
    assert s1 == s2


def test_multiple_runs_write_per_run_artifacts(tmp_path):
    code = run_cli("solve", BENCH / "knapsack.spec", BENCH / "knapsack_tiny.param",
                   "--seed", 0, "--runs", 3, "--eval-limit", 1500, "--out", tmp_path)
    assert code == 0
    for seed in range(3):
        assert (tmp_path / f"knapsack_knapsack_tiny_seed{seed}.solution").exists()


def test_list_neighbourhoods(capsys):
    code = run_cli("solve", BENCH / "sonet.spec", BENCH / "sonet_micro.param",
                   "--list-neighbourhoods")
    assert code == 0
    out = capsys.readouterr().out
    assert "network: SetLiftMultiple_SetMove" in out
    assert out.count("network:") == 8


def test_dump_tree_is_json(capsys):
    code = run_cli("solve", BENCH / "sonet.spec", BENCH / "sonet_micro.param",
                   "--dump-tree", "--seed", 1)
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert isinstance(data, list)
    assert {"id", "op", "value", "depth", "defined"} <= set(data[0])
    assert any("violation" in node for node in data)


def test_score_command_emits_csv(tmp_path, capsys):
    t1 = tmp_path / "a.jsonl"
    t1.write_text(json.dumps({"elapsed_ms": 1000, "evaluations": 5,
                              "violation": 0, "objective": 9}) + "\n")
    t2 = tmp_path / "b.jsonl"
    t2.write_text(json.dumps({"elapsed_ms": 3000, "evaluations": 5,
                              "violation": 0, "objective": 9}) + "\n")
    manifest = tmp_path / "manifest.csv"
    manifest.write_text(f"fast,i1,1,{t1}\nslow,i1,1,{t2}\n")
    code = run_cli("score", manifest, "--time-limit", 4, "--direction", "min")
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("solver,time_limit,score")
    assert "fast,4,0.75" in out and "slow,4,0.25" in out


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "loft", "solve",
         str(BENCH / "knapsack.spec"), str(BENCH / "knapsack_tiny.param"),
         "--eval-limit", "400", "--out", "/tmp/loft_cli_test"],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode in (0, 20)
    assert "seed 0:" in proc.stdout
