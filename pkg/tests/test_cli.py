"""Command line interface: exit codes, determinism, scaling, manifests."""

import json
import os

import pytest
from click.testing import CliRunner

from pposg.cli import EXIT_CONFIG, main
from pposg.config import config_hash, train_config_to_dict, train_config_from_dict


@pytest.fixture()
def runner():
    return CliRunner()


def tiny_config_dict(**overrides) -> dict:
    cfg = {"episodes": 4, "num_envs": 2, "hidden_sizes": [8, 8],
           "belief_variant": "none", "replay_capacity": 2000,
           "batch_size": 16, "update_warmup": 32, "update_every": 4,
           "checkpoint_every": 2, "metrics_every_steps": 50,
           "env": {"x_low": -4.0, "x_high": 4.0, "y_low": -4.0, "y_high": 4.0,
                   "timeout": 25}}
    cfg.update(overrides)
    return cfg


def write_config(tmp_path, cfg) -> str:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return str(path)


# -- config errors ----------------------------------------------------------------

def test_missing_nested_key_exits_2_naming_the_path(runner, tmp_path):
    cfg = tiny_config_dict()
    cfg["env"]["pursuer"] = {"kind": "car"}  # sensor missing
    path = write_config(tmp_path, cfg)
    result = runner.invoke(main, ["train", "--config", path,
                                  "--out", str(tmp_path / "out")])
    assert result.exit_code == EXIT_CONFIG
    assert "pursuer.sensor" in result.output


def test_unknown_key_exits_2(runner, tmp_path):
    path = write_config(tmp_path, tiny_config_dict(episodez=5))
    result = runner.invoke(main, ["train", "--config", path,
                                  "--out", str(tmp_path / "out")])
    assert result.exit_code == EXIT_CONFIG
    assert "episodez" in result.output


def test_invalid_json_config_exits_2(runner, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    result = runner.invoke(main, ["train", "--config", str(path),
                                  "--out", str(tmp_path / "out")])
    assert result.exit_code == EXIT_CONFIG


def test_unknown_scripted_policy_exits_2(runner, tmp_path):
    result = runner.invoke(main, ["play", "--pursuer", "teleport",
                                  "--out", str(tmp_path / "out")])
    assert result.exit_code == EXIT_CONFIG
    assert "teleport" in result.output


# -- train ------------------------------------------------------------------------

def test_train_same_seed_byte_identical_metrics(runner, tmp_path):
    path = write_config(tmp_path, tiny_config_dict())
    for name in ("a", "b"):
        result = runner.invoke(main, ["train", "--config", path, "--seed", "7",
                                      "--out", str(tmp_path / name)])
        assert result.exit_code == 0, result.output
    assert (tmp_path / "a" / "metrics.csv").read_bytes() == \
           (tmp_path / "b" / "metrics.csv").read_bytes()


def test_train_scale_shrinks_budgets_and_stamps_manifest(runner, tmp_path):
    path = write_config(tmp_path, tiny_config_dict(episodes=20))
    result = runner.invoke(main, ["train", "--config", path, "--scale", "0.1",
                                  "--out", str(tmp_path / "s")])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["episodes"] == 2

    manifest = json.loads((tmp_path / "s" / "run_manifest.json").read_text())
    assert set(manifest) == {"build_id", "config_hash", "seed", "scale"}
    assert manifest["scale"] == 0.1
    assert manifest["seed"] == 0
    scaled = train_config_from_dict(tiny_config_dict(episodes=2))
    assert manifest["config_hash"] != config_hash(
        train_config_to_dict(train_config_from_dict(tiny_config_dict(episodes=20))))


def test_env_variable_overrides_config(runner, tmp_path):
    path = write_config(tmp_path, tiny_config_dict(episodes=20))
    result = runner.invoke(main, ["train", "--config", path,
                                  "--out", str(tmp_path / "e")],
                           env={"PPOSG_EPISODES": "2"})
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["episodes"] == 2


# -- solve ------------------------------------------------------------------------

def test_solve_writes_value_grid_and_slice(runner, tmp_path):
    result = runner.invoke(main, ["solve", "--out", str(tmp_path / "v"),
                                  "--bound", "3", "--cell", "0.25", "--dt", "0.1"])
    assert result.exit_code == 0, result.output
    out = json.loads(result.output.splitlines()[-1])
    assert out["converged"] is True
    assert (tmp_path / "v" / "value_grid.pposg").exists()
    slice_lines = (tmp_path / "v" / "value_slice.csv").read_text().splitlines()
    assert slice_lines[0] == "x,y,value"


def test_solve_bad_grid_exits_2(runner, tmp_path):
    result = runner.invoke(main, ["solve", "--out", str(tmp_path / "v"),
                                  "--bound", "0.01", "--cell", "1.0"])
    assert result.exit_code == EXIT_CONFIG


# -- play / eval / report ------------------------------------------------------------

def test_play_writes_results_ndjson(runner, tmp_path):
    path = write_config(tmp_path, tiny_config_dict())
    result = runner.invoke(main, ["play", "--config", path, "--episodes", "3",
                                  "--out", str(tmp_path / "p")])
    assert result.exit_code == 0, result.output
    lines = (tmp_path / "p" / "results.ndjson").read_text().splitlines()
    assert len(lines) == 3
    for line in lines:
        rec = json.loads(line)
        assert rec["winner"] in ("pursuer", "evader")
    summary = json.loads(result.output.splitlines()[-1])
    assert 0.0 <= summary["capture_rate"] <= 1.0


def test_eval_then_report_round_trip(runner, tmp_path):
    manifest = {"env": {"x_low": -4.0, "x_high": 4.0, "y_low": -4.0,
                        "y_high": 4.0, "timeout": 20},
                "episodes_per_pair": 20,
                "pursuers": ["pure_pursuit"],
                "evaders": ["random_walk", "greedy"]}
    mpath = tmp_path / "manifest.json"
    mpath.write_text(json.dumps(manifest))
    result = runner.invoke(main, ["eval", "--manifest", str(mpath),
                                  "--out", str(tmp_path / "r"),
                                  "--scale", "0.1"])
    assert result.exit_code == 0, result.output
    csv_lines = (tmp_path / "r" / "report.csv").read_text().splitlines()
    assert csv_lines[0] == "evader,pursuer,mean_time,std_time,capture_rate,episodes"
    assert len(csv_lines) == 3  # one row per (evader, pursuer) pair
    assert all(line.endswith(",2") for line in csv_lines[1:])  # 20 * 0.1

    rendered = runner.invoke(main, ["report", "--table",
                                    str(tmp_path / "r" / "report.csv"),
                                    "--out", str(tmp_path / "report.md")])
    assert rendered.exit_code == 0, rendered.output
    md = (tmp_path / "report.md").read_text()
    assert md.splitlines()[0].startswith("| Evader |")
    assert md == (tmp_path / "r" / "report.md").read_text()


def test_eval_empty_manifest_exits_2(runner, tmp_path):
    mpath = tmp_path / "manifest.json"
    mpath.write_text(json.dumps({"pursuers": []}))
    result = runner.invoke(main, ["eval", "--manifest", str(mpath),
                                  "--out", str(tmp_path / "r")])
    assert result.exit_code == EXIT_CONFIG
