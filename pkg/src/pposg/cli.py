"""Command line entry point: train / eval / solve / play / serve / report.

Exit codes: 0 success, 2 config error, 3 numeric failure, 4 I/O error.
"""

from __future__ import annotations

import dataclasses
import json
import os
import subprocess
import sys

import click
import numpy as np

from .config import (ConfigError, EnvConfig, TrainConfig, apply_env_overrides,
                     config_hash, env_config_from_dict, train_config_from_dict,
                     train_config_to_dict)

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _build_id() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=5,
                             cwd=os.path.dirname(__file__))
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unversioned"


def _load_config(path: str | None) -> TrainConfig:
    if path is None:
        return train_config_from_dict(apply_env_overrides({}))
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    return train_config_from_dict(apply_env_overrides(raw))


def _scaled(config: TrainConfig, scale: float) -> TrainConfig:
    if scale == 1.0:
        return config
    return dataclasses.replace(
        config,
        episodes=max(1, int(config.episodes * scale)),
        replay_capacity=max(1000, int(config.replay_capacity * scale)),
        checkpoint_every=max(1, int(config.checkpoint_every * scale)),
        bimdn_warmup=max(1, int(config.bimdn_warmup * scale)),
        bimdn_buffer_capacity=max(1000, int(config.bimdn_buffer_capacity * scale)),
        update_warmup=max(1, int(config.update_warmup * scale)),
    )


def _write_manifest(out_dir: str, seed: int, scale: float, cfg_dict: dict) -> None:
    os.makedirs(out_dir, exist_ok=True)
    manifest = {"build_id": _build_id(), "config_hash": config_hash(cfg_dict),
                "seed": seed, "scale": scale}
    with open(os.path.join(out_dir, "run_manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


@click.group()
def main() -> None:
    """Pursuit-evasion game training, evaluation and serving."""


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Training config JSON (defaults to the full recipe).")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--scale", type=float, default=1.0, show_default=True,
              help="Multiplier on episode/buffer budgets for desk runs.")
def train(config_path, out_dir, seed, scale):
    """Train both agents and write checkpoints + metrics."""
    from .marl import train as run_train
    try:
        cfg = _scaled(_load_config(config_path), scale)
    except ConfigError as e:
        click.echo(f"config error: {e}", err=True)
        sys.exit(EXIT_CONFIG)
    _write_manifest(out_dir, seed, scale, train_config_to_dict(cfg))
    try:
        result = run_train(cfg, seed, out_dir)
    except FloatingPointError as e:
        click.echo(f"numeric failure: {e}", err=True)
        sys.exit(EXIT_NUMERIC)
    except OSError as e:
        click.echo(f"I/O error: {e}", err=True)
        sys.exit(EXIT_IO)
    click.echo(json.dumps(result, indent=2))


def _scripted_policy(name: str, agent: str, config: EnvConfig):
    from .policies import (GreedyEvaderPolicy, PurePursuitPolicy,
                           RandomWalkEvaderPolicy)
    table = {
        ("pure_pursuit", "pursuer"): lambda: PurePursuitPolicy(config),
        ("random_walk", "evader"): lambda: RandomWalkEvaderPolicy(),
        ("greedy", "evader"): lambda: GreedyEvaderPolicy(config),
    }
    try:
        return table[(name, agent)]()
    except KeyError:
        raise ConfigError(f"unknown scripted {agent} policy {name!r}")


def _checkpoint_policy(path: str, agent: str, config: EnvConfig, variant=None):
    from .marl import load_trained_ensemble
    from .policies import LearnedPolicy
    ensemble, train_cfg, _ = load_trained_ensemble(path)
    nets = ensemble.agents[agent]
    return LearnedPolicy(nets.actor, config, agent,
                         variant=variant or train_cfg.belief_variant,
                         bimdn=nets.bimdn,
                         history_length=train_cfg.history_length,
                         history_downsample=train_cfg.history_downsample)


@main.command("eval")
@click.option("--manifest", "manifest_path", type=click.Path(), required=True,
              help="JSON listing checkpoints and scripted policy names.")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--scale", type=float, default=1.0, show_default=True)
def eval_cmd(manifest_path, out_dir, seed, scale):
    """Round-robin evaluation; writes CSV + Markdown reports."""
    from .evaluation import emit_report_csv, emit_report_markdown, round_robin
    try:
        with open(manifest_path) as fh:
            manifest = json.load(fh)
        env_cfg = env_config_from_dict(manifest.get("env", {}))
        episodes = max(1, int(manifest.get("episodes_per_pair", 500) * scale))
        pursuers = {}
        for name in manifest.get("pursuers", []):
            pursuers[name] = _scripted_policy(name, "pursuer", env_cfg)
        for path in manifest.get("pursuer_checkpoints", []):
            pursuers[os.path.basename(path)] = _checkpoint_policy(path, "pursuer", env_cfg)
        evaders = {}
        for name in manifest.get("evaders", []):
            evaders[name] = _scripted_policy(name, "evader", env_cfg)
        for path in manifest.get("evader_checkpoints", []):
            evaders[os.path.basename(path)] = _checkpoint_policy(path, "evader", env_cfg)
        if not pursuers or not evaders:
            raise ConfigError("manifest needs at least one pursuer and one evader "
                              "(keys: pursuers, evaders, pursuer_checkpoints, "
                              "evader_checkpoints)")
    except (ConfigError, json.JSONDecodeError) as e:
        click.echo(f"config error: {e}", err=True)
        sys.exit(EXIT_CONFIG)
    except OSError as e:
        click.echo(f"I/O error: {e}", err=True)
        sys.exit(EXIT_IO)
    _write_manifest(out_dir, seed, scale, manifest)
    table = round_robin(pursuers, evaders, env_cfg, episodes, base_seed=seed)
    with open(os.path.join(out_dir, "report.csv"), "w") as fh:
        fh.write(emit_report_csv(table))
    with open(os.path.join(out_dir, "report.md"), "w") as fh:
        fh.write(emit_report_markdown(table))
    click.echo(os.path.join(out_dir, "report.md"))


@main.command()
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--bound", type=float, default=6.0, show_default=True)
@click.option("--cell", type=float, default=0.1, show_default=True)
@click.option("--dt", type=float, default=0.05, show_default=True)
@click.option("--capture-radius", type=float, default=0.5, show_default=True)
@click.option("--pursuer-speed", type=float, default=2.0, show_default=True)
@click.option("--evader-speed", type=float, default=1.0, show_default=True)
@click.option("--horizon", type=float, default=20.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def solve(out_dir, bound, cell, dt, capture_radius, pursuer_speed,
          evader_speed, horizon, seed):
    """Solve the relative-state grid game; writes the value grid + CSV slice."""
    from .solver import GameGrid, save_value_grid, value_iteration, value_slice_csv
    try:
        grid = GameGrid(bound=bound, cell=cell, dt=dt, capture_radius=capture_radius,
                        pursuer_speed=pursuer_speed, evader_speed=evader_speed,
                        horizon=horizon)
    except ValueError as e:
        click.echo(f"config error: {e}", err=True)
        sys.exit(EXIT_CONFIG)
    _write_manifest(out_dir, seed, 1.0, grid.descriptor())
    value = value_iteration(grid, report_gap=True)
    save_value_grid(os.path.join(out_dir, "value_grid.pposg"), value)
    with open(os.path.join(out_dir, "value_slice.csv"), "w") as fh:
        fh.write(value_slice_csv(value))
    click.echo(json.dumps({"converged": value.converged, "sweeps": value.sweeps,
                           "minmax_maxmin_gap": value.minmax_maxmin_gap}))


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--pursuer", default="pure_pursuit", show_default=True)
@click.option("--evader", default="random_walk", show_default=True)
@click.option("--episodes", type=int, default=10, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
def play(config_path, pursuer, evader, episodes, out_dir, seed):
    """Run headless scripted matches and write NDJSON logs + results."""
    from .evaluation import capture_stats, run_match
    try:
        cfg = _load_config(config_path).env
        p = _scripted_policy(pursuer, "pursuer", cfg)
        e = _scripted_policy(evader, "evader", cfg)
    except ConfigError as err:
        click.echo(f"config error: {err}", err=True)
        sys.exit(EXIT_CONFIG)
    _write_manifest(out_dir, seed, 1.0, {"pursuer": pursuer, "evader": evader})
    results = [run_match(p, e, cfg, seed + k, pursuer, evader)
               for k in range(episodes)]
    stats = capture_stats(results)
    with open(os.path.join(out_dir, "results.ndjson"), "w") as fh:
        for r in results:
            fh.write(json.dumps({"winner": r.winner, "capture_index": r.capture_index,
                                 "seed": r.seed}) + "\n")
    click.echo(json.dumps({"capture_rate": stats.capture_rate,
                           "mean_time": stats.mean_time}))


@main.command()
@click.option("--bind", default="127.0.0.1:8765", show_default=True)
@click.option("--lockstep", is_flag=True, default=False,
              help="Tick per action message instead of the 10 Hz wall clock.")
def serve(bind, lockstep):
    """Run the live arena WebSocket service."""
    from .arena import serve as run_serve
    run_serve(bind=bind, lockstep=lockstep)


@main.command()
@click.option("--table", "table_path", type=click.Path(), required=True,
              help="report.csv produced by `pposg eval`.")
@click.option("--out", "out_path", type=click.Path(), required=True)
def report(table_path, out_path):
    """Re-render a CSV report as the Markdown grid."""
    from .evaluation import CellStats, MatchTable, emit_report_markdown
    try:
        with open(table_path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as e:
        click.echo(f"I/O error: {e}", err=True)
        sys.exit(EXIT_IO)
    table = MatchTable(pursuers=[], evaders=[])
    for ln in lines[1:]:
        e, p, mt, st, cr, n = ln.split(",")
        if p not in table.pursuers:
            table.pursuers.append(p)
        if e not in table.evaders:
            table.evaders.append(e)
        table.cells[(p, e)] = CellStats(float(mt), float(st), float(cr), int(n))
    with open(out_path, "w") as fh:
        fh.write(emit_report_markdown(table))
    click.echo(out_path)


if __name__ == "__main__":
    main()
