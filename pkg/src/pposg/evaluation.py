"""Match runner, checkpoint tournament, capture statistics and reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import EnvConfig
from .policies import Policy
from .sim import PursuitEvasionEnv


@dataclass(frozen=True)
class EpisodeResult:
    winner: str                 # "pursuer" | "evader"
    capture_index: int          # decision index of capture, or the timeout T
    timeout: int
    seed: int
    pursuer_id: str = ""
    evader_id: str = ""

    def __post_init__(self):
        if self.winner not in ("pursuer", "evader"):
            raise ValueError("winner must be pursuer or evader")
        if self.capture_index > self.timeout:
            raise ValueError("capture index cannot exceed the timeout")

    @property
    def normalized_time(self) -> float:
        return self.capture_index / self.timeout


@dataclass
class CellStats:
    mean_time: float
    std_time: float
    capture_rate: float
    episodes: int


def run_match(pursuer: Policy, evader: Policy, config: EnvConfig, seed: int,
              pursuer_id: str = "", evader_id: str = "") -> EpisodeResult:
    """One deterministic episode; exploration noise must be off."""
    env = PursuitEvasionEnv(config)
    rng = np.random.default_rng(seed)
    pursuer.reset(seed)
    evader.reset(seed + 1)
    res = env.reset(rng)
    while True:
        a_p = pursuer.act(res.obs_p)
        a_e = evader.act(res.obs_e)
        res = env.step(a_p, a_e)
        if res.terminal:
            break
    if res.cause == "capture":
        return EpisodeResult("pursuer", res.state.t, config.timeout, seed,
                             pursuer_id, evader_id)
    return EpisodeResult("evader", config.timeout, config.timeout, seed,
                         pursuer_id, evader_id)


def capture_stats(results: list[EpisodeResult]) -> CellStats:
    """Normalized mean/std time-to-capture and capture rate.

    Timeout episodes contribute a normalized time of 1.0 and count as
    non-captures.
    """
    if not results:
        return CellStats(math.nan, math.nan, math.nan, 0)
    times = np.array([r.normalized_time for r in results])
    captures = sum(1 for r in results if r.winner == "pursuer")
    return CellStats(mean_time=float(times.mean()),
                     std_time=float(times.std()),
                     capture_rate=captures / len(results),
                     episodes=len(results))


def two_proportion_ztest(x1: int, n1: int, x2: int, n2: int) -> tuple[float, float]:
    """Pooled two-proportion z statistic and two-sided normal p-value."""
    if min(n1, n2) <= 0:
        raise ValueError("sample sizes must be positive")
    p1, p2 = x1 / n1, x2 / n2
    pooled = (x1 + x2) / (n1 + n2)
    denom = math.sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2))
    if denom == 0.0:
        return 0.0, 1.0
    z = (p1 - p2) / denom
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return z, p


SIGNIFICANCE_LEVEL = 0.05


@dataclass
class MatchTable:
    pursuers: list[str]
    evaders: list[str]
    cells: dict[tuple[str, str], CellStats] = field(default_factory=dict)

    def row(self, evader: str) -> dict[str, CellStats]:
        return {p: self.cells[(p, evader)] for p in self.pursuers
                if (p, evader) in self.cells}


def round_robin(pursuers: dict[str, Policy], evaders: dict[str, Policy],
                config: EnvConfig, episodes_per_pair: int,
                base_seed: int = 0) -> MatchTable:
    """Play every pursuer against every evader over fixed per-pair seeds."""
    table = MatchTable(pursuers=list(pursuers), evaders=list(evaders))
    for pi, (p_name, p_pol) in enumerate(pursuers.items()):
        for ei, (e_name, e_pol) in enumerate(evaders.items()):
            results = [run_match(p_pol, e_pol, config,
                                 base_seed + 7919 * (pi * len(evaders) + ei) + k,
                                 p_name, e_name)
                       for k in range(episodes_per_pair)]
            table.cells[(p_name, e_name)] = capture_stats(results)
    return table


def tournament(checkpoint_policies: dict[str, dict[str, Policy]],
               config: EnvConfig, episodes_per_pair: int,
               opponents: int = 32, base_seed: int = 0,
               rng: np.random.Generator | None = None) -> dict:
    """One-vs-N round robin over checkpoints.

    Every checkpoint's pursuer plays ``opponents`` uniformly sampled
    checkpoint evaders (with replacement). Best pursuer maximizes mean
    capture rate, best evader minimizes the opponents' rate; ties break
    toward the later checkpoint.
    """
    rng = rng or np.random.default_rng(base_seed)
    names = list(checkpoint_policies)
    pursuer_rate: dict[str, float] = {}
    evader_rate: dict[str, list[float]] = {n: [] for n in names}
    for i, name in enumerate(names):
        draw = [names[int(k)] for k in rng.integers(0, len(names), size=opponents)]
        rates = []
        for j, opp in enumerate(draw):
            results = [run_match(checkpoint_policies[name]["pursuer"],
                                 checkpoint_policies[opp]["evader"], config,
                                 base_seed + 104729 * (i * opponents + j) + k,
                                 name, opp)
                       for k in range(episodes_per_pair)]
            rate = capture_stats(results).capture_rate
            rates.append(rate)
            evader_rate[opp].append(rate)
        pursuer_rate[name] = float(np.mean(rates))
    best_pursuer = max(enumerate(names),
                       key=lambda kv: (pursuer_rate[kv[1]], kv[0]))[1]
    mean_evader = {n: (float(np.mean(v)) if v else math.inf) for n, v in evader_rate.items()}
    best_evader = min(enumerate(names),
                      key=lambda kv: (mean_evader[kv[1]], -kv[0]))[1]
    return {"pursuer_rates": pursuer_rate, "evader_rates": mean_evader,
            "best_pursuer": best_pursuer, "best_evader": best_evader}


def _bold_mask(row: dict[str, CellStats]) -> dict[str, bool]:
    """Bold every pursuer statistically tied with the best one in a row."""
    if not row:
        return {}
    best = max(row, key=lambda p: row[p].capture_rate)
    bb = row[best]
    mask = {}
    for p, cell in row.items():
        if p == best:
            mask[p] = True
            continue
        _, pval = two_proportion_ztest(
            round(cell.capture_rate * cell.episodes), cell.episodes,
            round(bb.capture_rate * bb.episodes), bb.episodes)
        mask[p] = pval > SIGNIFICANCE_LEVEL
    return mask


def emit_report_csv(table: MatchTable) -> str:
    lines = ["evader,pursuer,mean_time,std_time,capture_rate,episodes"]
    for e in table.evaders:
        for p in table.pursuers:
            c = table.cells.get((p, e))
            if c is None:
                continue
            lines.append(f"{e},{p},{c.mean_time:.4f},{c.std_time:.4f},"
                         f"{c.capture_rate:.4f},{c.episodes}")
    return "\n".join(lines) + "\n"


def emit_report_markdown(table: MatchTable) -> str:
    """Markdown grid, statistically tied best pursuers per row in bold."""
    header = "| Evader | " + " | ".join(table.pursuers) + " |"
    sep = "|" + "---|" * (len(table.pursuers) + 1)
    lines = [header, sep]
    for e in table.evaders:
        row = table.row(e)
        bold = _bold_mask(row)
        cells = []
        for p in table.pursuers:
            c = row.get(p)
            if c is None:
                cells.append("-")
                continue
            text = f"{c.mean_time:.2f} (σ={c.std_time:.2f}) / {c.capture_rate:.2f}"
            cells.append(f"**{text}**" if bold.get(p) else text)
        lines.append("| " + e + " | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
