"""Minimax backward induction for the fully observable point-capture game.

The game is reduced to the 2D relative state x = evader - pursuer with
velocity-controlled (single integrator) players. The value of a state is
the minimal time until |x| falls inside the capture radius when the
pursuer minimizes and the evader maximizes (pursuer commits first each
step). Evader-win regions carry a saturating +inf sentinel.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import map_coordinates

INF_SENTINEL = 1.0e6  # seconds; stands in for +inf during interpolation


def compass_actions(speed: float, include_zero: bool = True) -> np.ndarray:
    """8 unit compass directions at full speed, plus the zero action."""
    dirs = []
    if include_zero:
        dirs.append((0.0, 0.0))
    for k in range(8):
        a = k * math.pi / 4.0
        dirs.append((speed * math.cos(a), speed * math.sin(a)))
    return np.array(dirs)


@dataclass
class GameGrid:
    bound: float                 # relative-state box is [-bound, bound]^2
    cell: float
    dt: float
    capture_radius: float
    pursuer_speed: float
    evader_speed: float
    horizon: float = 20.0

    def __post_init__(self):
        self.n = int(round(2.0 * self.bound / self.cell)) + 1
        if self.n < 2:
            raise ValueError("grid needs at least 2 cells per axis")
        self.axis = np.linspace(-self.bound, self.bound, self.n)
        self.pursuer_actions = compass_actions(self.pursuer_speed)
        self.evader_actions = compass_actions(self.evader_speed)

    def descriptor(self) -> dict:
        return {"bound": self.bound, "cell": self.cell, "dt": self.dt,
                "capture_radius": self.capture_radius,
                "pursuer_speed": self.pursuer_speed,
                "evader_speed": self.evader_speed, "n": self.n}


@dataclass
class ValueGrid:
    grid: GameGrid
    values: np.ndarray           # (n, n), seconds; INF_SENTINEL = evader wins
    converged: bool = True
    sweeps: int = 0
    minmax_maxmin_gap: float = 0.0

    def interpolate(self, points: np.ndarray) -> np.ndarray:
        """Multilinear value lookup at (m, 2) relative states (clamped)."""
        g = self.grid
        coords = (np.asarray(points, dtype=np.float64) + g.bound) / g.cell
        coords = np.clip(coords, 0, g.n - 1)
        return map_coordinates(self.values, coords.T, order=1, mode="nearest")

    def value_at(self, point) -> float:
        return float(self.interpolate(np.asarray(point)[None, :])[0])


def _capture_mask(grid: GameGrid) -> np.ndarray:
    xx, yy = np.meshgrid(grid.axis, grid.axis, indexing="ij")
    return np.hypot(xx, yy) <= grid.capture_radius


def _pair_coords(grid: GameGrid, outer_actions, inner_actions, outer_is_min: bool):
    """Precomputed interpolation coordinates per (outer, inner) action pair."""
    xx, yy = np.meshgrid(grid.axis, grid.axis, indexing="ij")
    flat = np.stack([xx.ravel(), yy.ravel()], axis=1)
    table = []
    for u_out in outer_actions:
        row = []
        for u_in in inner_actions:
            drift = (u_in - u_out) if outer_is_min else (u_out - u_in)
            pts = flat + grid.dt * drift
            coords = np.clip((pts + grid.bound) / grid.cell, 0, grid.n - 1)
            row.append(np.ascontiguousarray(coords.T))
        table.append(row)
    return table


def _bellman_backup(grid: GameGrid, values: np.ndarray, coords_table,
                    outer_is_min: bool) -> np.ndarray:
    """One sweep of dt + opt_outer opt_inner interp(V, x + dt*(ue - up))."""
    outer_vals = []
    for row in coords_table:
        inner_vals = [map_coordinates(values, coords, order=1, mode="nearest")
                      for coords in row]
        stacked = np.stack(inner_vals)
        outer_vals.append(stacked.max(axis=0) if outer_is_min else stacked.min(axis=0))
    agg = np.stack(outer_vals)
    best = agg.min(axis=0) if outer_is_min else agg.max(axis=0)
    return np.minimum(grid.dt + best, INF_SENTINEL).reshape(grid.n, grid.n)


def value_iteration(grid: GameGrid, tol_factor: float = 1e-6,
                    report_gap: bool = False) -> ValueGrid:
    """Backward induction until the value change drops below tol_factor*dt
    or the horizon is exceeded (flagged as non-converged)."""
    capture = _capture_mask(grid)
    values = np.where(capture, 0.0, INF_SENTINEL)
    minmax_coords = _pair_coords(grid, grid.pursuer_actions, grid.evader_actions, True)
    max_sweeps = int(math.ceil(grid.horizon / grid.dt))
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        new = _bellman_backup(grid, values, minmax_coords, outer_is_min=True)
        new = np.where(capture, 0.0, new)
        new = np.minimum(new, values)  # monotone by construction; enforce exactly
        change = np.max(np.abs(np.where(values < INF_SENTINEL, values - new, 0.0)))
        stable_region = np.array_equal(new < INF_SENTINEL, values < INF_SENTINEL)
        values = new
        if stable_region and change < tol_factor * grid.dt:
            converged = True
            break
    gap = 0.0
    if report_gap:
        maxmin_coords = _pair_coords(grid, grid.evader_actions,
                                     grid.pursuer_actions, False)
        maxmin = _bellman_backup(grid, values, maxmin_coords, outer_is_min=False)
        maxmin = np.where(capture, 0.0, maxmin)
        finite = values < INF_SENTINEL
        gap = float(np.max(np.abs(np.where(finite, values - maxmin, 0.0))))
    return ValueGrid(grid=grid, values=values, converged=converged,
                     sweeps=sweeps, minmax_maxmin_gap=gap)


def extract_policy(value: ValueGrid, state) -> tuple[np.ndarray, np.ndarray]:
    """One-step-lookahead minimax actions at a relative state.

    Ties break toward the zero action first, then the lowest action index
    (the zero action is index 0 in both sets).
    """
    g = value.grid
    state = np.asarray(state, dtype=np.float64)
    best_p, best_p_val = None, None
    for u_p in g.pursuer_actions:
        worst = None
        for u_e in g.evader_actions:
            v = value.value_at(state + g.dt * (u_e - u_p))
            worst = v if worst is None else max(worst, v)
        if best_p_val is None or worst < best_p_val - 1e-12:
            best_p, best_p_val = u_p, worst
    best_e, best_e_val = None, None
    for u_e in g.evader_actions:
        v = value.value_at(state + g.dt * (u_e - best_p))
        if best_e_val is None or v > best_e_val + 1e-12:
            best_e, best_e_val = u_e, v
    return best_p, best_e


def analytic_pursuit_oracle(gap: float, v_p: float, v_e: float, radius: float) -> float:
    """Closed-form time-to-capture for straight-line pursuit."""
    if gap <= radius:
        return 0.0
    if v_p <= v_e:
        return math.inf
    return (gap - radius) / (v_p - v_e)


def save_value_grid(path: str, value: ValueGrid) -> None:
    from .nn.checkpoint import save_checkpoint
    save_checkpoint(path, {"values": value.values.astype(np.float64)},
                    meta={"grid": value.grid.descriptor(),
                          "converged": value.converged, "sweeps": value.sweeps})


def load_value_grid(path: str) -> ValueGrid:
    from .nn.checkpoint import load_checkpoint
    tensors, meta = load_checkpoint(path)
    d = meta["grid"]
    grid = GameGrid(bound=d["bound"], cell=d["cell"], dt=d["dt"],
                    capture_radius=d["capture_radius"],
                    pursuer_speed=d["pursuer_speed"], evader_speed=d["evader_speed"])
    return ValueGrid(grid=grid, values=tensors["values"],
                     converged=meta["converged"], sweeps=meta["sweeps"])


def value_slice_csv(value: ValueGrid) -> str:
    """CSV dump of the value surface for plotting (x, y, seconds)."""
    lines = ["x,y,value"]
    for i, x in enumerate(value.grid.axis):
        for j, y in enumerate(value.grid.axis):
            v = value.values[i, j]
            lines.append(f"{x:.4f},{y:.4f},{'inf' if v >= INF_SENTINEL else f'{v:.6f}'}")
    return "\n".join(lines) + "\n"
