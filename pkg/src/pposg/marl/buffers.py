"""FIFO replay buffer and the belief-network sample buffer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Transition:
    obs_p: np.ndarray          # stacked observation, pursuer
    obs_e: np.ndarray
    action_p: np.ndarray
    action_e: np.ndarray
    reward_p: float
    reward_e: float
    next_obs_p: np.ndarray
    next_obs_e: np.ndarray
    terminal: bool
    # privileged/belief extras (None when the variant does not need them)
    window_p: np.ndarray | None = None
    valid_p: int = 0
    window_e: np.ndarray | None = None
    valid_e: int = 0
    next_window_p: np.ndarray | None = None
    next_valid_p: int = 0
    next_window_e: np.ndarray | None = None
    next_valid_e: int = 0
    feat_p: np.ndarray | None = None   # stored features (ukf variant)
    feat_e: np.ndarray | None = None
    next_feat_p: np.ndarray | None = None
    next_feat_e: np.ndarray | None = None

    def __post_init__(self):
        if self.reward_p + self.reward_e != 0.0:
            raise ValueError("transitions must be zero-sum")


class ReplayBuffer:
    """Fixed-capacity FIFO ring with uniform sampling."""

    def __init__(self, capacity: int = 100000):
        if capacity <= 0:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._items: list[Transition | None] = [None] * capacity
        self._cursor = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    @property
    def cursor(self) -> int:
        return self._cursor

    def push(self, item: Transition) -> None:
        self._items[self._cursor] = item
        self._cursor = (self._cursor + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> list[Transition]:
        if self._size == 0:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(0, self._size, size=batch_size)
        return [self._items[i] for i in idx]


class BeliefBuffer:
    """Per-agent buffer of (history window, valid length, target position).

    Updates are gated behind a warm-up sample count.
    """

    def __init__(self, capacity: int = 25000, warmup: int = 10000):
        self.capacity = capacity
        self.warmup = warmup
        self._windows: list[tuple[np.ndarray, int, np.ndarray]] = []
        self._cursor = 0
        self.total_pushed = 0

    def __len__(self) -> int:
        return len(self._windows)

    @property
    def ready(self) -> bool:
        return self.total_pushed >= self.warmup

    def push(self, window: np.ndarray, valid: int, target: np.ndarray) -> None:
        item = (window, valid, np.asarray(target, dtype=np.float32))
        if len(self._windows) < self.capacity:
            self._windows.append(item)
        else:
            self._windows[self._cursor] = item
            self._cursor = (self._cursor + 1) % self.capacity
        self.total_pushed += 1

    def sample(self, batch_size: int, rng: np.random.Generator):
        idx = rng.integers(0, len(self._windows), size=batch_size)
        return [self._windows[i] for i in idx]
