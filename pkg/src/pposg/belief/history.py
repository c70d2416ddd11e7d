"""Ring buffer of raw observations feeding the belief network.

Keeps the last ``length`` decision-step observations; the model input is
the history downsampled by ``downsample`` (oldest to newest), padded with
zero frames up to the fixed window plus a valid_length.
"""

from __future__ import annotations

from collections import deque

import numpy as np


class ObservationHistory:
    def __init__(self, obs_width: int, length: int = 200, downsample: int = 10):
        if length < 1 or downsample < 1:
            raise ValueError("length and downsample must be positive")
        self.obs_width = obs_width
        self.length = length
        self.downsample = downsample
        self.max_frames = length // downsample
        self._buf: deque[np.ndarray] = deque(maxlen=length)

    def reset(self) -> None:
        self._buf.clear()

    def push(self, obs: np.ndarray) -> None:
        if len(obs) != self.obs_width:
            raise ValueError("observation width mismatch")
        self._buf.append(np.asarray(obs, dtype=np.float32))

    def __len__(self) -> int:
        return len(self._buf)

    def window(self) -> tuple[np.ndarray, int]:
        """(max_frames, obs_width) float32 window and its valid length.

        Frames are every ``downsample``-th observation ending at the newest
        one, oldest first; unused leading slots are zero.
        """
        frames = list(self._buf)[::-1][::self.downsample][::-1]
        frames = frames[-self.max_frames:]
        valid = len(frames)
        out = np.zeros((self.max_frames, self.obs_width), dtype=np.float32)
        if valid:
            out[:valid] = np.stack(frames)
        return out, valid
