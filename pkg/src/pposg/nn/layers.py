"""Network building blocks: fully connected stacks and a bidirectional LSTM.

Parameters live in an ordered dict so checkpoints and optimizers can
address them by name. Initialization is uniform in +-1/sqrt(fan_in);
LSTM forget-gate biases start at 1.0.
"""

from __future__ import annotations

import numpy as np

from .tensor import Tensor, concat


class Module:
    """Named-parameter container."""

    def __init__(self):
        self.params: dict[str, Tensor] = {}

    def _add(self, name: str, array: np.ndarray, dtype) -> Tensor:
        t = Tensor.param(array, dtype=dtype)
        self.params[name] = t
        return t

    def parameters(self) -> dict[str, Tensor]:
        return self.params

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()

    def load_state(self, arrays: dict[str, np.ndarray]) -> None:
        for name, p in self.params.items():
            if name not in arrays:
                raise KeyError(f"missing parameter {name!r}")
            if arrays[name].shape != p.data.shape:
                raise ValueError(f"shape mismatch for {name!r}")
            p.data = np.asarray(arrays[name], dtype=p.data.dtype)

    def state(self) -> dict[str, np.ndarray]:
        return {k: v.data.copy() for k, v in self.params.items()}


def _uniform_init(rng: np.random.Generator, fan_in: int, shape) -> np.ndarray:
    bound = 1.0 / np.sqrt(max(fan_in, 1))
    return rng.uniform(-bound, bound, size=shape)


class Linear(Module):
    def __init__(self, in_features: int, out_features: int,
                 rng: np.random.Generator, dtype=np.float32, prefix: str = ""):
        super().__init__()
        self.w = self._add(prefix + "w", _uniform_init(rng, in_features, (in_features, out_features)), dtype)
        self.b = self._add(prefix + "b", _uniform_init(rng, in_features, (out_features,)), dtype)

    def __call__(self, x: Tensor) -> Tensor:
        return x @ self.w + self.b


class MLP(Module):
    """Fully connected net with ReLU hidden layers.

    output_activation: "tanh" | "identity".
    """

    def __init__(self, in_features: int, hidden: list[int], out_features: int,
                 rng: np.random.Generator, output_activation: str = "identity",
                 dtype=np.float32):
        super().__init__()
        sizes = [in_features] + list(hidden) + [out_features]
        self.layers: list[Linear] = []
        for i, (fi, fo) in enumerate(zip(sizes[:-1], sizes[1:])):
            layer = Linear(fi, fo, rng, dtype=dtype, prefix=f"fc{i}.")
            self.layers.append(layer)
            self.params.update(layer.params)
        if output_activation not in ("tanh", "identity"):
            raise ValueError(f"unknown output activation {output_activation!r}")
        self.output_activation = output_activation
        self.in_features = in_features

    def __call__(self, x: Tensor) -> Tensor:
        if x.data.shape[-1] != self.in_features:
            raise ValueError(
                f"input width {x.data.shape[-1]} != expected {self.in_features}")
        h = x
        for layer in self.layers[:-1]:
            h = layer(h).relu()
        out = self.layers[-1](h)
        if self.output_activation == "tanh":
            out = out.tanh()
        return out


class LSTMCell(Module):
    """Standard LSTM cell (input/forget/cell/output gate order)."""

    def __init__(self, in_features: int, hidden: int, rng: np.random.Generator,
                 dtype=np.float32, prefix: str = ""):
        super().__init__()
        self.hidden = hidden
        self.wx = self._add(prefix + "wx", _uniform_init(rng, in_features, (in_features, 4 * hidden)), dtype)
        self.wh = self._add(prefix + "wh", _uniform_init(rng, hidden, (hidden, 4 * hidden)), dtype)
        bias = _uniform_init(rng, hidden, (4 * hidden,))
        bias[hidden:2 * hidden] = 1.0  # forget gate bias
        self.b = self._add(prefix + "b", bias, dtype)

    def __call__(self, x: Tensor, h: Tensor, c: Tensor) -> tuple[Tensor, Tensor]:
        gates = x @ self.wx + h @ self.wh + self.b
        H = self.hidden
        i = gates[:, 0 * H:1 * H].sigmoid()
        f = gates[:, 1 * H:2 * H].sigmoid()
        g = gates[:, 2 * H:3 * H].tanh()
        o = gates[:, 3 * H:4 * H].sigmoid()
        c_new = f * c + i * g
        h_new = o * c_new.tanh()
        return h_new, c_new


class BiLSTM(Module):
    """One bidirectional LSTM layer over a padded batch of sequences.

    Only the first ``valid_length`` frames of each sequence are processed,
    so padded tail frames can never leak into the outputs. The summary
    feature is [last valid forward state, backward state at frame 0],
    width 2*hidden.
    """

    def __init__(self, in_features: int, hidden: int, rng: np.random.Generator,
                 dtype=np.float32):
        super().__init__()
        self.hidden = hidden
        self.fwd = LSTMCell(in_features, hidden, rng, dtype=dtype, prefix="fwd.")
        self.bwd = LSTMCell(in_features, hidden, rng, dtype=dtype, prefix="bwd.")
        self.params.update(self.fwd.params)
        self.params.update(self.bwd.params)
        self.dtype = dtype

    def _run(self, cell: LSTMCell, frames: list[Tensor], batch: int) -> list[Tensor]:
        h = Tensor(np.zeros((batch, self.hidden)), dtype=self.dtype)
        c = Tensor(np.zeros((batch, self.hidden)), dtype=self.dtype)
        outputs = []
        for x in frames:
            h, c = cell(x, h, c)
            outputs.append(h)
        return outputs

    def summary(self, sequence: Tensor, valid_length: int) -> Tensor:
        """Aggregate a (B, L, F) batch, all rows sharing one valid_length."""
        B, L, _ = sequence.data.shape
        if valid_length < 1 or valid_length > L:
            raise ValueError(f"valid_length {valid_length} out of range 1..{L}")
        frames = [sequence[:, t, :] for t in range(valid_length)]
        fwd_states = self._run(self.fwd, frames, B)
        bwd_states = self._run(self.bwd, frames[::-1], B)
        return concat([fwd_states[-1], bwd_states[-1]], axis=1)

    def outputs(self, sequence: Tensor, valid_length: int) -> list[Tensor]:
        """Per-frame (B, 2*hidden) features over the valid prefix."""
        B, L, _ = sequence.data.shape
        if valid_length < 1 or valid_length > L:
            raise ValueError(f"valid_length {valid_length} out of range 1..{L}")
        frames = [sequence[:, t, :] for t in range(valid_length)]
        fwd_states = self._run(self.fwd, frames, B)
        bwd_states = self._run(self.bwd, frames[::-1], B)[::-1]
        return [concat([f, b], axis=1) for f, b in zip(fwd_states, bwd_states)]
