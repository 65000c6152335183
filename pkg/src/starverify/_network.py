"""In-memory feedforward model: Dense and ReLU layers.

Concrete forward evaluation lives here and doubles as the ground-truth
oracle for the reachability tests. Construction of a Network never raises
for a broken layer chain; `validate` reports every violation instead, so
malformed files can be diagnosed in one pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._exceptions import DimensionError
from ._validation import as_matrix, as_vector


@dataclass(frozen=True)
class DenseLayer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)

    def __post_init__(self):
        weights = as_matrix(self.weights, "weights")
        bias = as_vector(self.bias, "bias")
        if bias.shape[0] != weights.shape[0]:
            raise DimensionError(
                "bias", f"expected length {weights.shape[0]} to match weight rows, got {bias.shape[0]}"
            )
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", bias)

    @property
    def input_width(self) -> int:
        return self.weights.shape[1]

    @property
    def output_width(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class ReluLayer:
    width: int

    def __post_init__(self):
        if self.width < 0:
            raise DimensionError("width", "must be nonnegative")

    @property
    def input_width(self) -> int:
        return self.width

    @property
    def output_width(self) -> int:
        return self.width


Layer = DenseLayer | ReluLayer


@dataclass(frozen=True)
class Network:
    layers: tuple
    input_dim: int
    output_dim: int
    name: str = "network"

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))

    def validate(self) -> list[str]:
        """Every dimension-chaining violation, or [] when consistent."""
        problems = []
        if not self.layers:
            return ["no layers"]
        width = self.input_dim
        for i, layer in enumerate(self.layers):
            if layer.input_width != width:
                problems.append(
                    f"layer {i} expects input width {layer.input_width}, "
                    f"previous width is {width}"
                )
            width = layer.output_width
        if width != self.output_dim:
            problems.append(
                f"last layer produces width {width}, network declares output_dim {self.output_dim}"
            )
        return problems

    def forward(self, x) -> np.ndarray:
        """Evaluate the network on one signal."""
        x = as_vector(x, "x")
        if x.shape[0] != self.input_dim:
            raise DimensionError("x", f"expected length {self.input_dim}, got {x.shape[0]}")
        problems = self.validate()
        if problems:
            raise DimensionError("layers", "; ".join(problems))
        out = np.asarray(x, dtype=float)
        for layer in self.layers:
            if isinstance(layer, DenseLayer):
                out = layer.weights @ out + layer.bias
            else:
                out = np.maximum(0.0, out)
        return out

    def forward_batch(self, X) -> np.ndarray:
        """Evaluate on rows of ``X``; same arithmetic as `forward`."""
        X = as_matrix(X, "X")
        if X.shape[1] != self.input_dim:
            raise DimensionError("X", f"expected {self.input_dim} columns, got {X.shape[1]}")
        out = np.asarray(X, dtype=float)
        for layer in self.layers:
            if isinstance(layer, DenseLayer):
                out = out @ layer.weights.T + layer.bias[None, :]
            else:
                out = np.maximum(0.0, out)
        return out
