"""Forward inference for multilayer perceptrons loaded from JSON weight files.

Weights file layout::

    {"n_inputs": 8,
     "layers": [{"w": [[...], ...], "b": [...], "act": "relu", "skip": false}, ...],
     "output": {"mode": "raw" | "log_odds", "class": 0}}

``w`` is row-major with shape ``(out, in)``; a layer computes
``act(W h + b)``, plus ``h`` when ``skip`` is set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from .masking import log_odds, sigmoid

ACTIVATIONS = {
    "relu": lambda z: np.maximum(z, 0.0),
    "sigmoid": sigmoid,
    "identity": lambda z: z,
}


@dataclass(frozen=True)
class Layer:
    weight: np.ndarray
    bias: np.ndarray
    act: str = "relu"
    skip: bool = False

    def __post_init__(self):
        w = np.array(self.weight, dtype=np.float64)
        b = np.array(self.bias, dtype=np.float64).reshape(-1)
        if w.ndim != 2:
            raise ConfigError(f"layer weight must be 2-D, got shape {w.shape}")
        if b.shape[0] != w.shape[0]:
            raise ConfigError(f"bias length {b.shape[0]} does not match {w.shape[0]} outputs")
        if self.act not in ACTIVATIONS:
            raise ConfigError(f"unknown activation {self.act!r}")
        if self.skip and w.shape[0] != w.shape[1]:
            raise ConfigError(f"skip layer needs equal in/out width, got {w.shape}")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise ConfigError("layer parameters must be finite")
        w.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "bias", b)

    def forward(self, h: np.ndarray) -> np.ndarray:
        out = ACTIVATIONS[self.act](h @ self.weight.T + self.bias)
        return out + h if self.skip else out


@dataclass(frozen=True)
class MlpModel:
    n_inputs: int
    layers: tuple[Layer, ...]
    output_mode: str = "raw"
    target_class: int = 0

    def __post_init__(self):
        if not self.layers:
            raise ConfigError("MLP needs at least one layer")
        width = self.n_inputs
        for k, layer in enumerate(self.layers):
            if layer.weight.shape[1] != width:
                raise ConfigError(f"layer {k} expects {layer.weight.shape[1]} inputs, previous width is {width}")
            width = layer.weight.shape[0]
        if self.output_mode not in ("raw", "log_odds"):
            raise ConfigError(f"unknown output mode {self.output_mode!r}")
        n_classes = 2 if width == 1 and self.output_mode == "log_odds" else width
        if not 0 <= self.target_class < n_classes:
            raise ConfigError(f"target class {self.target_class} out of range for {width} outputs")

    @property
    def out_width(self) -> int:
        return self.layers[-1].weight.shape[0]

    def logits(self, inputs: np.ndarray) -> np.ndarray:
        h = np.asarray(inputs, dtype=np.float64)
        if h.ndim != 2 or h.shape[1] != self.n_inputs:
            raise ConfigError(f"expected inputs of shape (batch, {self.n_inputs}), got {h.shape}")
        for layer in self.layers:
            h = layer.forward(h)
        return h

    def predict(self, inputs: np.ndarray) -> np.ndarray:
        z = self.logits(inputs)
        if self.output_mode == "raw":
            return z[:, self.target_class].copy()
        if z.shape[1] == 1:
            # single logit scores class 1
            p = sigmoid(z[:, 0])
            p = p if self.target_class == 1 else 1.0 - p
        else:
            z = z - z.max(axis=1, keepdims=True)
            e = np.exp(z)
            p = e[:, self.target_class] / e.sum(axis=1)
        return log_odds(p)

    def to_dict(self) -> dict:
        return {
            "n_inputs": self.n_inputs,
            "layers": [
                {"w": l.weight.tolist(), "b": l.bias.tolist(), "act": l.act, "skip": l.skip} for l in self.layers
            ],
            "output": {"mode": self.output_mode, "class": self.target_class},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MlpModel":
        try:
            layers = tuple(
                Layer(np.array(l["w"], dtype=np.float64), np.array(l["b"], dtype=np.float64), l.get("act", "relu"), bool(l.get("skip", False)))
                for l in d["layers"]
            )
            out = d.get("output", {})
            return cls(int(d["n_inputs"]), layers, out.get("mode", "raw"), int(out.get("class", 0)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed MLP weights: {exc}") from exc

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    def permuted(self, perm) -> "MlpModel":
        """Model ``g`` with ``g.predict(X[:, perm]) == self.predict(X)``."""
        perm = np.asarray(perm)
        first = self.layers[0]
        if first.skip:
            raise ConfigError("cannot permute inputs of a model whose first layer has a skip connection")
        w = first.weight[:, perm]
        layers = (Layer(w, first.bias, first.act, first.skip),) + self.layers[1:]
        return MlpModel(self.n_inputs, layers, self.output_mode, self.target_class)


def load_mlp(path) -> MlpModel:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read weights file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"weights file {path} is not valid JSON: {exc}") from exc
    return MlpModel.from_dict(doc)


def random_mlp(
    n_inputs: int,
    hidden: int = 100,
    depth: int = 5,
    skip: bool = False,
    output_mode: str = "raw",
    n_outputs: int = 1,
    seed: int = 0,
) -> MlpModel:
    """He-initialised MLP; ``depth`` counts all fully connected layers.

    With ``skip`` every hidden-to-hidden layer gets a residual connection.
    """
    if depth < 1:
        raise ConfigError("depth must be at least 1")
    rng = np.random.default_rng(seed)
    widths = [n_inputs] + [hidden] * (depth - 1) + [n_outputs]
    layers = []
    for k in range(depth):
        fan_in, fan_out = widths[k], widths[k + 1]
        w = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_out, fan_in))
        b = rng.normal(0.0, 0.1, size=fan_out)
        last = k == depth - 1
        layers.append(Layer(w, b, "identity" if last else "relu", skip=skip and not last and fan_in == fan_out))
    return MlpModel(n_inputs, tuple(layers), output_mode, 0)
