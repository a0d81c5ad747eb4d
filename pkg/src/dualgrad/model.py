"""Perceptron / MLP models and their forward-mode gradient rules.

Two forward-mode gradients are provided:

* ``grad_ones`` seeds every input x_i with the same eps in a single dual
  pass. The dual part of the output is then sum(W) * act'(z), so dividing
  by sum(W) recovers act'(z) and with it the full gradient. The division
  makes the rule undefined when sum(W) is (near) zero, which raises
  :class:`SingularSeed`.

* ``grad_seeded`` runs one dual pass per scalar parameter, seeding only
  that parameter. No division, no singularity, and it extends unchanged
  to multilayer networks, at the cost of P passes for P parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

from . import functions as fn
from .dual import Dual

ACTIVATIONS = ("sigmoid", "tanh", "identity")

# |sum(W)| below this makes the ones-seeded division ill-conditioned.
ONES_SEED_GUARD = 1e-6


class SingularSeed(ArithmeticError):
    """The ones-seeded rule is undefined because |sum(W)| is below the guard."""


# --- forward-pass accounting (test/bench instrumentation) -------------------

_pass_count = 0


def count_forward_pass() -> None:
    global _pass_count
    _pass_count += 1


def reset_pass_count() -> None:
    global _pass_count
    _pass_count = 0


def pass_count() -> int:
    return _pass_count


# --- types -------------------------------------------------------------------


def _check_finite(values, what: str) -> list[float]:
    out = [float(v) for v in values]
    if not all(math.isfinite(v) for v in out):
        raise ValueError(f"{what} must be finite, got {out}")
    return out


@dataclass
class Sample:
    """One training example: feature vector x and scalar target y."""

    x: list[float]
    y: float

    def __post_init__(self):
        self.x = _check_finite(self.x, "sample features")
        self.y = float(self.y)
        if not math.isfinite(self.y):
            raise ValueError(f"sample target must be finite, got {self.y}")


@dataclass
class Perceptron:
    """Single-layer model act(W . x + b) with scalar output."""

    W: list[float]
    b: float
    act: str = "sigmoid"

    def __post_init__(self):
        self.W = _check_finite(self.W, "weights")
        if len(self.W) < 1:
            raise ValueError("perceptron needs at least one weight")
        self.b = float(self.b)
        if not math.isfinite(self.b):
            raise ValueError(f"bias must be finite, got {self.b}")
        if self.act not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.act!r}, expected one of {ACTIVATIONS}")

    @property
    def width(self) -> int:
        return len(self.W)

    def forward(self, x: Sequence[float]) -> float:
        """Plain float evaluation; no dual arithmetic involved."""
        if len(x) != len(self.W):
            raise ValueError(f"expected {len(self.W)} features, got {len(x)}")
        z = self.b
        for w, xi in zip(self.W, x):
            z += w * xi
        return _act_real(self.act, z)


@dataclass
class Layer:
    """Dense layer: W is out_width x in_width, b has out_width entries."""

    W: list[list[float]]
    b: list[float]
    act: str = "sigmoid"

    def __post_init__(self):
        self.W = [_check_finite(row, "layer weights") for row in self.W]
        self.b = _check_finite(self.b, "layer biases")
        if len(self.W) < 1 or len(self.W) != len(self.b):
            raise ValueError("layer weight rows and biases must match and be nonempty")
        widths = {len(row) for row in self.W}
        if len(widths) != 1 or min(widths) < 1:
            raise ValueError("layer weight rows must share a nonzero width")
        if self.act not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.act!r}, expected one of {ACTIVATIONS}")

    @property
    def out_width(self) -> int:
        return len(self.W)

    @property
    def in_width(self) -> int:
        return len(self.W[0])


@dataclass
class Mlp:
    """Stack of dense layers ending in a single scalar output."""

    layers: list[Layer]

    def __post_init__(self):
        if not self.layers:
            raise ValueError("mlp needs at least one layer")
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.out_width != nxt.in_width:
                raise ValueError(
                    f"layer widths do not chain: {prev.out_width} -> {nxt.in_width}"
                )
        if self.layers[-1].out_width != 1:
            raise ValueError("final layer must have scalar output")

    @property
    def width(self) -> int:
        return self.layers[0].in_width

    def forward(self, x: Sequence[float]) -> float:
        if len(x) != self.width:
            raise ValueError(f"expected {self.width} features, got {len(x)}")
        h = list(x)
        for layer in self.layers:
            h = [
                _act_real(layer.act, b + _dot(row, h))
                for row, b in zip(layer.W, layer.b)
            ]
        return h[0]


Model = Union[Perceptron, Mlp]


@dataclass
class Gradient:
    """Loss gradient for a perceptron: dW mirrors W, db mirrors b."""

    dW: list[float]
    db: float

    def __post_init__(self):
        self.dW = _check_finite(self.dW, "gradient entries")
        self.db = float(self.db)
        if not math.isfinite(self.db):
            raise ValueError(f"gradient entries must be finite, got db={self.db}")

    def entries(self) -> Iterator[tuple[str, float]]:
        for i, g in enumerate(self.dW):
            yield f"w[{i}]", g
        yield "b", self.db

    def to_dict(self) -> dict:
        return {"dW": list(self.dW), "db": self.db}


@dataclass
class LayerGradient:
    dW: list[list[float]]
    db: list[float]

    def __post_init__(self):
        self.dW = [_check_finite(row, "gradient entries") for row in self.dW]
        self.db = _check_finite(self.db, "gradient entries")


@dataclass
class MlpGradient:
    """Per-layer loss gradients with the same shapes as the model's layers."""

    layers: list[LayerGradient]

    def entries(self) -> Iterator[tuple[str, float]]:
        for l, lg in enumerate(self.layers):
            for i, row in enumerate(lg.dW):
                for j, g in enumerate(row):
                    yield f"layer[{l}].w[{i}][{j}]", g
            for i, g in enumerate(lg.db):
                yield f"layer[{l}].b[{i}]", g

    def to_dict(self) -> dict:
        return {
            "layers": [{"dW": [list(r) for r in lg.dW], "db": list(lg.db)} for lg in self.layers]
        }


AnyGradient = Union[Gradient, MlpGradient]


# --- evaluation helpers -------------------------------------------------------


def _dot(ws: Sequence[float], xs: Sequence[float]) -> float:
    z = 0.0
    for w, xi in zip(ws, xs):
        z += w * xi
    return z


def _act_real(tag: str, z: float) -> float:
    if tag == "sigmoid":
        return fn.sigmoid_real(z)
    if tag == "tanh":
        return math.tanh(z)
    return z


def _act_dual(tag: str, z: Dual) -> Dual:
    if tag == "sigmoid":
        return fn.sigmoid(z)
    if tag == "tanh":
        return fn.tanh(z)
    return z


def loss(yhat: float, y: float) -> float:
    """Squared error (y - yhat)**2."""
    d = y - yhat
    return d * d


# --- the ones-seeded rule -----------------------------------------------------


def forward_dual_ones(m: Perceptron, x: Sequence[float]) -> Dual:
    """Evaluate the perceptron with every input seeded as x_i + eps.

    The result's dual part equals sum(W) * act'(W.x + b): all input
    perturbations share one eps, so their first-order effects add up.
    """
    if not isinstance(m, Perceptron):
        raise TypeError("the shared-seed pass is a single-layer rule; use grad_seeded for Mlp")
    if len(x) != len(m.W):
        raise ValueError(f"expected {len(m.W)} features, got {len(x)}")
    z = Dual(m.b)
    for w, xi in zip(m.W, x):
        z = z + Dual(xi, 1.0) * w
    count_forward_pass()
    return _act_dual(m.act, z)


def grad_ones(m: Perceptron, s: Sample) -> Gradient:
    """Gradient of (y - yhat)**2 from a single input-seeded dual pass.

    dW_i = 2*(R(yhat_eps) - y) * E(yhat_eps) / sum(W) * x_i, and db is the
    same scalar factor without the x_i product. Requires |sum(W)| >=
    ONES_SEED_GUARD; raises SingularSeed otherwise.
    """
    if not isinstance(m, Perceptron):
        raise TypeError("the shared-seed rule is single-layer; use grad_seeded for Mlp")
    seed_sum = sum(m.W)
    if abs(seed_sum) < ONES_SEED_GUARD:
        raise SingularSeed(
            f"|sum(W)| = {abs(seed_sum):.3e} is below {ONES_SEED_GUARD:g}; the shared-seed "
            "division is undefined here, use grad_seeded instead"
        )
    yhat_eps = forward_dual_ones(m, s.x)
    g0 = 2.0 * (yhat_eps.re - s.y) * yhat_eps.du / seed_sum
    return Gradient([g0 * xi for xi in s.x], g0)


# --- per-parameter seeding ----------------------------------------------------


def _perceptron_loss_dual(m: Perceptron, s: Sample, seed_w: int, seed_b: bool) -> Dual:
    # One dual pass with a single seeded parameter; the loss's dual part
    # is the partial derivative with respect to that parameter.
    z = Dual(m.b, 1.0 if seed_b else 0.0)
    for j, (w, xi) in enumerate(zip(m.W, s.x)):
        z = z + Dual(w, 1.0 if j == seed_w else 0.0) * xi
    yhat = _act_dual(m.act, z)
    count_forward_pass()
    return (Dual(s.y) - yhat) ** 2


def _mlp_loss_dual(m: Mlp, s: Sample, seed: tuple[int, str, int, int]) -> Dual:
    seed_layer, seed_kind, seed_i, seed_j = seed
    h = [Dual(xi) for xi in s.x]
    for l, layer in enumerate(m.layers):
        out = []
        for i, (row, b) in enumerate(zip(layer.W, layer.b)):
            z = Dual(b, 1.0 if (l == seed_layer and seed_kind == "b" and i == seed_i) else 0.0)
            for j, (w, hj) in enumerate(zip(row, h)):
                dw = 1.0 if (l == seed_layer and seed_kind == "w" and i == seed_i and j == seed_j) else 0.0
                z = z + Dual(w, dw) * hj
            out.append(_act_dual(layer.act, z))
        h = out
    count_forward_pass()
    return (Dual(s.y) - h[0]) ** 2


def grad_seeded(m: Model, s: Sample) -> AnyGradient:
    """Gradient via one dual pass per scalar parameter (weights, then biases).

    Works for any weight configuration and for multilayer models; the cost
    is exactly one forward pass per parameter.
    """
    if isinstance(m, Perceptron):
        if len(s.x) != len(m.W):
            raise ValueError(f"expected {len(m.W)} features, got {len(s.x)}")
        dW = [_perceptron_loss_dual(m, s, seed_w=i, seed_b=False).du for i in range(len(m.W))]
        db = _perceptron_loss_dual(m, s, seed_w=-1, seed_b=True).du
        return Gradient(dW, db)
    if isinstance(m, Mlp):
        if len(s.x) != m.width:
            raise ValueError(f"expected {m.width} features, got {len(s.x)}")
        layers = []
        for l, layer in enumerate(m.layers):
            dW = [
                [_mlp_loss_dual(m, s, (l, "w", i, j)).du for j in range(layer.in_width)]
                for i in range(layer.out_width)
            ]
            db = [_mlp_loss_dual(m, s, (l, "b", i, -1)).du for i in range(layer.out_width)]
            layers.append(LayerGradient(dW, db))
        return MlpGradient(layers)
    raise TypeError(f"unsupported model type {type(m).__name__}")
