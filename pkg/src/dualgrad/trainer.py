"""Gradient-descent training with interchangeable gradient engines.

The three engines compute the same mathematical gradient, so a run is
fully determined by the config: same seed and sample order give the same
trajectory whichever engine is selected (wall-clock timings aside).
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import model as _model
from . import oracle as _oracle
from .model import (
    Gradient,
    Layer,
    LayerGradient,
    Mlp,
    MlpGradient,
    Model,
    Perceptron,
    Sample,
    SingularSeed,
)

ENGINES = ("ones", "seeded", "backprop")
BATCH_MODES = ("per_sample", "full_batch")
BUILTIN_DATASETS = ("and", "or", "nand", "line2d")

_ENGINE_FNS = {
    "ones": _model.grad_ones,
    "seeded": _model.grad_seeded,
    "backprop": _oracle.grad_backprop,
}


@dataclass
class TrainConfig:
    """Hyperparameters and provenance for one training run.

    ``dataset`` is a builtin name or a CSV path. ``hidden`` lists hidden
    layer widths; empty means a single-layer perceptron. All randomness
    (weight init, optional shuffling) flows from ``rng_seed`` through one
    numpy PCG64 generator.
    """

    dataset: str = "and"
    engine: str = "backprop"
    learning_rate: float = 0.5
    epochs: int = 2000
    batch_mode: str = "per_sample"
    rng_seed: int = 0
    init_range: float = 0.5
    activation: str = "sigmoid"
    hidden: tuple[int, ...] = ()
    shuffle: bool = False

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}, expected one of {ENGINES}")
        if self.batch_mode not in BATCH_MODES:
            raise ValueError(f"unknown batch mode {self.batch_mode!r}, expected one of {BATCH_MODES}")
        if not (self.learning_rate > 0 and math.isfinite(self.learning_rate)):
            raise ValueError(f"learning rate must be positive, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not (self.init_range > 0 and math.isfinite(self.init_range)):
            raise ValueError(f"init range must be positive, got {self.init_range}")
        if self.activation not in _model.ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        self.hidden = tuple(int(w) for w in self.hidden)
        if any(w < 1 for w in self.hidden):
            raise ValueError(f"hidden widths must be >= 1, got {self.hidden}")
        if self.hidden and self.engine != "seeded":
            raise ValueError("multilayer models train with engine='seeded' only")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden"] = list(self.hidden)
        return d


@dataclass
class Dataset:
    name: str
    feature_width: int
    samples: list[Sample]

    def __post_init__(self):
        if not self.samples:
            raise ValueError("dataset must not be empty")
        for s in self.samples:
            if len(s.x) != self.feature_width:
                raise ValueError(
                    f"sample width {len(s.x)} does not match dataset width {self.feature_width}"
                )


@dataclass
class EpochRecord:
    epoch: int
    mean_loss: float
    grad_norm: float
    wall_ms: float


@dataclass
class TrainLog:
    config: dict
    records: list[EpochRecord] = field(default_factory=list)
    final_model: dict = field(default_factory=dict)
    singular_skips: int = 0
    diverged: bool = False

    @property
    def final_loss(self) -> float:
        return self.records[-1].mean_loss if self.records else math.nan

    def loss_curve(self) -> list[float]:
        return [r.mean_loss for r in self.records]

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "records": [asdict(r) for r in self.records],
            "final_model": self.final_model,
            "singular_skips": self.singular_skips,
            "diverged": self.diverged,
        }


# --- datasets ------------------------------------------------------------------


def builtin_dataset(name: str) -> Dataset:
    """The four-point boolean tables plus a separable 64-point half-plane set."""
    tables = {
        "and": [0.0, 0.0, 0.0, 1.0],
        "or": [0.0, 1.0, 1.0, 1.0],
        "nand": [1.0, 1.0, 1.0, 0.0],
    }
    if name in tables:
        inputs = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]
        samples = [Sample(list(x), y) for x, y in zip(inputs, tables[name])]
        return Dataset(name, 2, samples)
    if name == "line2d":
        # Two clusters straddling the line x1 + x2 = 0; offsets keep a margin
        # of at least 0.3, so the labels are separable by construction.
        rng = np.random.default_rng(7)
        samples = []
        for k in range(64):
            cx = 0.55 if k % 2 == 0 else -0.55
            ox, oy = rng.uniform(-0.2, 0.2, size=2)
            x1, x2 = cx + ox, cx + oy
            label = 1.0 if x1 + x2 > 0.0 else 0.0
            samples.append(Sample([float(x1), float(x2)], label))
        return Dataset("line2d", 2, samples)
    raise ValueError(f"unknown dataset {name!r}, expected one of {BUILTIN_DATASETS}")


def load_csv_dataset(path: str | Path) -> Dataset:
    """Read samples from CSV with a strict header x1..xn,y; ragged rows are rejected."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = [c.strip() for c in rows[0]]
    n = len(header) - 1
    if n < 1 or header != [f"x{i + 1}" for i in range(n)] + ["y"]:
        raise ValueError(f"{path}: header must be x1..xn,y, got {header}")
    samples = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != n + 1:
            raise ValueError(f"{path}:{lineno}: expected {n + 1} columns, got {len(row)}")
        try:
            values = [float(c) for c in row]
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
        samples.append(Sample(values[:-1], values[-1]))
    if not samples:
        raise ValueError(f"{path}: no data rows")
    return Dataset(path.stem, n, samples)


def resolve_dataset(ref: str) -> Dataset:
    if ref in BUILTIN_DATASETS:
        return builtin_dataset(ref)
    path = Path(ref)
    if not path.exists():
        raise FileNotFoundError(f"dataset {ref!r} is neither builtin nor an existing file")
    return load_csv_dataset(path)


# --- model init and updates ------------------------------------------------------


def init_model(cfg: TrainConfig, feature_width: int, rng: np.random.Generator) -> Model:
    """Uniform weights in [-init_range, init_range], drawn in a fixed order."""

    def draw(k: int) -> list[float]:
        return [float(v) for v in rng.uniform(-cfg.init_range, cfg.init_range, size=k)]

    if not cfg.hidden:
        return Perceptron(draw(feature_width), draw(1)[0], cfg.activation)
    widths = [feature_width, *cfg.hidden, 1]
    layers = []
    for w_in, w_out in zip(widths, widths[1:]):
        rows = [draw(w_in) for _ in range(w_out)]
        layers.append(Layer(rows, draw(w_out), cfg.activation))
    return Mlp(layers)


def sgd_step(m: Model, g, lr: float) -> Model:
    """p <- p - lr * dp for every parameter; returns a new model."""
    if lr <= 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    if isinstance(m, Perceptron):
        if not isinstance(g, Gradient) or len(g.dW) != len(m.W):
            raise ValueError("gradient shape does not match model")
        return Perceptron(
            [w - lr * gw for w, gw in zip(m.W, g.dW)], m.b - lr * g.db, m.act
        )
    if isinstance(m, Mlp):
        if not isinstance(g, MlpGradient) or len(g.layers) != len(m.layers):
            raise ValueError("gradient shape does not match model")
        layers = []
        for lay, lg in zip(m.layers, g.layers):
            if len(lg.dW) != len(lay.W) or len(lg.db) != len(lay.b):
                raise ValueError("gradient shape does not match model")
            rows = [
                [w - lr * gw for w, gw in zip(row, grow)]
                for row, grow in zip(lay.W, lg.dW)
            ]
            bs = [b - lr * gb for b, gb in zip(lay.b, lg.db)]
            layers.append(Layer(rows, bs, lay.act))
        return Mlp(layers)
    raise TypeError(f"unsupported model type {type(m).__name__}")


def _grad_sum(acc, g):
    if acc is None:
        return g
    if isinstance(g, Gradient):
        return Gradient([a + b for a, b in zip(acc.dW, g.dW)], acc.db + g.db)
    layers = []
    for la, lg in zip(acc.layers, g.layers):
        rows = [[a + b for a, b in zip(ra, rg)] for ra, rg in zip(la.dW, lg.dW)]
        bs = [a + b for a, b in zip(la.db, lg.db)]
        layers.append(LayerGradient(rows, bs))
    return MlpGradient(layers)


def _grad_scale(g, factor: float):
    if isinstance(g, Gradient):
        return Gradient([factor * v for v in g.dW], factor * g.db)
    layers = []
    for lg in g.layers:
        rows = [[factor * v for v in row] for row in lg.dW]
        layers.append(LayerGradient(rows, [factor * v for v in lg.db]))
    return MlpGradient(layers)


def model_to_dict(m: Model) -> dict:
    if isinstance(m, Perceptron):
        return {"kind": "perceptron", "W": list(m.W), "b": m.b, "act": m.act}
    return {
        "kind": "mlp",
        "layers": [
            {"W": [list(r) for r in lay.W], "b": list(lay.b), "act": lay.act}
            for lay in m.layers
        ],
    }


# --- the training loop ------------------------------------------------------------


def mean_loss(m: Model, dataset: Dataset) -> float:
    total = 0.0
    for s in dataset.samples:
        total += _model.loss(m.forward(s.x), s.y)
    return total / len(dataset.samples)


def train(cfg: TrainConfig, dataset: Dataset | None = None, model: Model | None = None) -> TrainLog:
    """Run the configured gradient descent and log one record per epoch.

    SingularSeed steps (possible with engine='ones') are skipped and
    counted; a non-finite loss aborts the run with the partial log marked
    diverged.
    """
    if dataset is None:
        dataset = resolve_dataset(cfg.dataset)
    rng = np.random.default_rng(cfg.rng_seed)
    m = init_model(cfg, dataset.feature_width, rng) if model is None else model
    if m.width != dataset.feature_width:
        raise ValueError(
            f"model width {m.width} does not match dataset width {dataset.feature_width}"
        )
    engine = _ENGINE_FNS[cfg.engine]

    log = TrainLog(config=cfg.to_dict())
    for epoch in range(1, cfg.epochs + 1):
        t0 = time.perf_counter()
        grad_norm = 0.0
        order = list(range(len(dataset.samples)))
        if cfg.shuffle:
            rng.shuffle(order)
        try:
            if cfg.batch_mode == "per_sample":
                for idx in order:
                    try:
                        g = engine(m, dataset.samples[idx])
                    except SingularSeed:
                        log.singular_skips += 1
                        continue
                    grad_norm = max(grad_norm, *(abs(v) for _, v in g.entries()))
                    m = sgd_step(m, g, cfg.learning_rate)
            else:
                acc = None
                contributing = 0
                for idx in order:
                    try:
                        g = engine(m, dataset.samples[idx])
                    except SingularSeed:
                        log.singular_skips += 1
                        continue
                    acc = _grad_sum(acc, g)
                    contributing += 1
                if acc is not None:
                    g = _grad_scale(acc, 1.0 / contributing)
                    grad_norm = max(grad_norm, *(abs(v) for _, v in g.entries()))
                    m = sgd_step(m, g, cfg.learning_rate)
            epoch_loss = mean_loss(m, dataset)
        except (ValueError, OverflowError):
            # non-finite values escaped the arithmetic: flag and stop
            log.diverged = True
            break
        wall_ms = (time.perf_counter() - t0) * 1e3
        log.records.append(EpochRecord(epoch, epoch_loss, grad_norm, wall_ms))
        if not math.isfinite(epoch_loss):
            log.diverged = True
            break
    log.final_model = model_to_dict(m)
    return log


# --- log export --------------------------------------------------------------------


def write_log_json(log: TrainLog, path: str | Path) -> None:
    Path(path).write_text(json.dumps(log.to_dict(), indent=2) + "\n")


def write_log_csv(log: TrainLog, path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "mean_loss", "grad_norm", "wall_ms"])
        for r in log.records:
            writer.writerow([r.epoch, repr(r.mean_loss), repr(r.grad_norm), repr(r.wall_ms)])
