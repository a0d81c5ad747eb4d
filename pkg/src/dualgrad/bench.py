"""CPU timing of the gradient engines against parameter count.

Only the scaling structure is asserted anywhere (pass counts, linear
trends); absolute numbers are machine noise and never gate the suite.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import model as _model
from . import oracle as _oracle
from .model import Perceptron, Sample

DEFAULT_WIDTHS = (8, 16, 32, 64, 128, 256)
ENGINES = ("ones", "seeded", "backprop")
MIN_REPS = 10
_WARMUP = 3

_ENGINE_FNS = {
    "ones": _model.grad_ones,
    "seeded": _model.grad_seeded,
    "backprop": _oracle.grad_backprop,
}


@dataclass
class BenchResult:
    engine: str
    width: int
    params: int  # weight count; the bias is the +1 in the seeded pass count
    passes: int
    reps: int
    median_ns: float

    @property
    def ns_per_param(self) -> float:
        return self.median_ns / self.params


def guarded_perceptron(n: int, rng: np.random.Generator) -> Perceptron:
    """Random model with |sum(W)| >= 1e-3 so every engine is defined on it."""
    while True:
        W = [float(v) for v in rng.uniform(-2.0, 2.0, size=n)]
        if abs(sum(W)) >= 1e-3:
            return Perceptron(W, float(rng.uniform(-2.0, 2.0)), "sigmoid")


def random_sample(n: int, rng: np.random.Generator) -> Sample:
    return Sample([float(v) for v in rng.uniform(-2.0, 2.0, size=n)], float(rng.uniform(0.0, 1.0)))


def run_bench(
    widths=DEFAULT_WIDTHS,
    engines=ENGINES,
    reps: int = 30,
    seed: int = 0,
) -> list[BenchResult]:
    """Median gradient latency per (width, engine), sorted by (engine, params)."""
    widths = [int(w) for w in widths]
    if not widths or any(w < 1 for w in widths):
        raise ValueError(f"widths must be >= 1, got {widths}")
    for engine in engines:
        if engine not in _ENGINE_FNS:
            raise ValueError(f"unknown engine {engine!r}, expected one of {ENGINES}")
    if reps < MIN_REPS:
        raise ValueError(f"reps must be >= {MIN_REPS}, got {reps}")

    rng = np.random.default_rng(seed)
    results = []
    for n in widths:
        m = guarded_perceptron(n, rng)
        s = random_sample(n, rng)
        for engine in engines:
            grad = _ENGINE_FNS[engine]
            _model.reset_pass_count()
            grad(m, s)
            passes = _model.pass_count()
            for _ in range(_WARMUP):
                grad(m, s)
            times = []
            for _ in range(reps):
                t0 = time.perf_counter_ns()
                grad(m, s)
                times.append(time.perf_counter_ns() - t0)
            results.append(BenchResult(engine, n, len(m.W), passes, reps, statistics.median(times)))
    results.sort(key=lambda r: (r.engine, r.params))
    return results


def linear_fit_r2(xs, ys) -> tuple[float, float, float]:
    """Least-squares line fit; returns (slope, intercept, r_squared)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


def write_csv(results: list[BenchResult], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["engine", "width", "P", "passes", "median_ns"])
        for r in results:
            writer.writerow([r.engine, r.width, r.params, r.passes, repr(r.median_ns)])


def format_table(results: list[BenchResult]) -> str:
    header = f"{'engine':<10}{'width':>7}{'P':>7}{'passes':>8}{'median_ns':>14}{'ns/param':>12}"
    lines = [header, "-" * len(header)]
    for r in results:
        lines.append(
            f"{r.engine:<10}{r.width:>7}{r.params:>7}{r.passes:>8}"
            f"{r.median_ns:>14.0f}{r.ns_per_param:>12.1f}"
        )
    return "\n".join(lines)
