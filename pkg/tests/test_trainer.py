"""Datasets, SGD updates, the training loop, and log export."""

import json
import math

import pytest

from dualgrad import trainer
from dualgrad.model import Gradient, Layer, LayerGradient, Mlp, MlpGradient, Perceptron, Sample
from dualgrad.trainer import Dataset, TrainConfig


# --- builtin datasets ---------------------------------------------------------


def test_and_truth_table():
    ds = trainer.builtin_dataset("and")
    assert ds.feature_width == 2 and len(ds.samples) == 4
    assert [(tuple(s.x), s.y) for s in ds.samples] == [
        ((0.0, 0.0), 0.0),
        ((0.0, 1.0), 0.0),
        ((1.0, 0.0), 0.0),
        ((1.0, 1.0), 1.0),
    ]


def test_or_and_nand_tables():
    assert [s.y for s in trainer.builtin_dataset("or").samples] == [0.0, 1.0, 1.0, 1.0]
    assert [s.y for s in trainer.builtin_dataset("nand").samples] == [1.0, 1.0, 1.0, 0.0]


def test_line2d_is_separable():
    ds = trainer.builtin_dataset("line2d")
    assert len(ds.samples) == 64
    # labels come from the half-plane x1 + x2 > 0, with a real margin
    for s in ds.samples:
        assert s.y == (1.0 if s.x[0] + s.x[1] > 0 else 0.0)
    assert min(abs(s.x[0] + s.x[1]) for s in ds.samples) > 0.1
    assert sum(s.y for s in ds.samples) == 32.0


def test_unknown_dataset_rejected():
    with pytest.raises(ValueError):
        trainer.builtin_dataset("xor3")


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset("empty", 2, [])
    with pytest.raises(ValueError):
        Dataset("ragged", 2, [Sample([1.0], 0.0)])


# --- csv ingestion --------------------------------------------------------------


def test_load_csv_roundtrip(tmp_path):
    path = tmp_path / "toy.csv"
    path.write_text("x1,x2,y\n0.5,-1.25,1\n2,3,0\n")
    ds = trainer.load_csv_dataset(path)
    assert ds.name == "toy" and ds.feature_width == 2
    assert [(tuple(s.x), s.y) for s in ds.samples] == [((0.5, -1.25), 1.0), ((2.0, 3.0), 0.0)]


def test_load_csv_rejects_ragged_rows(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x1,x2,y\n1,2,3\n1,2\n")
    with pytest.raises(ValueError, match="columns"):
        trainer.load_csv_dataset(path)


def test_load_csv_requires_header(tmp_path):
    path = tmp_path / "noheader.csv"
    path.write_text("0.5,1.25,1\n2,3,0\n")
    with pytest.raises(ValueError, match="header"):
        trainer.load_csv_dataset(path)


def test_load_csv_rejects_non_numeric(tmp_path):
    path = tmp_path / "text.csv"
    path.write_text("x1,y\nabc,1\n")
    with pytest.raises(ValueError):
        trainer.load_csv_dataset(path)


def test_resolve_dataset_missing_file():
    with pytest.raises(FileNotFoundError):
        trainer.resolve_dataset("nosuch.csv")


# --- sgd updates ------------------------------------------------------------------


def test_sgd_step_zero_gradient_is_fixed_point():
    m = Perceptron([1.0, -2.0], 0.5)
    m2 = trainer.sgd_step(m, Gradient([0.0, 0.0], 0.0), 0.5)
    assert m2.W == m.W and m2.b == m.b


def test_sgd_step_arithmetic():
    m = Perceptron([1.0, 1.0], 0.0)
    m2 = trainer.sgd_step(m, Gradient([0.5, -0.5], 0.25), 1.0)
    assert m2.W == [0.5, 1.5] and m2.b == -0.25


def test_sgd_two_steps_accumulate():
    m = Perceptron([1.0], 0.0, "identity")
    g = Gradient([0.25], 0.1)
    m2 = trainer.sgd_step(trainer.sgd_step(m, g, 0.5), g, 0.5)
    assert m2.W == [1.0 - 2 * 0.5 * 0.25]
    assert m2.b == -2 * 0.5 * 0.1


def test_sgd_step_shape_mismatch():
    with pytest.raises(ValueError):
        trainer.sgd_step(Perceptron([1.0, 2.0], 0.0), Gradient([1.0], 0.0), 0.5)


def test_sgd_step_mlp():
    mlp = Mlp([Layer([[1.0, 1.0]], [0.0], "identity")])
    g = MlpGradient([LayerGradient([[0.5, -0.5]], [1.0])])
    out = trainer.sgd_step(mlp, g, 1.0)
    assert out.layers[0].W == [[0.5, 1.5]] and out.layers[0].b == [-1.0]


# --- config validation ---------------------------------------------------------------


def test_config_rejects_bad_values():
    with pytest.raises(ValueError):
        TrainConfig(epochs=0)
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ValueError):
        TrainConfig(engine="magic")
    with pytest.raises(ValueError):
        TrainConfig(batch_mode="minibatch")
    with pytest.raises(ValueError):
        TrainConfig(init_range=-1.0)
    with pytest.raises(ValueError):
        TrainConfig(hidden=(2,), engine="ones")  # multilayer needs per-parameter seeding


def test_single_epoch_yields_single_record():
    log = trainer.train(TrainConfig(dataset="and", epochs=1))
    assert len(log.records) == 1
    assert log.records[0].epoch == 1


# --- training behavior ------------------------------------------------------------------


def test_engines_trace_identical_loss_curves():
    logs = [
        trainer.train(TrainConfig(dataset="and", engine=e, epochs=300, rng_seed=3))
        for e in ("ones", "seeded", "backprop")
    ]
    assert all(log.singular_skips == 0 for log in logs)
    for log in logs[1:]:
        gaps = [abs(a - b) for a, b in zip(logs[0].loss_curve(), log.loss_curve())]
        assert max(gaps) <= 1e-8


def test_training_is_deterministic():
    cfg = dict(dataset="line2d", engine="seeded", epochs=50, rng_seed=9, shuffle=True)
    a = trainer.train(TrainConfig(**cfg))
    b = trainer.train(TrainConfig(**cfg))
    assert a.final_model == b.final_model
    assert [(r.epoch, r.mean_loss, r.grad_norm) for r in a.records] == [
        (r.epoch, r.mean_loss, r.grad_norm) for r in b.records
    ]


def test_line2d_loss_decreases():
    cfg = TrainConfig(
        dataset="line2d", engine="backprop", learning_rate=0.1,
        epochs=200, batch_mode="full_batch", rng_seed=0,
    )
    log = trainer.train(cfg)
    assert log.records[-1].mean_loss < log.records[0].mean_loss


def test_singular_steps_are_skipped_and_counted():
    # weights summing to exactly zero make every shared-seed step singular
    m = Perceptron([0.5, -0.5], 0.0)
    log = trainer.train(
        TrainConfig(dataset="and", engine="ones", epochs=3),
        dataset=trainer.builtin_dataset("and"),
        model=m,
    )
    assert log.singular_skips == 12  # 3 epochs x 4 samples
    assert len(log.records) == 3
    assert not log.diverged
    assert log.final_model["W"] == [0.5, -0.5]


def test_divergence_flags_and_stops():
    cfg = TrainConfig(
        dataset="line2d", engine="backprop", learning_rate=1e18,
        epochs=50, rng_seed=0, activation="identity",
    )
    log = trainer.train(cfg)
    assert log.diverged
    assert len(log.records) < 50


def test_full_batch_takes_mean_gradient_step():
    from dualgrad import oracle

    ds = trainer.builtin_dataset("and")
    cfg = TrainConfig(dataset="and", engine="backprop", epochs=1,
                      batch_mode="full_batch", rng_seed=5)
    log = trainer.train(cfg)

    import numpy as np

    m0 = trainer.init_model(cfg, 2, np.random.default_rng(5))
    grads = [oracle.grad_backprop(m0, s) for s in ds.samples]
    mean_dW = [sum(g.dW[i] for g in grads) / 4 for i in range(2)]
    mean_db = sum(g.db for g in grads) / 4
    expected = trainer.sgd_step(m0, Gradient(mean_dW, mean_db), cfg.learning_rate)
    assert log.final_model["W"] == pytest.approx(expected.W, rel=1e-12)
    assert log.final_model["b"] == pytest.approx(expected.b, rel=1e-12)


def test_mlp_training_runs():
    xor = Dataset("xor", 2, [
        Sample([0.0, 0.0], 0.0), Sample([0.0, 1.0], 1.0),
        Sample([1.0, 0.0], 1.0), Sample([1.0, 1.0], 0.0),
    ])
    cfg = TrainConfig(dataset="xor", engine="seeded", epochs=50, rng_seed=0, hidden=(2,))
    log = trainer.train(cfg, dataset=xor)
    assert len(log.records) == 50
    assert log.final_model["kind"] == "mlp"
    assert math.isfinite(log.final_loss)


# --- log export ------------------------------------------------------------------------


def test_log_json_round_trip(tmp_path):
    log = trainer.train(TrainConfig(dataset="and", epochs=5))
    path = tmp_path / "log.json"
    trainer.write_log_json(log, path)
    assert json.loads(path.read_text()) == log.to_dict()


def test_log_csv_columns(tmp_path):
    log = trainer.train(TrainConfig(dataset="and", epochs=5))
    path = tmp_path / "log.csv"
    trainer.write_log_csv(log, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "epoch,mean_loss,grad_norm,wall_ms"
    assert len(lines) == 6
    first = lines[1].split(",")
    assert int(first[0]) == 1
    assert float(first[1]) == log.records[0].mean_loss
