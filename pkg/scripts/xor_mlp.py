"""Train a 2-2-1 MLP on XOR with per-parameter seeded gradients.

XOR is not linearly separable, so the single-layer shared-seed rule cannot
learn it; the per-parameter engine handles the hidden layer fine. Some
inits land in a local minimum, hence the restart loop.
"""

import sys

from dualgrad.model import Layer, Mlp, Sample
from dualgrad.trainer import Dataset, TrainConfig, train

xor = Dataset("xor", 2, [
    Sample([0.0, 0.0], 0.0),
    Sample([0.0, 1.0], 1.0),
    Sample([1.0, 0.0], 1.0),
    Sample([1.0, 1.0], 0.0),
])

epochs = int(sys.argv[1]) if len(sys.argv) > 1 else 10_000

for seed in range(5):
    cfg = TrainConfig(dataset="xor", engine="seeded", learning_rate=0.5,
                      epochs=epochs, rng_seed=seed, hidden=(2,))
    log = train(cfg, dataset=xor)
    print(f"seed {seed}: final loss {log.final_loss:.6f}")
    if log.final_loss < 0.05:
        mlp = Mlp([Layer(l["W"], l["b"], l["act"]) for l in log.final_model["layers"]])
        for s in xor.samples:
            print(f"  {s.x} -> {mlp.forward(s.x):.4f} (target {s.y:g})")
        break
else:
    print("no seed converged; try more epochs")
