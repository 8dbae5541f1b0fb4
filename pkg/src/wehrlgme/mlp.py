"""Feed-forward regressor from ratio sequences to GME, NumPy only.

Fixed architecture (q_max-1, 512, 256, 128, 64, 32, 1) with ReLU after
each hidden layer and a linear output. Trained with Adam on the
batch-mean squared error. Everything is float64 and seeded, so training
runs are reproducible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import STREAM_INIT, STREAM_SHUFFLE, substream
from .errors import InsufficientDataError, SchemaError, ShapeMismatchError
from .gme import GmeEstimate
from .moments import MomentSequence

HIDDEN_SIZES = (512, 256, 128, 64, 32)


@dataclass
class TrainConfig:
    batch_size: int = 500
    epochs: int = 5000
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0


@dataclass
class MlpModel:
    """Layer sizes, parameters, and training metadata."""

    layer_sizes: tuple
    weights: list = field(repr=False)  # (n_in, n_out) matrices
    biases: list = field(repr=False)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        sizes = tuple(self.layer_sizes)
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise ShapeMismatchError("parameter count does not match layer sizes")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (sizes[i], sizes[i + 1]) or b.shape != (sizes[i + 1],):
                raise ShapeMismatchError(f"layer {i} has shape {w.shape}, "
                                         f"expected {(sizes[i], sizes[i + 1])}")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValueError("non-finite parameters")

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]


def init_model(q_max: int, seed: int, n_qubits: int | None = None,
               hidden=HIDDEN_SIZES) -> MlpModel:
    """He-style seeded initialization; output layer scaled for linearity."""
    if q_max < 2:
        raise ValueError("q_max must be >= 2")
    sizes = (q_max - 1, *hidden, 1)
    rng = substream(seed, STREAM_INIT)
    weights, biases = [], []
    for i in range(len(sizes) - 1):
        fan_in = sizes[i]
        last = i == len(sizes) - 2
        std = math.sqrt((1.0 if last else 2.0) / fan_in)
        weights.append(rng.normal(0.0, std, (sizes[i], sizes[i + 1])))
        biases.append(np.zeros(sizes[i + 1]))
    meta = {"q_max": q_max, "n_qubits": n_qubits, "seed": seed,
            "epochs_trained": 0, "final_train_loss": None,
            "final_test_loss": None}
    return MlpModel(sizes, weights, biases, meta)


def _forward_cache(model: MlpModel, x: np.ndarray):
    """Forward pass keeping pre-activations for backprop."""
    h = x
    pre = []
    acts = [x]
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ w + b
        pre.append(z)
        h = z if i == last else np.maximum(z, 0.0)
        acts.append(h)
    return h[:, 0], pre, acts


def forward_batch(model: MlpModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.n_inputs:
        raise ShapeMismatchError(
            f"expected (batch, {model.n_inputs}) inputs, got {x.shape}")
    return _forward_cache(model, x)[0]


def forward(model: MlpModel, x) -> float:
    """Prediction for a single input vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.n_inputs,):
        raise ShapeMismatchError(
            f"expected {model.n_inputs} inputs, got shape {x.shape}")
    return float(forward_batch(model, x[None, :])[0])


def batch_loss(model: MlpModel, x: np.ndarray, y: np.ndarray) -> float:
    pred = forward_batch(model, x)
    return float(np.mean((pred - y) ** 2))


def backward(model: MlpModel, x: np.ndarray, y: np.ndarray):
    """Gradients of the batch-mean squared error for every parameter.

    Returns (loss, grads_w, grads_b).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) == 0:
        raise ValueError("empty batch")
    pred, pre, acts = _forward_cache(model, x)
    loss = float(np.mean((pred - y) ** 2))
    delta = (2.0 / len(x)) * (pred - y)[:, None]
    grads_w = [None] * len(model.weights)
    grads_b = [None] * len(model.biases)
    for i in range(len(model.weights) - 1, -1, -1):
        grads_w[i] = acts[i].T @ delta
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ model.weights[i].T) * (pre[i - 1] > 0.0)
    return loss, grads_w, grads_b


def features(records, q_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Input matrix of ratios S(2..q_max) and target GME vector."""
    rows, targets = [], []
    for rec in records:
        if rec.moments.q_max < q_max:
            raise ShapeMismatchError(
                f"record {rec.id} stores ratios only up to q_max={rec.moments.q_max}")
        rows.append(rec.moments.ratios[:q_max - 1])
        targets.append(rec.gme)
    return np.asarray(rows, dtype=np.float64), np.asarray(targets, dtype=np.float64)


def train(train_records, q_max: int, cfg: TrainConfig,
          test_records=None) -> tuple[MlpModel, list]:
    """Adam training on ratio features; returns the model and the
    per-epoch history [{epoch, train_loss, test_loss}]."""
    x, y = features(train_records, q_max)
    if len(x) < cfg.batch_size:
        raise InsufficientDataError(
            f"{len(x)} records < batch size {cfg.batch_size}")
    x_test = y_test = None
    if test_records:
        x_test, y_test = features(test_records, q_max)

    n_qubits = train_records[0].n_qubits
    model = init_model(q_max, cfg.seed, n_qubits)
    m_w = [np.zeros_like(w) for w in model.weights]
    v_w = [np.zeros_like(w) for w in model.weights]
    m_b = [np.zeros_like(b) for b in model.biases]
    v_b = [np.zeros_like(b) for b in model.biases]
    rng = substream(cfg.seed, STREAM_SHUFFLE)
    step = 0
    history = []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(x))
        losses = []
        for lo in range(0, len(order), cfg.batch_size):
            idx = order[lo:lo + cfg.batch_size]
            loss, gw, gb = backward(model, x[idx], y[idx])
            losses.append(loss)
            step += 1
            c1 = 1.0 - cfg.beta1**step
            c2 = 1.0 - cfg.beta2**step
            for params, grads, ms, vs in ((model.weights, gw, m_w, v_w),
                                          (model.biases, gb, m_b, v_b)):
                for p, g, m, v in zip(params, grads, ms, vs):
                    m *= cfg.beta1
                    m += (1.0 - cfg.beta1) * g
                    v *= cfg.beta2
                    v += (1.0 - cfg.beta2) * g * g
                    p -= cfg.learning_rate * (m / c1) / (np.sqrt(v / c2) + cfg.eps)
        entry = {"epoch": epoch, "train_loss": float(np.mean(losses))}
        if x_test is not None:
            entry["test_loss"] = batch_loss(model, x_test, y_test)
        history.append(entry)
    model.meta["epochs_trained"] = cfg.epochs
    model.meta["final_train_loss"] = history[-1]["train_loss"] if history else None
    model.meta["final_test_loss"] = history[-1].get("test_loss") if history else None
    model.meta["batch_size"] = cfg.batch_size
    return model, history


def predict_gme(model: MlpModel, seq: MomentSequence) -> GmeEstimate:
    """Network output on S(2..q_max), clamped to [0, 1 - 1/(N+1)]."""
    q_max = model.meta.get("q_max", model.n_inputs + 1)
    if seq.q_max < q_max:
        raise ShapeMismatchError(
            f"sequence has q_max={seq.q_max}, model needs {q_max}")
    raw = forward(model, seq.ratios[:q_max - 1])
    hi = 1.0 - 1.0 / (seq.n_qubits + 1)
    value = min(max(raw, 0.0), hi)
    return GmeEstimate(value=value, method="ann", q_max_used=q_max,
                       note="" if value == raw else "clamped")


def save_model(path, model: MlpModel) -> None:
    obj = {
        "schema_version": 1,
        "arch": list(model.layer_sizes),
        "activations": ["relu"] * (len(model.layer_sizes) - 2) + ["identity"],
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "meta": model.meta,
    }
    Path(path).write_text(json.dumps(obj) + "\n")


def load_model(path) -> MlpModel:
    obj = json.loads(Path(path).read_text())
    for key in ("arch", "weights", "biases", "meta"):
        if key not in obj:
            raise SchemaError(f"model file missing {key!r}")
    weights = [np.asarray(w, dtype=np.float64) for w in obj["weights"]]
    biases = [np.asarray(b, dtype=np.float64) for b in obj["biases"]]
    return MlpModel(tuple(obj["arch"]), weights, biases, obj["meta"])


def write_history_csv(path, history) -> None:
    lines = ["epoch,train_loss,test_loss"]
    for row in history:
        test = row.get("test_loss")
        lines.append(f"{row['epoch']},{row['train_loss']!r},"
                     f"{'' if test is None else repr(test)}")
    Path(path).write_text("\n".join(lines) + "\n")
