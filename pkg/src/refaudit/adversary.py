"""Desk-scale adversarial faithfulness model: a feed-forward encoder with a
logistic faithfulness head and a density regression head behind a gradient
reversal, trained so the shared representation stops predicting density.

All arithmetic is explicit numpy; the backward pass is hand-derived and
validated by central finite differences. The reversal makes the encoder
update follow grad(L_faith) - lambda * grad(L_density) while the density
head itself keeps its ordinary gradients.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Dataset, TokenSequence, tokenize
from .errors import (
    AnnotationError,
    DimensionMismatchError,
    DivergenceError,
    UndefinedMeasureError,
)
from .overlap import coverage, density, extract_fragments
from .stats import PairedSample, spearman
from .errors import DegenerateSampleError

CHECKPOINT_VERSION = 1

FRAG_BUCKETS = 5  # histogram buckets for fragment lengths 1..5 plus >=6
BASE_FEATURE_NAMES = tuple(
    [f"frag_len_{k}" for k in range(1, FRAG_BUCKETS + 1)]
    + [f"frag_len_{FRAG_BUCKETS + 1}p"]
    + ["coverage", "density", "length_ratio", "novel_unigram", "novel_bigram"]
)


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or not np.isfinite(v).all():
            raise ValueError("feature vector must be a finite 1-d array")


def featurize(
    source: TokenSequence, output: TokenSequence, planted=None
) -> FeatureVector:
    """Deterministic overlap features for one (source, output) pair.

    Layout: fragment-length histogram (buckets 1..5 and >=6, as fractions of
    the fragment count), coverage, density, output/source length ratio,
    novel unigram and bigram rates, then any planted channels.
    """
    if len(output) == 0:
        raise UndefinedMeasureError("cannot featurize an empty output")
    fs = extract_fragments(source, output)
    hist = np.zeros(FRAG_BUCKETS + 1)
    for frag_len in fs.lengths():
        hist[min(frag_len, FRAG_BUCKETS + 1) - 1] += 1.0
    if fs.fragments:
        hist /= len(fs.fragments)

    src_unigrams = set(source.tokens)
    out_tokens = output.tokens
    novel_uni = sum(1 for t in out_tokens if t not in src_unigrams) / len(out_tokens)
    src_bigrams = set(zip(source.tokens, source.tokens[1:]))
    out_bigrams = list(zip(out_tokens, out_tokens[1:]))
    if out_bigrams:
        novel_bi = sum(1 for b in out_bigrams if b not in src_bigrams) / len(out_bigrams)
    else:
        novel_bi = 0.0

    values = np.concatenate(
        [
            hist,
            [
                coverage(fs),
                density(fs),
                len(output) / max(1, len(source)),
                novel_uni,
                novel_bi,
            ],
        ]
    )
    if planted is not None:
        values = np.concatenate([values, np.asarray(planted, dtype=np.float64)])
    return FeatureVector(values=values)


def lambda_schedule(progress: float, gamma: float) -> float:
    """Reversal-strength ramp 2 / (1 + exp(-gamma * p)) - 1, zero at p = 0."""
    if not 0.0 <= progress <= 1.0:
        raise ValueError(f"progress {progress} outside [0, 1]")
    return 2.0 / (1.0 + math.exp(-gamma * progress)) - 1.0


class GradientReversal:
    """Identity forward; backward multiplies the incoming gradient by -lambda."""

    @staticmethod
    def forward(h: np.ndarray) -> np.ndarray:
        return h

    @staticmethod
    def backward(grad: np.ndarray, lam: float) -> np.ndarray:
        return -lam * np.asarray(grad, dtype=np.float64)


def grl(h: np.ndarray, lam: float) -> np.ndarray:
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    return GradientReversal.forward(h)


@dataclass
class TrainConfig:
    learning_rate: float = 0.05
    epochs: int = 30
    batch_size: int = 32
    seed: int = 0
    gamma: float = 10.0
    lambda_max: float = 1.0
    hidden: tuple[int, ...] = (32, 16)

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not 0.0 < self.lambda_max <= 1.0:
            raise ValueError("lambda_max must be in (0, 1]")


@dataclass
class AdversarialNet:
    """Encoder stack plus faithfulness and (reversed) density heads."""

    encoder_weights: list[np.ndarray]
    encoder_biases: list[np.ndarray]
    faith_w: np.ndarray
    faith_b: float
    dens_w: np.ndarray
    dens_b: float
    gamma: float = 10.0
    lambda_max: float = 1.0
    density_mean: float = 0.0
    density_std: float = 1.0

    @property
    def input_dim(self) -> int:
        return self.encoder_weights[0].shape[0]

    @classmethod
    def init(cls, input_dim: int, hidden=(32, 16), seed: int = 0,
             gamma: float = 10.0, lambda_max: float = 1.0) -> "AdversarialNet":
        """Seeded uniform initialization in +-sqrt(6 / (fan_in + fan_out))."""
        gen = np.random.Generator(np.random.Philox(key=np.uint64([seed, 0])))
        widths = [input_dim, *hidden]
        weights, biases = [], []
        for fan_in, fan_out in zip(widths, widths[1:]):
            a = math.sqrt(6.0 / (fan_in + fan_out))
            weights.append(gen.uniform(-a, a, size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        rep_dim = widths[-1]
        a = math.sqrt(6.0 / (rep_dim + 1))
        return cls(
            encoder_weights=weights,
            encoder_biases=biases,
            faith_w=gen.uniform(-a, a, size=rep_dim),
            faith_b=0.0,
            dens_w=gen.uniform(-a, a, size=rep_dim),
            dens_b=0.0,
            gamma=gamma,
            lambda_max=lambda_max,
        )


def encode(net: AdversarialNet, X: np.ndarray) -> np.ndarray:
    """Encoder representation; hidden layers use tanh."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != net.input_dim:
        raise DimensionMismatchError(
            f"input has {X.shape[1]} features, model expects {net.input_dim}"
        )
    h = X
    for W, b in zip(net.encoder_weights, net.encoder_biases):
        h = np.tanh(h @ W + b)
    return h


def _forward(net: AdversarialNet, X: np.ndarray):
    activations = [np.atleast_2d(np.asarray(X, dtype=np.float64))]
    if activations[0].shape[1] != net.input_dim:
        raise DimensionMismatchError(
            f"input has {activations[0].shape[1]} features, model expects {net.input_dim}"
        )
    h = activations[0]
    for W, b in zip(net.encoder_weights, net.encoder_biases):
        h = np.tanh(h @ W + b)
        activations.append(h)
    rep = h
    faith_logit = rep @ net.faith_w + net.faith_b
    rep_for_density = GradientReversal.forward(rep)
    dens_pred = rep_for_density @ net.dens_w + net.dens_b
    return activations, faith_logit, dens_pred


def _losses(faith_logit, labels, dens_pred, dens_target) -> tuple[float, float]:
    sign = 2.0 * labels - 1.0
    loss_faith = float(np.logaddexp(0.0, -sign * faith_logit).mean())
    loss_dens = float(((dens_pred - dens_target) ** 2).mean())
    return loss_faith, loss_dens


def loss_and_grads(net: AdversarialNet, X, labels, dens_target, lam: float):
    """One forward/backward pass. Returns (loss_faith, loss_dens, grads).

    grads holds per-parameter arrays; encoder gradients already combine the
    faithfulness branch with the reversed density branch (-lam scaling), while
    the density head keeps its own unreversed gradients.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    labels = np.asarray(labels, dtype=np.float64)
    dens_target = np.asarray(dens_target, dtype=np.float64)
    m = X.shape[0]
    activations, faith_logit, dens_pred = _forward(net, X)
    rep = activations[-1]
    loss_faith, loss_dens = _losses(faith_logit, labels, dens_pred, dens_target)

    sign = 2.0 * labels - 1.0
    d_logit = -sign * _stable_sigmoid(-sign * faith_logit) / m  # d L_faith / d logit
    g_faith_w = rep.T @ d_logit
    g_faith_b = float(d_logit.sum())

    d_dens = 2.0 * (dens_pred - dens_target) / m  # d L_dens / d prediction
    g_dens_w = rep.T @ d_dens
    g_dens_b = float(d_dens.sum())

    g_rep = np.outer(d_logit, net.faith_w) + GradientReversal.backward(
        np.outer(d_dens, net.dens_w), lam
    )

    g_weights = [None] * len(net.encoder_weights)
    g_biases = [None] * len(net.encoder_biases)
    grad_h = g_rep
    for layer in range(len(net.encoder_weights) - 1, -1, -1):
        h_out = activations[layer + 1]
        dz = grad_h * (1.0 - h_out * h_out)  # tanh'
        g_weights[layer] = activations[layer].T @ dz
        g_biases[layer] = dz.sum(axis=0)
        grad_h = dz @ net.encoder_weights[layer].T
    grads = {
        "encoder_weights": g_weights,
        "encoder_biases": g_biases,
        "faith_w": g_faith_w,
        "faith_b": g_faith_b,
        "dens_w": g_dens_w,
        "dens_b": g_dens_b,
    }
    return loss_faith, loss_dens, grads


def _as_arrays(data) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if isinstance(data, SyntheticSplit):
        return data.features, data.labels, data.density
    feats, labels, dens = [], [], []
    for fv, label, target in data:
        feats.append(fv.values if isinstance(fv, FeatureVector) else np.asarray(fv, dtype=np.float64))
        labels.append(float(label))
        dens.append(float(target))
    return np.asarray(feats), np.asarray(labels), np.asarray(dens)


def train(data, config: TrainConfig | None = None, adversarial: bool = True) -> AdversarialNet:
    """Minibatch gradient descent with the reversal strength ramped by
    training progress p = step / total_steps; deterministic given the seed.

    With ``adversarial=False`` the reversal strength is held at zero, which
    leaves the encoder updates identical to a model without the density
    branch (the density head still fits, for probing comparability).
    """
    config = config or TrainConfig()
    X, labels, dens_raw = _as_arrays(data)
    if len(X) == 0:
        raise ValueError("training data is empty")
    if not (np.isfinite(X).all() and np.isfinite(labels).all() and np.isfinite(dens_raw).all()):
        raise ValueError("training data contains non-finite values")

    d_mean = float(dens_raw.mean())
    d_std = float(dens_raw.std())
    if d_std == 0.0:
        d_std = 1.0
    dens = (dens_raw - d_mean) / d_std

    net = AdversarialNet.init(
        input_dim=X.shape[1],
        hidden=config.hidden,
        seed=config.seed,
        gamma=config.gamma,
        lambda_max=config.lambda_max,
    )
    net.density_mean = d_mean
    net.density_std = d_std

    n = len(X)
    batches_per_epoch = (n + config.batch_size - 1) // config.batch_size
    total_steps = config.epochs * batches_per_epoch
    step = 0
    for epoch in range(config.epochs):
        gen = np.random.Generator(np.random.Philox(key=np.uint64([config.seed, epoch + 1])))
        order = gen.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            progress = step / total_steps
            lam = config.lambda_max * lambda_schedule(progress, config.gamma) if adversarial else 0.0
            loss_faith, loss_dens, grads = loss_and_grads(net, X[idx], labels[idx], dens[idx], lam)
            if not (math.isfinite(loss_faith) and math.isfinite(loss_dens)):
                raise DivergenceError(f"non-finite loss at step {step}", step=step)
            lr = config.learning_rate
            for layer in range(len(net.encoder_weights)):
                net.encoder_weights[layer] -= lr * grads["encoder_weights"][layer]
                net.encoder_biases[layer] -= lr * grads["encoder_biases"][layer]
            net.faith_w -= lr * grads["faith_w"]
            net.faith_b -= lr * grads["faith_b"]
            net.dens_w -= lr * grads["dens_w"]
            net.dens_b -= lr * grads["dens_b"]
            step += 1
    return net


def _stable_sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _sigmoid(z):
    # clipped into the open interval so scores are safe to log downstream
    return np.clip(_stable_sigmoid(z), 1e-12, 1.0 - 1e-12)


def score(net: AdversarialNet, fv: FeatureVector) -> float:
    """Logistic faithfulness probability in (0, 1)."""
    return float(score_batch(net, fv.values[None, :])[0])


def score_batch(net: AdversarialNet, X: np.ndarray) -> np.ndarray:
    rep = encode(net, X)
    return _sigmoid(rep @ net.faith_w + net.faith_b)


def probe_density(net: AdversarialNet, data) -> dict:
    """Fit a fresh affine probe from frozen encoder outputs to density targets.

    Reports the Spearman correlation between probe predictions and targets
    plus the probe's R-squared; degenerate representations yield a zero
    correlation with a warning instead of an error.
    """
    X, _, dens = _as_arrays(data)
    if len(X) < 10:
        raise ValueError("probe requires at least 10 examples")
    rep = encode(net, X)
    warning = None
    if float(rep.std(axis=0).max()) < 1e-12:
        return {"probe_spearman": 0.0, "probe_r2": 0.0,
                "warning": "encoder representation has zero variance"}
    design = np.column_stack([np.ones(len(rep)), rep])
    beta, *_ = np.linalg.lstsq(design, dens, rcond=None)
    preds = design @ beta
    ss_tot = float(((dens - dens.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return {"probe_spearman": 0.0, "probe_r2": 0.0,
                "warning": "density targets are constant"}
    r2 = 1.0 - float(((dens - preds) ** 2).sum()) / ss_tot
    try:
        rho = spearman(PairedSample(preds, dens))
    except DegenerateSampleError:
        rho = 0.0
        warning = "probe predictions are constant"
    return {"probe_spearman": rho, "probe_r2": r2, "warning": warning}


def gradient_check(net: AdversarialNet, batch, epsilon: float = 1e-5, lam: float = 0.7) -> float:
    """Max relative error between analytic and central-difference gradients.

    Encoder and faithfulness-head parameters are checked against the reversal
    surrogate L_faith - lam * L_dens, whose true gradient is exactly what the
    reversed backward pass produces for them; density-head parameters are
    checked against L_dens alone, since the reversal applies only upstream of
    the head input.
    """
    if not 1e-7 <= epsilon <= 1e-3:
        raise ValueError("epsilon must lie in [1e-7, 1e-3]")
    X, labels, dens = _as_arrays(batch)
    if len(X) == 0:
        raise ValueError("gradient check requires a non-empty batch")

    _, _, grads = loss_and_grads(net, X, labels, dens, lam)

    def surrogate() -> float:
        _, faith_logit, dens_pred = _forward(net, X)
        lf, ld = _losses(faith_logit, labels, dens_pred, dens)
        return lf - lam * ld

    def dens_loss() -> float:
        _, _, dens_pred = _forward(net, X)
        return float(((dens_pred - dens) ** 2).mean())

    checks = []
    for layer in range(len(net.encoder_weights)):
        checks.append((net.encoder_weights[layer], grads["encoder_weights"][layer], surrogate))
        checks.append((net.encoder_biases[layer], grads["encoder_biases"][layer], surrogate))
    checks.append((net.faith_w, grads["faith_w"], surrogate))
    checks.append((net.dens_w, grads["dens_w"], dens_loss))

    max_err = 0.0
    for array, grad, scalar_fn in checks:
        flat = array.reshape(-1)
        gflat = np.asarray(grad, dtype=np.float64).reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + epsilon
            up = scalar_fn()
            flat[i] = original - epsilon
            down = scalar_fn()
            flat[i] = original
            numeric = (up - down) / (2.0 * epsilon)
            denom = max(abs(gflat[i]), abs(numeric), 1e-8)
            max_err = max(max_err, abs(gflat[i] - numeric) / denom)
    # scalar biases
    for attr, grad_key, scalar_fn in (
        ("faith_b", "faith_b", surrogate),
        ("dens_b", "dens_b", dens_loss),
    ):
        original = getattr(net, attr)
        setattr(net, attr, original + epsilon)
        up = scalar_fn()
        setattr(net, attr, original - epsilon)
        down = scalar_fn()
        setattr(net, attr, original)
        numeric = (up - down) / (2.0 * epsilon)
        analytic = grads[grad_key]
        denom = max(abs(analytic), abs(numeric), 1e-8)
        max_err = max(max_err, abs(analytic - numeric) / denom)
    return max_err


@dataclass(frozen=True)
class SyntheticSplit:
    """Feature-level benchmark split with a planted label signal and a
    density-like channel whose label correlation differs by split."""

    features: np.ndarray
    labels: np.ndarray
    density: np.ndarray
    distribution_label: str
    strength: float
    seed: int

    def __len__(self) -> int:
        return len(self.labels)

    def rows(self):
        for i in range(len(self.labels)):
            yield FeatureVector(self.features[i]), float(self.labels[i]), float(self.density[i])


SIGNAL_SCALE = 1.0  # planted channel separation; Bayes accuracy ~0.84
NOISE_DIMS = 20


def generate_synthetic_benchmark(
    n_train: int, n_test: int, correlation_strength: float, seed: int = 0
) -> tuple[SyntheticSplit, SyntheticSplit]:
    """Paired train/test splits where only the train split lets the
    density-like channel track the label (at the requested strength)."""
    if n_train < 20 or n_test < 20:
        raise ValueError("benchmark splits require at least 20 examples")
    if not 0.0 <= correlation_strength <= 1.0:
        raise ValueError("correlation_strength must be in [0, 1]")

    def make(n: int, stream: int, correlated: bool) -> SyntheticSplit:
        gen = np.random.Generator(np.random.Philox(key=np.uint64([seed, stream])))
        labels = gen.integers(0, 2, size=n).astype(np.float64)
        signal = (2.0 * labels - 1.0) * SIGNAL_SCALE + gen.standard_normal(n)
        if correlated:
            flip = gen.random(n) < (1.0 - correlation_strength) / 2.0
            dens = np.where(flip, 1.0 - labels, labels)
        else:
            dens = gen.integers(0, 2, size=n).astype(np.float64)
        noise = gen.standard_normal((n, NOISE_DIMS))
        features = np.column_stack([noise, signal, dens])
        return SyntheticSplit(
            features=features,
            labels=labels,
            density=dens,
            distribution_label="eval" if correlated else "test",
            strength=correlation_strength,
            seed=seed,
        )

    return make(n_train, 1, True), make(n_test, 2, False)


def features_from_dataset(
    dataset: Dataset, aspect: str = "faithfulness", faith_threshold: float = 4.0
):
    """Training triples from a text dataset: overlap features, a binarized
    human label (score >= threshold), and the computed density target."""
    triples = []
    empty_ids = []
    for rec in dataset.records:
        out_tokens = tokenize(rec.output_text, origin="output")
        if len(out_tokens) == 0:
            empty_ids.append(rec.id)
            continue
        if aspect not in rec.human_scores:
            raise AnnotationError(
                f"record {rec.id!r} lacks human aspect {aspect!r}", record_ids=[rec.id]
            )
        src_tokens = tokenize(rec.source_text, origin="source")
        fv = featurize(src_tokens, out_tokens)
        label = 1.0 if rec.human_scores[aspect] >= faith_threshold else 0.0
        dens = density(extract_fragments(src_tokens, out_tokens))
        triples.append((fv, label, dens))
    if empty_ids:
        raise AnnotationError(
            f"cannot featurize records with empty output: {empty_ids}", record_ids=empty_ids
        )
    return triples


def save_checkpoint(net: AdversarialNet, path) -> None:
    payload = {
        "format_version": CHECKPOINT_VERSION,
        "activation": "tanh",
        "widths": [net.input_dim] + [W.shape[1] for W in net.encoder_weights],
        "encoder_weights": [W.tolist() for W in net.encoder_weights],
        "encoder_biases": [b.tolist() for b in net.encoder_biases],
        "faith_w": net.faith_w.tolist(),
        "faith_b": net.faith_b,
        "dens_w": net.dens_w.tolist(),
        "dens_b": net.dens_b,
        "gamma": net.gamma,
        "lambda_max": net.lambda_max,
        "density_mean": net.density_mean,
        "density_std": net.density_std,
    }
    Path(path).write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")


def load_checkpoint(path) -> AdversarialNet:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format_version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {payload.get('format_version')}")
    return AdversarialNet(
        encoder_weights=[np.asarray(W, dtype=np.float64) for W in payload["encoder_weights"]],
        encoder_biases=[np.asarray(b, dtype=np.float64) for b in payload["encoder_biases"]],
        faith_w=np.asarray(payload["faith_w"], dtype=np.float64),
        faith_b=float(payload["faith_b"]),
        dens_w=np.asarray(payload["dens_w"], dtype=np.float64),
        dens_b=float(payload["dens_b"]),
        gamma=float(payload["gamma"]),
        lambda_max=float(payload["lambda_max"]),
        density_mean=float(payload["density_mean"]),
        density_std=float(payload["density_std"]),
    )
