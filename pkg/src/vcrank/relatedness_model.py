"""Trainable convolutional relatedness head over word-embedding rows.

Forward pass: K kernels of window n slide over the L x D input, ReLU
feature maps are max-pooled per kernel, and a sigmoid unit over the
pooled vector yields the relatedness probability. Training is plain
seed-deterministic mini-batch gradient descent on binary cross-entropy;
an analytic backward pass is provided together with a central
finite-difference checker.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

PROB_CLAMP = 1e-12


@dataclass
class CnnConfig:
    embed_dim: int
    window: int = 3
    num_kernels: int = 100
    seed: int = 42
    learning_rate: float = 0.01
    epochs: int = 5
    batch_size: int = 16

    def __post_init__(self):
        if self.embed_dim < 2:
            raise ValueError("embed_dim must be >= 2")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.num_kernels < 1:
            raise ValueError("num_kernels must be >= 1")


@dataclass
class CnnParams:
    """kernels (K, n, D), biases (K,), out_weights (K,), out_bias."""

    kernels: np.ndarray
    biases: np.ndarray
    out_weights: np.ndarray
    out_bias: float

    def __post_init__(self):
        self.kernels = np.asarray(self.kernels, dtype=float)
        self.biases = np.asarray(self.biases, dtype=float)
        self.out_weights = np.asarray(self.out_weights, dtype=float)
        self.out_bias = float(self.out_bias)
        if self.kernels.ndim != 3:
            raise ValueError("kernels must have shape (K, n, D)")
        k = self.kernels.shape[0]
        if self.biases.shape != (k,) or self.out_weights.shape != (k,):
            raise ValueError("biases/out_weights length must match kernel count")
        self._check_finite()

    def _check_finite(self):
        for arr in (self.kernels, self.biases, self.out_weights):
            if not np.all(np.isfinite(arr)):
                raise FloatingPointError("non-finite parameter value")
        if not np.isfinite(self.out_bias):
            raise FloatingPointError("non-finite parameter value")

    def copy(self) -> "CnnParams":
        return CnnParams(
            self.kernels.copy(), self.biases.copy(), self.out_weights.copy(), self.out_bias
        )


def init_params(cfg: CnnConfig) -> CnnParams:
    """Uniform init in +-1/sqrt(n*D), deterministic in the seed."""
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    bound = 1.0 / np.sqrt(cfg.window * cfg.embed_dim)
    return CnnParams(
        kernels=rng.uniform(-bound, bound, size=(cfg.num_kernels, cfg.window, cfg.embed_dim)),
        biases=rng.uniform(-bound, bound, size=cfg.num_kernels),
        out_weights=rng.uniform(-bound, bound, size=cfg.num_kernels),
        out_bias=0.0,
    )


def make_sequence(context_vecs, caption_vecs) -> np.ndarray:
    """Stack context rows, one all-zero separator row, caption rows."""
    parts = []
    if len(context_vecs):
        parts.append(np.asarray(context_vecs, dtype=float))
    dim = parts[0].shape[1] if parts else np.asarray(caption_vecs, dtype=float).shape[1]
    parts.append(np.zeros((1, dim)))
    if len(caption_vecs):
        parts.append(np.asarray(caption_vecs, dtype=float))
    return np.vstack(parts)


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-x))
    e = np.exp(x)
    return e / (1.0 + e)


def _windows(x: np.ndarray, n: int) -> np.ndarray:
    """(L-n+1, n*D) matrix of flattened sliding windows, zero-padded to
    at least one window."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError("input must be a nonempty L x D matrix")
    length, dim = x.shape
    if length < n:
        x = np.vstack([x, np.zeros((n - length, dim))])
        length = n
    return np.lib.stride_tricks.sliding_window_view(x, (n, dim)).reshape(length - n + 1, n * dim)


def forward(params: CnnParams, x: np.ndarray):
    """Return (probability, feature_maps) for one L x D input.

    feature_maps has shape (K, L-n+1) after any zero padding.
    """
    k, n, d = params.kernels.shape
    if np.asarray(x).shape[1] != d:
        raise ValueError(f"input dim {np.asarray(x).shape[1]} != kernel dim {d}")
    win = _windows(x, n)
    pre = win @ params.kernels.reshape(k, n * d).T + params.biases
    fmaps = np.maximum(pre, 0.0).T
    pooled = fmaps.max(axis=1)
    score = float(pooled @ params.out_weights + params.out_bias)
    return _sigmoid(score), fmaps


def loss(params: CnnParams, batch) -> float:
    """Mean binary cross-entropy over (input, label) pairs."""
    batch = list(batch)
    if not batch:
        raise ValueError("batch must be nonempty")
    total = 0.0
    for x, y in batch:
        if y not in (0, 1):
            raise ValueError(f"label {y!r} must be 0 or 1")
        p, _ = forward(params, x)
        p = min(max(p, PROB_CLAMP), 1.0 - PROB_CLAMP)
        total += -(y * np.log(p) + (1 - y) * np.log(1.0 - p))
    return total / len(batch)


def gradient(params: CnnParams, batch) -> CnnParams:
    """Analytic gradient of the batch loss, packed as a CnnParams.

    Max-pool ties send the gradient to the first maximal index; ReLU
    uses the zero subgradient at exactly zero.
    """
    batch = list(batch)
    if not batch:
        raise ValueError("batch must be nonempty")
    k, n, d = params.kernels.shape
    g_kernels = np.zeros_like(params.kernels)
    g_biases = np.zeros_like(params.biases)
    g_out_w = np.zeros_like(params.out_weights)
    g_out_b = 0.0
    flat_kernels = params.kernels.reshape(k, n * d)
    for x, y in batch:
        win = _windows(x, n)
        pre = win @ flat_kernels.T + params.biases  # (I, K)
        fmaps = np.maximum(pre, 0.0)
        arg = fmaps.argmax(axis=0)  # first maximal window per kernel
        pooled = fmaps[arg, np.arange(k)]
        p = _sigmoid(float(pooled @ params.out_weights + params.out_bias))
        dscore = p - y  # d(BCE)/d(score) through the sigmoid
        g_out_w += dscore * pooled
        g_out_b += dscore
        dpooled = dscore * params.out_weights
        active = pre[arg, np.arange(k)] > 0.0
        dz = np.where(active, dpooled, 0.0)
        g_biases += dz
        g_kernels += (dz[:, None] * win[arg]).reshape(k, n, d)
    m = len(batch)
    return CnnParams(g_kernels / m, g_biases / m, g_out_w / m, g_out_b / m)


def _pack(params: CnnParams) -> np.ndarray:
    return np.concatenate(
        [params.kernels.ravel(), params.biases, params.out_weights, [params.out_bias]]
    )


def _unpack(vec: np.ndarray, like: CnnParams) -> CnnParams:
    k, n, d = like.kernels.shape
    i = k * n * d
    return CnnParams(
        vec[:i].reshape(k, n, d), vec[i : i + k], vec[i + k : i + 2 * k], vec[i + 2 * k]
    )


def grad_check(params: CnnParams, example, eps: float = 1e-5) -> float:
    """Max relative error between analytic and central finite-difference
    gradients on one (input, label) example."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    analytic = _pack(gradient(params, [example]))
    theta = _pack(params)
    numeric = np.empty_like(theta)
    for i in range(theta.size):
        bumped = theta.copy()
        bumped[i] = theta[i] + eps
        hi = loss(_unpack(bumped, params), [example])
        bumped[i] = theta[i] - eps
        lo = loss(_unpack(bumped, params), [example])
        numeric[i] = (hi - lo) / (2.0 * eps)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-8)
    return float(np.max(np.abs(analytic - numeric) / denom))


@dataclass
class TrainResult:
    params: CnnParams
    epoch_losses: list[float] = field(default_factory=list)


def train(dataset, cfg: CnnConfig) -> TrainResult:
    """Seed-deterministic mini-batch gradient descent.

    Batch order is reshuffled each epoch from the same PCG64 stream;
    epoch losses are full-dataset means recorded after each epoch.
    """
    dataset = list(dataset)
    if not dataset:
        raise ValueError("dataset must be nonempty")
    params = init_params(cfg)
    rng = np.random.Generator(np.random.PCG64(cfg.seed + 1))
    losses = []
    for _ in range(cfg.epochs):
        order = rng.permutation(len(dataset))
        for start in range(0, len(dataset), cfg.batch_size):
            batch = [dataset[i] for i in order[start : start + cfg.batch_size]]
            g = gradient(params, batch)
            params = CnnParams(
                params.kernels - cfg.learning_rate * g.kernels,
                params.biases - cfg.learning_rate * g.biases,
                params.out_weights - cfg.learning_rate * g.out_weights,
                params.out_bias - cfg.learning_rate * g.out_bias,
            )
        epoch_loss = loss(params, dataset)
        if not np.isfinite(epoch_loss):
            raise FloatingPointError("training diverged: non-finite loss")
        losses.append(epoch_loss)
    return TrainResult(params=params, epoch_losses=losses)


def accuracy(params: CnnParams, dataset) -> float:
    """Fraction of examples whose thresholded probability matches."""
    dataset = list(dataset)
    hits = sum(1 for x, y in dataset if (forward(params, x)[0] >= 0.5) == bool(y))
    return hits / len(dataset)


def save_params(params: CnnParams, path) -> None:
    row = {
        "kernels": params.kernels.tolist(),
        "biases": params.biases.tolist(),
        "out_weights": params.out_weights.tolist(),
        "out_bias": params.out_bias,
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(row, sort_keys=True))
        fh.write("\n")


def load_params(path) -> CnnParams:
    with open(path, encoding="utf-8") as fh:
        row = json.loads(fh.readline())
    return CnnParams(
        np.array(row["kernels"], dtype=float),
        np.array(row["biases"], dtype=float),
        np.array(row["out_weights"], dtype=float),
        float(row["out_bias"]),
    )
