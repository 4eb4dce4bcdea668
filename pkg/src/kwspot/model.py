"""Float 1D CNN: layer stack definition, forward pass, Adam training, artifact I/O.

The network treats a feature matrix (n_frames x n_coeffs) as an
``n_coeffs``-channel sequence of length ``n_frames`` and slides 1-D kernels
along the time axis. All layer math is dtype-generic numpy so the gradient
checker can rerun it in float64.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import (
    CorruptArtifact,
    DivergedLoss,
    EmptyClass,
    ShapeMismatch,
    VersionMismatch,
)
from .features import FeatureStats, MfccConfig, MfccMatrix, feature_scale
from .keywords import KEYWORDS

FORMAT_VERSION = 1
_FLOAT_MAGIC = b"KWSA"


@dataclass(frozen=True)
class LayerSpec:
    kind: str  # conv1d | relu | maxpool1d | flatten | dropout | dense | softmax
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": self.params}

    @classmethod
    def from_dict(cls, d: dict) -> "LayerSpec":
        return cls(kind=d["kind"], params=dict(d["params"]))


def trace_shapes(layers: Sequence[LayerSpec], input_shape: tuple) -> list[tuple]:
    """Shape after each layer; raises ShapeMismatch if adjacent layers do not compose."""
    shapes = [tuple(input_shape)]
    cur = tuple(input_shape)
    for spec in layers:
        p = spec.params
        if spec.kind == "conv1d":
            if len(cur) != 2 or cur[0] != p["in_ch"]:
                raise ShapeMismatch(f"conv1d expects ({p['in_ch']}, L), got {cur}")
            stride = p.get("stride", 1)
            l_out = (cur[1] - p["kernel"]) // stride + 1
            if l_out < 1:
                raise ShapeMismatch(f"conv1d kernel {p['kernel']} too large for {cur}")
            cur = (p["out_ch"], l_out)
        elif spec.kind == "maxpool1d":
            if len(cur) != 2:
                raise ShapeMismatch(f"maxpool1d expects (C, L), got {cur}")
            l_out = cur[1] // p["size"]
            if l_out < 1:
                raise ShapeMismatch(f"pool size {p['size']} too large for {cur}")
            cur = (cur[0], l_out)
        elif spec.kind == "flatten":
            cur = (int(np.prod(cur)),)
        elif spec.kind == "dense":
            if len(cur) != 1 or cur[0] != p["in_dim"]:
                raise ShapeMismatch(f"dense expects ({p['in_dim']},), got {cur}")
            cur = (p["out_dim"],)
        elif spec.kind in ("relu", "dropout", "softmax"):
            pass
        else:
            raise ShapeMismatch(f"unknown layer kind {spec.kind!r}")
        shapes.append(cur)
    return shapes


@dataclass
class FloatModel:
    layers: list[LayerSpec]
    weights: list[dict]  # per layer: {"w": ..., "b": ...} or {}
    class_labels: tuple[str, ...]
    mfcc_config: MfccConfig
    feature_stats: FeatureStats
    seed: int = 0

    def __post_init__(self):
        shapes = trace_shapes(self.layers, self.input_shape)
        if shapes[-1] != (len(self.class_labels),):
            raise ShapeMismatch(
                f"final layer emits {shapes[-1]}, need ({len(self.class_labels)},)"
            )

    @property
    def input_shape(self) -> tuple[int, int]:
        return (self.mfcc_config.n_coeffs, self.mfcc_config.n_frames)


@dataclass(frozen=True)
class Prediction:
    probs: np.ndarray
    top_label: str
    confidence: float


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    batch: int = 32
    lr: float = 1e-3
    seed: int = 0


def default_architecture(n_classes: int = len(KEYWORDS),
                         class_labels: Optional[Sequence[str]] = None,
                         mfcc_config: Optional[MfccConfig] = None,
                         seed: int = 0) -> FloatModel:
    """Untrained two-conv network sized to stay far under a 192 KB artifact.

    Shape trace with defaults: 98 -> conv(k3) 96 -> pool 48 -> conv(k3) 46
    -> pool 23 -> flatten 368 -> dense n_classes.
    """
    if n_classes < 2:
        raise ValueError("need at least 2 classes")
    if class_labels is None:
        class_labels = KEYWORDS[:n_classes] if n_classes <= len(KEYWORDS) else tuple(
            f"class{i}" for i in range(n_classes))
    if len(class_labels) != n_classes:
        raise ValueError("class_labels length must equal n_classes")
    config = mfcc_config or MfccConfig()
    c_in, length = config.n_coeffs, config.n_frames
    layers = [
        LayerSpec("conv1d", {"in_ch": c_in, "out_ch": 8, "kernel": 3, "stride": 1}),
        LayerSpec("relu"),
        LayerSpec("maxpool1d", {"size": 2}),
        LayerSpec("conv1d", {"in_ch": 8, "out_ch": 16, "kernel": 3, "stride": 1}),
        LayerSpec("relu"),
        LayerSpec("maxpool1d", {"size": 2}),
        LayerSpec("flatten"),
        LayerSpec("dropout", {"rate": 0.25}),
    ]
    flat_dim = trace_shapes(layers, (c_in, length))[-1][0]
    layers.append(LayerSpec("dense", {"in_dim": flat_dim, "out_dim": n_classes}))
    layers.append(LayerSpec("softmax"))
    rng = np.random.Generator(np.random.PCG64(seed))
    weights = [init_layer_weights(spec, rng) for spec in layers]
    return FloatModel(layers=layers, weights=weights,
                      class_labels=tuple(class_labels), mfcc_config=config,
                      feature_stats=FeatureStats.identity(config.n_coeffs),
                      seed=seed)


def init_layer_weights(spec: LayerSpec, rng: np.random.Generator) -> dict:
    """Fan-in-scaled uniform weights, zero biases."""
    p = spec.params
    if spec.kind == "conv1d":
        fan_in = p["in_ch"] * p["kernel"]
        limit = 1.0 / np.sqrt(fan_in)
        w = rng.uniform(-limit, limit, size=(p["out_ch"], p["in_ch"], p["kernel"]))
        return {"w": w.astype(np.float32), "b": np.zeros(p["out_ch"], dtype=np.float32)}
    if spec.kind == "dense":
        limit = 1.0 / np.sqrt(p["in_dim"])
        w = rng.uniform(-limit, limit, size=(p["out_dim"], p["in_dim"]))
        return {"w": w.astype(np.float32), "b": np.zeros(p["out_dim"], dtype=np.float32)}
    return {}


# -- layer math (batched, dtype-generic) -------------------------------------

def _conv1d_fwd(x, w, b, stride):
    windows = sliding_window_view(x, w.shape[2], axis=2)[:, :, ::stride]
    out = np.einsum("nclk,ock->nol", windows, w, optimize=True)
    out += b[None, :, None]
    return out, (x, windows, w)


def _conv1d_bwd(cache, dout):
    x, windows, w = cache
    k = w.shape[2]
    dw = np.einsum("nclk,nol->ock", windows, dout, optimize=True)
    db = dout.sum(axis=(0, 2))
    dpad = np.pad(dout, ((0, 0), (0, 0), (k - 1, k - 1)))
    dx = np.einsum("nolk,ock->ncl", sliding_window_view(dpad, k, axis=2),
                   w[:, :, ::-1], optimize=True)
    return dx, {"w": dw, "b": db}


def _maxpool_fwd(x, size):
    n, c, length = x.shape
    l_out = length // size
    view = x[:, :, :l_out * size].reshape(n, c, l_out, size)
    idx = view.argmax(axis=3)
    out = np.take_along_axis(view, idx[..., None], axis=3)[..., 0]
    return out, (x.shape, size, idx)


def _maxpool_bwd(cache, dout):
    in_shape, size, idx = cache
    n, c, length = in_shape
    l_out = length // size
    dx = np.zeros(in_shape, dtype=dout.dtype)
    dview = dx[:, :, :l_out * size].reshape(n, c, l_out, size)
    np.put_along_axis(dview, idx[..., None], dout[..., None], axis=3)
    return dx


def forward_pass(model: FloatModel, x: np.ndarray, training: bool = False,
                 dropout_rng: Optional[np.random.Generator] = None, tap=None):
    """Run the stack up to the logits. x has shape (N, C, L).

    Returns (logits, caches); the terminal softmax layer is applied by the
    caller (softmax for inference, fused with cross-entropy for training).
    ``tap(i, out)``, when given, observes each layer's output (calibration).
    """
    caches = []
    out = x
    for i, (spec, wts) in enumerate(zip(model.layers, model.weights)):
        kind = spec.kind
        if kind == "conv1d":
            out, cache = _conv1d_fwd(out, wts["w"].astype(out.dtype),
                                     wts["b"].astype(out.dtype),
                                     spec.params.get("stride", 1))
            caches.append(cache)
        elif kind == "relu":
            mask = out > 0
            out = out * mask
            caches.append(mask)
        elif kind == "maxpool1d":
            out, cache = _maxpool_fwd(out, spec.params["size"])
            caches.append(cache)
        elif kind == "flatten":
            caches.append(out.shape)
            out = out.reshape(out.shape[0], -1)
        elif kind == "dropout":
            if training:
                rate = spec.params["rate"]
                keep = (dropout_rng.random(out.shape) >= rate).astype(out.dtype)
                out = out * keep / (1.0 - rate)
                caches.append((keep, rate))
            else:
                caches.append(None)
        elif kind == "dense":
            w = wts["w"].astype(out.dtype)
            caches.append((out, w))
            out = out @ w.T + wts["b"].astype(out.dtype)
        elif kind == "softmax":
            caches.append(None)  # handled by the caller
        else:
            raise ShapeMismatch(f"unknown layer kind {kind!r}")
        if tap is not None:
            tap(i, out)
    return out, caches


def backward_pass(model: FloatModel, caches: list, dlogits: np.ndarray) -> list[dict]:
    """Backprop dlogits through every layer; returns per-layer weight grads."""
    grads: list[dict] = [dict() for _ in model.layers]
    dout = dlogits
    for i in range(len(model.layers) - 1, -1, -1):
        kind = model.layers[i].kind
        cache = caches[i]
        if kind == "conv1d":
            dout, g = _conv1d_bwd(cache, dout)
            grads[i] = g
        elif kind == "relu":
            dout = dout * cache
        elif kind == "maxpool1d":
            dout = _maxpool_bwd(cache, dout)
        elif kind == "flatten":
            dout = dout.reshape(cache)
        elif kind == "dropout":
            if cache is not None:
                keep, rate = cache
                dout = dout * keep / (1.0 - rate)
        elif kind == "dense":
            x_in, w = cache
            grads[i] = {"w": dout.T @ x_in, "b": dout.sum(axis=0)}
            dout = dout @ w
        elif kind == "softmax":
            pass
    return grads


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(logits: np.ndarray, targets: np.ndarray):
    """Mean CE loss and dloss/dlogits for integer targets."""
    n = logits.shape[0]
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    loss = float(np.mean(log_z - shifted[np.arange(n), targets]))
    probs = softmax(logits)
    probs[np.arange(n), targets] -= 1.0
    return loss, probs / n


def scale_features(model: FloatModel, features: MfccMatrix) -> np.ndarray:
    """Standardized features as a (C, L) array ready for the conv stack."""
    expected = (model.mfcc_config.n_frames, model.mfcc_config.n_coeffs)
    if features.values.shape != expected:
        raise ShapeMismatch(f"expected features {expected}, got {features.values.shape}")
    scaled = feature_scale(features, model.feature_stats)
    return scaled.values.T


def forward(model: FloatModel, features: MfccMatrix) -> Prediction:
    """Deterministic inference (dropout disabled) on one feature matrix."""
    x = scale_features(model, features)[None].astype(np.float32)
    logits, _ = forward_pass(model, x, training=False)
    probs = softmax(logits.astype(np.float64))[0]
    top = int(np.argmax(probs))
    return Prediction(probs=probs, top_label=model.class_labels[top],
                      confidence=float(probs[top]))


def train(model: FloatModel, examples: Sequence[tuple[MfccMatrix, str]],
          hyper: TrainConfig = TrainConfig()):
    """Minibatch Adam on softmax cross-entropy.

    Returns (trained model, per-epoch log). Feature statistics are computed
    here, on the training examples only, and stored on the returned model.
    """
    from .features import compute_feature_stats

    label_to_idx = {lab: i for i, lab in enumerate(model.class_labels)}
    counts = {lab: 0 for lab in model.class_labels}
    for _, lab in examples:
        if lab not in label_to_idx:
            raise EmptyClass(f"example label {lab!r} not among model classes")
        counts[lab] += 1
    missing = [lab for lab, c in counts.items() if c == 0]
    if missing:
        raise EmptyClass(f"no training clips for: {', '.join(missing)}")

    stats = compute_feature_stats([m for m, _ in examples])
    trained = replace(model, feature_stats=stats,
                      weights=[{k: v.copy() for k, v in w.items()}
                               for w in model.weights])
    x_all = np.stack([scale_features(trained, m) for m, _ in examples]).astype(np.float32)
    y_all = np.array([label_to_idx[lab] for _, lab in examples], dtype=np.int64)

    rng = np.random.Generator(np.random.PCG64(hyper.seed))
    adam_m = [{k: np.zeros_like(v) for k, v in w.items()} for w in trained.weights]
    adam_v = [{k: np.zeros_like(v) for k, v in w.items()} for w in trained.weights]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    step = 0
    log = []
    n = len(examples)
    for epoch in range(hyper.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, hyper.batch):
            batch_idx = order[start:start + hyper.batch]
            xb, yb = x_all[batch_idx], y_all[batch_idx]
            logits, caches = forward_pass(trained, xb, training=True, dropout_rng=rng)
            loss, dlogits = cross_entropy(logits, yb)
            if not np.isfinite(loss):
                raise DivergedLoss(f"loss became {loss} at epoch {epoch}")
            epoch_loss += loss * len(batch_idx)
            grads = backward_pass(trained, caches, dlogits)
            step += 1
            for li, g in enumerate(grads):
                for key, grad in g.items():
                    grad = grad.astype(np.float32)
                    adam_m[li][key] = beta1 * adam_m[li][key] + (1 - beta1) * grad
                    adam_v[li][key] = beta2 * adam_v[li][key] + (1 - beta2) * grad ** 2
                    m_hat = adam_m[li][key] / (1 - beta1 ** step)
                    v_hat = adam_v[li][key] / (1 - beta2 ** step)
                    trained.weights[li][key] -= (
                        hyper.lr * m_hat / (np.sqrt(v_hat) + eps)
                    ).astype(np.float32)
        logits, _ = forward_pass(trained, x_all, training=False)
        accuracy = float(np.mean(np.argmax(logits, axis=1) == y_all))
        log.append({"epoch": epoch, "loss": epoch_loss / n, "accuracy": accuracy})
    return trained, log


def gradient_check(model: FloatModel, sample: tuple[MfccMatrix, str],
                   epsilon: float = 1e-5) -> float:
    """Max relative error between backprop and central finite differences.

    Runs the whole stack in float64 with dropout disabled.
    """
    features, label = sample
    target = np.array([model.class_labels.index(label)])
    x = scale_features(model, features)[None].astype(np.float64)
    model64 = replace(model, weights=[{k: v.astype(np.float64) for k, v in w.items()}
                                      for w in model.weights])

    logits, caches = forward_pass(model64, x, training=False)
    _, dlogits = cross_entropy(logits, target)
    analytic = backward_pass(model64, caches, dlogits)

    def loss_at() -> float:
        lg, _ = forward_pass(model64, x, training=False)
        loss, _ = cross_entropy(lg, target)
        return loss

    worst = 0.0
    for li, wts in enumerate(model64.weights):
        for key, tensor in wts.items():
            flat = tensor.reshape(-1)
            g_flat = analytic[li][key].reshape(-1)
            for j in range(flat.size):
                orig = flat[j]
                flat[j] = orig + epsilon
                up = loss_at()
                flat[j] = orig - epsilon
                down = loss_at()
                flat[j] = orig
                numeric = (up - down) / (2 * epsilon)
                denom = max(abs(g_flat[j]), abs(numeric), 1e-8)
                worst = max(worst, abs(g_flat[j] - numeric) / denom)
    return worst


# -- artifact I/O -------------------------------------------------------------

def _pack_artifact(magic: bytes, header: dict, payload: bytes) -> bytes:
    header = dict(header)
    header["payload_sha256"] = hashlib.sha256(payload).hexdigest()
    header["payload_bytes"] = len(payload)
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    return magic + struct.pack("<I", len(header_bytes)) + header_bytes + payload


def _unpack_artifact(blob: bytes, magic: bytes) -> tuple[dict, bytes]:
    if len(blob) < 8 or blob[:4] != magic:
        raise CorruptArtifact("bad magic or truncated file")
    (header_len,) = struct.unpack("<I", blob[4:8])
    if len(blob) < 8 + header_len:
        raise CorruptArtifact("truncated header")
    try:
        header = json.loads(blob[8:8 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptArtifact(f"unreadable header: {exc}") from exc
    if header.get("version") != FORMAT_VERSION:
        raise VersionMismatch(f"artifact version {header.get('version')!r}, "
                              f"reader supports {FORMAT_VERSION}")
    payload = blob[8 + header_len:]
    if len(payload) != header.get("payload_bytes"):
        raise CorruptArtifact("truncated payload")
    if hashlib.sha256(payload).hexdigest() != header.get("payload_sha256"):
        raise CorruptArtifact("payload checksum mismatch")
    return header, payload


def save_model(model: FloatModel, path) -> None:
    """Single binary file: JSON header + little-endian float32 weight payload."""
    tensors = []
    chunks = []
    offset = 0
    for li, wts in enumerate(model.weights):
        for key in sorted(wts):
            arr = np.ascontiguousarray(wts[key], dtype="<f4")
            raw = arr.tobytes()
            tensors.append({"layer": li, "name": key, "shape": list(arr.shape),
                            "offset": offset, "nbytes": len(raw)})
            chunks.append(raw)
            offset += len(raw)
    header = {
        "format": "kwspot-float",
        "version": FORMAT_VERSION,
        "layers": [spec.to_dict() for spec in model.layers],
        "class_labels": list(model.class_labels),
        "mfcc_config": model.mfcc_config.to_dict(),
        "feature_stats": model.feature_stats.to_dict(),
        "seed": model.seed,
        "tensors": tensors,
    }
    blob = _pack_artifact(_FLOAT_MAGIC, header, b"".join(chunks))
    with open(path, "wb") as fh:
        fh.write(blob)


def load_model(path) -> FloatModel:
    with open(path, "rb") as fh:
        blob = fh.read()
    header, payload = _unpack_artifact(blob, _FLOAT_MAGIC)
    layers = [LayerSpec.from_dict(d) for d in header["layers"]]
    weights: list[dict] = [dict() for _ in layers]
    for t in header["tensors"]:
        raw = payload[t["offset"]:t["offset"] + t["nbytes"]]
        arr = np.frombuffer(raw, dtype="<f4").reshape(t["shape"]).copy()
        weights[t["layer"]][t["name"]] = arr
    return FloatModel(
        layers=layers,
        weights=weights,
        class_labels=tuple(header["class_labels"]),
        mfcc_config=MfccConfig.from_dict(header["mfcc_config"]),
        feature_stats=FeatureStats.from_dict(header["feature_stats"]),
        seed=header["seed"],
    )
