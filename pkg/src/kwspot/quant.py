"""Post-training int8 quantization and a fixed-point inference engine.

Weights are per-tensor symmetric int8 (zero_point 0); activations are
asymmetric int8 with scale (max-min)/255. Conv and dense accumulate in
int32 and requantize through an integer multiplier (int32 mantissa plus
right shift, round-half-away-from-zero). The final softmax runs in float
on dequantized logits. All activation tensors live in one preplanned
arena; inference creates no new tensor buffers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import (
    ArenaOverflow,
    BudgetExceeded,
    CorruptArtifact,
    EmptyCalibrationSet,
    InvalidConfig,
    ShapeMismatch,
    UncalibratedTensor,
)
from .features import FeatureStats, MfccConfig, MfccMatrix, STD_GUARD
from .kernels import get_backend
from .model import (
    FORMAT_VERSION,
    FloatModel,
    LayerSpec,
    Prediction,
    _pack_artifact,
    _unpack_artifact,
    forward_pass,
    scale_features,
    trace_shapes,
)

_QUANT_MAGIC = b"KWSQ"
DEFAULT_ARENA_BUDGET = 196608  # 192 KiB: leaves headroom under a 256 KB SRAM
ARENA_ALIGN = 8


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest with halves away from zero (never banker's)."""
    x = np.asarray(x, dtype=np.float64)
    return np.copysign(np.floor(np.abs(x) + 0.5), x)


@dataclass(frozen=True)
class QuantParams:
    scale: float
    zero_point: int

    def __post_init__(self):
        if self.scale <= 0:
            raise InvalidConfig("quantization scale must be positive")
        if not -128 <= self.zero_point <= 127:
            raise InvalidConfig("zero_point must fit in int8")

    def quantize(self, x: np.ndarray) -> np.ndarray:
        q = round_half_away(np.asarray(x, dtype=np.float64) / self.scale)
        return np.clip(q + self.zero_point, -128, 127).astype(np.int8)

    def dequantize(self, q: np.ndarray) -> np.ndarray:
        return (np.asarray(q, dtype=np.float64) - self.zero_point) * self.scale


def activation_params(lo: float, hi: float) -> QuantParams:
    """Asymmetric int8 params for a calibrated [lo, hi] range containing 0."""
    scale = (hi - lo) / 255.0
    zp = int(np.clip(round_half_away(np.array(-128.0 - lo / scale)), -128, 127))
    return QuantParams(scale=scale, zero_point=zp)


def symmetric_weight_params(w: np.ndarray) -> QuantParams:
    """Per-tensor symmetric params: stored values stay in [-127, 127]."""
    peak = max(float(np.max(np.abs(w))), 1e-8)
    return QuantParams(scale=peak / 127.0, zero_point=0)


def quantized_multiplier(m: float) -> tuple[int, int]:
    """Represent a positive real multiplier as (int32 mantissa, right shift)."""
    if m <= 0:
        raise InvalidConfig("requantization multiplier must be positive")
    mant_f, exp = math.frexp(m)  # m = mant_f * 2**exp, mant_f in [0.5, 1)
    mantissa = int(math.floor(mant_f * (1 << 31) + 0.5))
    if mantissa == (1 << 31):
        mantissa >>= 1
        exp += 1
    shift = 31 - exp
    if shift > 62:  # vanishingly small multiplier: shed precision, keep shift legal
        mantissa >>= shift - 62
        shift = 62
    if shift < 1:
        raise InvalidConfig(f"multiplier {m} too large to requantize")
    return mantissa, shift


# -- calibration ---------------------------------------------------------------

def calibrate(model: FloatModel, rep_set: Sequence[MfccMatrix]) -> dict[str, tuple[float, float]]:
    """Per-tensor activation min/max over the representative set.

    Tensor keys: ``input`` for the scaled feature grid, ``act{i}`` for the
    output of layer index ``i``. Every range is expanded to include 0 and a
    degenerate all-zero range is widened to [0, 1e-5].
    """
    if not rep_set:
        raise EmptyCalibrationSet("need at least one representative input")
    ranges: dict[str, list[float]] = {}

    def update(key: str, arr: np.ndarray):
        lo, hi = float(np.min(arr)), float(np.max(arr))
        if key in ranges:
            ranges[key][0] = min(ranges[key][0], lo)
            ranges[key][1] = max(ranges[key][1], hi)
        else:
            ranges[key] = [lo, hi]

    for m in rep_set:
        x = scale_features(model, m)[None].astype(np.float32)
        update("input", x)
        forward_pass(model, x, training=False,
                     tap=lambda i, out: update(f"act{i}", out))

    final: dict[str, tuple[float, float]] = {}
    for key, (lo, hi) in ranges.items():
        lo, hi = min(lo, 0.0), max(hi, 0.0)
        if hi == lo:
            hi = lo + 1e-5
        final[key] = (lo, hi)
    return final


# -- quantized program ----------------------------------------------------------

@dataclass
class QConvOp:
    w_q: np.ndarray         # int8 (out_ch, in_ch, k)
    bias_q: np.ndarray      # int32 (out_ch,)
    w_scale: float
    in_qp: QuantParams
    out_qp: QuantParams
    mantissa: int
    shift: int
    relu: bool
    in_shape: tuple
    out_shape: tuple
    kind: str = "conv1d"


@dataclass
class QPoolOp:
    size: int
    in_shape: tuple
    out_shape: tuple
    kind: str = "maxpool1d"


@dataclass
class QFlattenOp:
    in_shape: tuple
    out_shape: tuple
    kind: str = "flatten"


@dataclass
class QDenseOp:
    w_q: np.ndarray         # int8 (out_dim, in_dim)
    bias_q: np.ndarray      # int32 (out_dim,)
    w_scale: float
    in_qp: QuantParams
    logit_scale: float      # in_scale * w_scale: dequantizes the int32 logits
    in_shape: tuple
    out_shape: tuple
    kind: str = "dense"


@dataclass
class QuantizedModel:
    input_qp: QuantParams
    ops: list
    class_labels: tuple[str, ...]
    mfcc_config: MfccConfig
    feature_stats: FeatureStats
    arch_layers: list[LayerSpec] = field(default_factory=list)

    @property
    def input_shape(self) -> tuple[int, int]:
        return (self.mfcc_config.n_coeffs, self.mfcc_config.n_frames)

    def weight_bytes(self) -> int:
        total = 0
        for op in self.ops:
            if hasattr(op, "w_q"):
                total += op.w_q.nbytes + op.bias_q.nbytes
        return total


def quantize_model(model: FloatModel, ranges: dict[str, tuple[float, float]]) -> QuantizedModel:
    """Convert a trained float model to the int8 program described above."""

    def qp_for(key: str) -> QuantParams:
        if key not in ranges:
            raise UncalibratedTensor(f"no calibrated range for tensor {key!r}")
        return activation_params(*ranges[key])

    shapes = trace_shapes(model.layers, (model.mfcc_config.n_coeffs,
                                         model.mfcc_config.n_frames))
    cur_qp = qp_for("input")
    ops: list = []
    i = 0
    layers = model.layers
    while i < len(layers):
        spec = layers[i]
        p = spec.params
        if spec.kind == "conv1d":
            if p.get("stride", 1) != 1:
                raise InvalidConfig("quantized conv supports stride 1 only")
            w = model.weights[i]["w"].astype(np.float64)
            b = model.weights[i]["b"].astype(np.float64)
            w_qp = symmetric_weight_params(w)
            w_q = np.clip(round_half_away(w / w_qp.scale), -127, 127).astype(np.int8)
            fused_relu = i + 1 < len(layers) and layers[i + 1].kind == "relu"
            out_key = f"act{i + 1}" if fused_relu else f"act{i}"
            out_qp = qp_for(out_key)
            bias_scale = cur_qp.scale * w_qp.scale
            bias_q = round_half_away(b / bias_scale).astype(np.int64)
            bias_q = np.clip(bias_q, np.iinfo(np.int32).min,
                             np.iinfo(np.int32).max).astype(np.int32)
            mantissa, shift = quantized_multiplier(bias_scale / out_qp.scale)
            ops.append(QConvOp(w_q=w_q, bias_q=bias_q, w_scale=w_qp.scale,
                               in_qp=cur_qp, out_qp=out_qp, mantissa=mantissa,
                               shift=shift, relu=fused_relu,
                               in_shape=shapes[i], out_shape=shapes[i + 1]))
            cur_qp = out_qp
            i += 2 if fused_relu else 1
        elif spec.kind == "maxpool1d":
            ops.append(QPoolOp(size=p["size"], in_shape=shapes[i],
                               out_shape=shapes[i + 1]))
            i += 1
        elif spec.kind == "flatten":
            ops.append(QFlattenOp(in_shape=shapes[i], out_shape=shapes[i + 1]))
            i += 1
        elif spec.kind == "dropout":
            i += 1  # inference-only artifact: dropout disappears
        elif spec.kind == "dense":
            w = model.weights[i]["w"].astype(np.float64)
            b = model.weights[i]["b"].astype(np.float64)
            w_qp = symmetric_weight_params(w)
            w_q = np.clip(round_half_away(w / w_qp.scale), -127, 127).astype(np.int8)
            bias_scale = cur_qp.scale * w_qp.scale
            bias_q = round_half_away(b / bias_scale).astype(np.int64)
            bias_q = np.clip(bias_q, np.iinfo(np.int32).min,
                             np.iinfo(np.int32).max).astype(np.int32)
            ops.append(QDenseOp(w_q=w_q, bias_q=bias_q, w_scale=w_qp.scale,
                                in_qp=cur_qp, logit_scale=bias_scale,
                                in_shape=shapes[i], out_shape=shapes[i + 1]))
            i += 1
        elif spec.kind in ("relu", "softmax"):
            i += 1  # relu is fused into the producing conv; softmax runs in float
        else:
            raise InvalidConfig(f"cannot quantize layer kind {spec.kind!r}")
        if ops and isinstance(ops[-1], QDenseOp) and i < len(layers):
            for rest in layers[i:]:
                if rest.kind not in ("softmax",):
                    raise InvalidConfig("dense must be the final compute layer")
    return QuantizedModel(input_qp=qp_for("input"), ops=ops,
                          class_labels=model.class_labels,
                          mfcc_config=model.mfcc_config,
                          feature_stats=model.feature_stats,
                          arch_layers=list(model.layers))


# -- arena planning --------------------------------------------------------------

@dataclass(frozen=True)
class BufferReq:
    name: str
    nbytes: int
    birth: int
    death: int  # inclusive step of last use


@dataclass
class ArenaPlan:
    total_bytes: int
    offsets: dict[str, int]
    requests: dict[str, BufferReq]

    def validate(self) -> None:
        """Exhaustive pairwise check: live-together buffers never overlap."""
        items = list(self.requests.values())
        for a_idx in range(len(items)):
            for b_idx in range(a_idx + 1, len(items)):
                a, b = items[a_idx], items[b_idx]
                if a.birth <= b.death and b.birth <= a.death:
                    a_off, b_off = self.offsets[a.name], self.offsets[b.name]
                    if a_off < b_off + b.nbytes and b_off < a_off + a.nbytes:
                        raise ArenaOverflow(
                            f"buffers {a.name} and {b.name} overlap in the plan"
                        )


def _align(n: int) -> int:
    return (n + ARENA_ALIGN - 1) // ARENA_ALIGN * ARENA_ALIGN


def plan_buffers(requests: Sequence[BufferReq], budget_bytes: int) -> ArenaPlan:
    """Greedy offset assignment honoring lifetimes; largest buffers first."""
    offsets: dict[str, int] = {}
    placed: list[BufferReq] = []
    for req in sorted(requests, key=lambda r: (-r.nbytes, r.name)):
        conflicts = sorted(
            ((offsets[p.name], p.nbytes) for p in placed
             if p.birth <= req.death and req.birth <= p.death),
            key=lambda t: t[0],
        )
        candidate = 0
        for off, nbytes in conflicts:
            if candidate + req.nbytes <= off:
                break
            candidate = max(candidate, _align(off + nbytes))
        offsets[req.name] = candidate
        placed.append(req)
    total = max((offsets[r.name] + r.nbytes for r in requests), default=0)
    plan = ArenaPlan(total_bytes=total,
                     offsets=offsets,
                     requests={r.name: r for r in requests})
    plan.validate()
    if total > budget_bytes:
        raise BudgetExceeded(minimal_bytes=total, budget_bytes=budget_bytes)
    return plan


def arena_requests(qmodel: QuantizedModel) -> list[BufferReq]:
    """Activation buffers and lifetimes for one inference pass."""
    c, length = qmodel.input_shape
    reqs = [
        BufferReq("input_f", c * length * 8, birth=0, death=1),
        BufferReq("t_in", c * length, birth=1, death=2),
    ]
    live = "t_in"
    live_death = 2
    step = 2
    for j, op in enumerate(qmodel.ops):
        if isinstance(op, QConvOp):
            acc_n = int(np.prod(op.out_shape)) * 4
            out_n = int(np.prod(op.out_shape))
            reqs.append(BufferReq(f"acc{j}", acc_n, birth=step, death=step))
            reqs.append(BufferReq(f"t{j}", out_n, birth=step, death=step + 1))
            live = f"t{j}"
        elif isinstance(op, QPoolOp):
            out_n = int(np.prod(op.out_shape))
            reqs.append(BufferReq(f"t{j}", out_n, birth=step, death=step + 1))
            live = f"t{j}"
        elif isinstance(op, QFlattenOp):
            # reshaped view of the live buffer: extend its lifetime instead
            idx = next(i for i, r in enumerate(reqs) if r.name == live)
            reqs[idx] = replace(reqs[idx], death=step + 1)
        elif isinstance(op, QDenseOp):
            out_n = int(np.prod(op.out_shape))
            reqs.append(BufferReq(f"acc{j}", out_n * 4, birth=step, death=step))
            reqs.append(BufferReq("logits", out_n * 8, birth=step, death=step + 1))
            reqs.append(BufferReq("probs", out_n * 8, birth=step + 1, death=step + 1))
            live = "probs"
        step += 1
    return reqs


def plan_arena(qmodel: QuantizedModel, budget_bytes: int = DEFAULT_ARENA_BUDGET) -> ArenaPlan:
    return plan_buffers(arena_requests(qmodel), budget_bytes)


# -- runtime ---------------------------------------------------------------------

class QuantRuntime:
    """One inference context: owns an arena and a compiled kernel program.

    All tensor buffers are views into the arena, created during construction;
    ``run`` only executes bound kernels and writes in place (the numpy backend
    may use kernel-internal C scratch, the compiled backend uses none). One
    inference at a time per runtime; the model itself is shareable.
    """

    def __init__(self, qmodel: QuantizedModel, backend=None,
                 budget_bytes: int = DEFAULT_ARENA_BUDGET):
        if isinstance(backend, str) or backend is None:
            backend = get_backend(backend)
        self.backend = backend
        self.qmodel = qmodel
        self.plan = plan_arena(qmodel, budget_bytes)
        self._arena = np.zeros(self.plan.total_bytes, dtype=np.uint8)
        self.alloc_count = 0
        self._frozen = False

        c, length = qmodel.input_shape
        stats = qmodel.feature_stats
        self._mean = np.ascontiguousarray(stats.mean[:, None])
        self._inv_std = np.ascontiguousarray(1.0 / np.maximum(stats.std, STD_GUARD)[:, None])

        self._input_f = self._view("input_f", np.float64, (c, length))
        t_in = self._view("t_in", np.int8, (c, length))
        program = [backend.bind_quantize(self._input_f, 1.0 / qmodel.input_qp.scale,
                                         qmodel.input_qp.zero_point, t_in)]
        cur = t_in
        for j, op in enumerate(qmodel.ops):
            if isinstance(op, QConvOp):
                acc = self._view(f"acc{j}", np.int32, op.out_shape)
                out = self._view(f"t{j}", np.int8, op.out_shape)
                clamp_lo = op.out_qp.zero_point if op.relu else -128
                program.append(backend.bind_conv1d(cur, op.w_q, op.bias_q,
                                                   op.in_qp.zero_point, acc))
                program.append(backend.bind_requantize(acc.reshape(-1), op.mantissa,
                                                       op.shift, op.out_qp.zero_point,
                                                       clamp_lo, out.reshape(-1)))
                cur = out
            elif isinstance(op, QPoolOp):
                out = self._view(f"t{j}", np.int8, op.out_shape)
                program.append(backend.bind_maxpool(cur, op.size, out))
                cur = out
            elif isinstance(op, QFlattenOp):
                cur = cur.reshape(-1)
            elif isinstance(op, QDenseOp):
                acc = self._view(f"acc{j}", np.int32, op.out_shape)
                self._logits = self._view("logits", np.float64, op.out_shape)
                self._probs = self._view("probs", np.float64, op.out_shape)
                program.append(backend.bind_dense(cur, op.w_q, op.bias_q,
                                                  op.in_qp.zero_point, acc))
                program.append(backend.bind_dequantize(acc, op.logit_scale,
                                                       self._logits))
        self._program = program
        self._frozen = True

    def _view(self, name: str, dtype, shape) -> np.ndarray:
        if self._frozen:
            self.alloc_count += 1
            raise ArenaOverflow("buffer requested after arena construction")
        offset = self.plan.offsets[name]
        nbytes = int(np.prod(shape)) * np.dtype(dtype).itemsize
        if offset + nbytes > self.plan.total_bytes:
            raise ArenaOverflow(f"buffer {name} exceeds the planned arena")
        return self._arena[offset:offset + nbytes].view(dtype).reshape(shape)

    def _execute(self, values: np.ndarray) -> None:
        """Scale, quantize, run the int8 program, softmax in place."""
        np.subtract(values.T, self._mean, out=self._input_f)
        np.multiply(self._input_f, self._inv_std, out=self._input_f)
        for fn in self._program:
            fn()
        peak = self._logits.max()
        np.subtract(self._logits, peak, out=self._probs)
        np.exp(self._probs, out=self._probs)
        total = self._probs.sum()
        np.divide(self._probs, total, out=self._probs)

    def run(self, features: MfccMatrix) -> Prediction:
        expected = (self.qmodel.mfcc_config.n_frames, self.qmodel.mfcc_config.n_coeffs)
        if features.values.shape != expected:
            raise ShapeMismatch(f"expected features {expected}, "
                                f"got {features.values.shape}")
        self._execute(features.values)
        probs = self._probs.copy()
        top = int(np.argmax(probs))
        return Prediction(probs=probs, top_label=self.qmodel.class_labels[top],
                          confidence=float(probs[top]))

    def logits(self) -> np.ndarray:
        """Dequantized logits from the latest run (copy)."""
        return self._logits.copy()


def quantized_forward(qmodel: QuantizedModel, features: MfccMatrix,
                      backend=None) -> Prediction:
    """Run one inference, caching a runtime on the model."""
    runtime: Optional[QuantRuntime] = getattr(qmodel, "_runtime", None)
    if backend is not None:
        wanted = get_backend(backend) if isinstance(backend, str) else backend
        if runtime is None or runtime.backend is not wanted:
            runtime = QuantRuntime(qmodel, backend=wanted)
            qmodel._runtime = runtime
    elif runtime is None:
        runtime = QuantRuntime(qmodel)
        qmodel._runtime = runtime
    return runtime.run(features)


# -- artifact I/O -----------------------------------------------------------------

def export_quantized(qmodel: QuantizedModel, path) -> int:
    """Write the quantized artifact; returns the file size in bytes."""
    tensors = []
    chunks: list[bytes] = []
    offset = 0

    def add_tensor(name: str, arr: np.ndarray, dtype: str) -> None:
        nonlocal offset
        raw = np.ascontiguousarray(arr, dtype=dtype).tobytes()
        tensors.append({"name": name, "dtype": dtype, "shape": list(arr.shape),
                        "offset": offset, "nbytes": len(raw)})
        chunks.append(raw)
        offset += len(raw)

    op_docs = []
    for j, op in enumerate(qmodel.ops):
        doc = {"kind": op.kind, "in_shape": list(op.in_shape),
               "out_shape": list(op.out_shape)}
        if isinstance(op, QConvOp):
            add_tensor(f"op{j}.w", op.w_q, "<i1")
            add_tensor(f"op{j}.b", op.bias_q, "<i4")
            doc.update({"w_scale": op.w_scale, "relu": op.relu,
                        "mantissa": op.mantissa, "shift": op.shift,
                        "in_scale": op.in_qp.scale, "in_zp": op.in_qp.zero_point,
                        "out_scale": op.out_qp.scale, "out_zp": op.out_qp.zero_point})
        elif isinstance(op, QDenseOp):
            add_tensor(f"op{j}.w", op.w_q, "<i1")
            add_tensor(f"op{j}.b", op.bias_q, "<i4")
            doc.update({"w_scale": op.w_scale, "logit_scale": op.logit_scale,
                        "in_scale": op.in_qp.scale, "in_zp": op.in_qp.zero_point})
        elif isinstance(op, QPoolOp):
            doc["size"] = op.size
        op_docs.append(doc)

    header = {
        "format": "kwspot-quant",
        "version": FORMAT_VERSION,
        "input_scale": qmodel.input_qp.scale,
        "input_zp": qmodel.input_qp.zero_point,
        "ops": op_docs,
        "class_labels": list(qmodel.class_labels),
        "mfcc_config": qmodel.mfcc_config.to_dict(),
        "feature_stats": qmodel.feature_stats.to_dict(),
        "arch_layers": [s.to_dict() for s in qmodel.arch_layers],
        "tensors": tensors,
    }
    blob = _pack_artifact(_QUANT_MAGIC, header, b"".join(chunks))
    with open(path, "wb") as fh:
        fh.write(blob)
    return len(blob)


def load_quantized(path) -> QuantizedModel:
    with open(path, "rb") as fh:
        blob = fh.read()
    header, payload = _unpack_artifact(blob, _QUANT_MAGIC)
    arrays: dict[str, np.ndarray] = {}
    for t in header["tensors"]:
        raw = payload[t["offset"]:t["offset"] + t["nbytes"]]
        arrays[t["name"]] = np.frombuffer(raw, dtype=t["dtype"]).reshape(t["shape"]).copy()
    ops: list = []
    for j, doc in enumerate(header["ops"]):
        in_shape, out_shape = tuple(doc["in_shape"]), tuple(doc["out_shape"])
        if doc["kind"] == "conv1d":
            ops.append(QConvOp(
                w_q=arrays[f"op{j}.w"], bias_q=arrays[f"op{j}.b"],
                w_scale=doc["w_scale"],
                in_qp=QuantParams(doc["in_scale"], doc["in_zp"]),
                out_qp=QuantParams(doc["out_scale"], doc["out_zp"]),
                mantissa=doc["mantissa"], shift=doc["shift"], relu=doc["relu"],
                in_shape=in_shape, out_shape=out_shape))
        elif doc["kind"] == "dense":
            ops.append(QDenseOp(
                w_q=arrays[f"op{j}.w"], bias_q=arrays[f"op{j}.b"],
                w_scale=doc["w_scale"],
                in_qp=QuantParams(doc["in_scale"], doc["in_zp"]),
                logit_scale=doc["logit_scale"],
                in_shape=in_shape, out_shape=out_shape))
        elif doc["kind"] == "maxpool1d":
            ops.append(QPoolOp(size=doc["size"], in_shape=in_shape,
                               out_shape=out_shape))
        elif doc["kind"] == "flatten":
            ops.append(QFlattenOp(in_shape=in_shape, out_shape=out_shape))
        else:
            raise CorruptArtifact(f"unknown op kind {doc['kind']!r}")
    return QuantizedModel(
        input_qp=QuantParams(header["input_scale"], header["input_zp"]),
        ops=ops,
        class_labels=tuple(header["class_labels"]),
        mfcc_config=MfccConfig.from_dict(header["mfcc_config"]),
        feature_stats=FeatureStats.from_dict(header["feature_stats"]),
        arch_layers=[LayerSpec.from_dict(d) for d in header["arch_layers"]],
    )


def size_report(qmodel: QuantizedModel, budget_bytes: int = DEFAULT_ARENA_BUDGET) -> dict:
    """Per-op weight bytes, arena plan total, and the combined footprint."""
    plan = plan_arena(qmodel, budget_bytes)
    per_layer = []
    for j, op in enumerate(qmodel.ops):
        entry = {"op": f"op{j}", "kind": op.kind, "weight_bytes": 0}
        if hasattr(op, "w_q"):
            entry["weight_bytes"] = int(op.w_q.nbytes + op.bias_q.nbytes)
        per_layer.append(entry)
    weight_total = sum(e["weight_bytes"] for e in per_layer)
    return {
        "per_layer": per_layer,
        "weight_bytes": weight_total,
        "arena_bytes": plan.total_bytes,
        "total_bytes": weight_total + plan.total_bytes,
        "budget_bytes": budget_bytes,
    }
