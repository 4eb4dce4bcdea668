"""Float CNN: shapes, forward oracles, gradient checks, training, artifacts."""

import json
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kwspot.errors import CorruptArtifact, DivergedLoss, EmptyClass, ShapeMismatch, VersionMismatch
from kwspot.features import FeatureStats, MfccConfig, MfccMatrix
from kwspot.keywords import KEYWORDS
from kwspot.model import (
    FloatModel,
    LayerSpec,
    TrainConfig,
    cross_entropy,
    default_architecture,
    forward,
    forward_pass,
    gradient_check,
    load_model,
    save_model,
    softmax,
    trace_shapes,
    train,
)

SMALL_CONFIG = MfccConfig(frame_len_samples=2000, hop_samples=2000, fft_size=2048,
                          n_mel_filters=10, n_coeffs=3)  # 8 frames x 3 coeffs


def small_model(seed=0, n_classes=3):
    layers = [
        LayerSpec("conv1d", {"in_ch": 3, "out_ch": 4, "kernel": 3, "stride": 1}),
        LayerSpec("relu"),
        LayerSpec("maxpool1d", {"size": 2}),
        LayerSpec("flatten"),
        LayerSpec("dense", {"in_dim": 12, "out_dim": n_classes}),
        LayerSpec("softmax"),
    ]
    from kwspot.model import init_layer_weights
    rng = np.random.Generator(np.random.PCG64(seed))
    weights = [init_layer_weights(s, rng) for s in layers]
    return FloatModel(layers=layers, weights=weights,
                      class_labels=tuple(f"c{i}" for i in range(n_classes)),
                      mfcc_config=SMALL_CONFIG,
                      feature_stats=FeatureStats.identity(3), seed=seed)


def random_features(rng, config=SMALL_CONFIG):
    return MfccMatrix(values=rng.normal(0, 1, (config.n_frames, config.n_coeffs)),
                      config=config)


class TestArchitecture:
    def test_default_shape_trace(self):
        model = default_architecture(23)
        shapes = trace_shapes(model.layers, (13, 98))
        assert shapes[0] == (13, 98)
        assert (8, 96) in shapes      # first conv
        assert (8, 48) in shapes      # first pool
        assert (16, 46) in shapes     # second conv
        assert (16, 23) in shapes     # second pool
        assert (368,) in shapes       # flatten = 23 * 16
        assert shapes[-1] == (23,)

    def test_default_labels(self):
        model = default_architecture()
        assert set(model.class_labels) == set(KEYWORDS)
        assert len(model.class_labels) == 23

    def test_seed_determinism(self):
        a = default_architecture(5, seed=42)
        b = default_architecture(5, seed=42)
        c = default_architecture(5, seed=43)
        for wa, wb in zip(a.weights, b.weights):
            for key in wa:
                assert np.array_equal(wa[key], wb[key])
        assert any(not np.array_equal(wa.get("w", np.zeros(1)), wc.get("w", np.zeros(1)))
                   for wa, wc in zip(a.weights, c.weights) if "w" in wa)

    def test_too_few_classes(self):
        with pytest.raises(ValueError):
            default_architecture(1)

    def test_bad_stack_raises(self):
        layers = [LayerSpec("conv1d", {"in_ch": 5, "out_ch": 2, "kernel": 3, "stride": 1})]
        with pytest.raises(ShapeMismatch):
            trace_shapes(layers, (13, 98))

    @given(st.integers(min_value=2, max_value=6),
           st.integers(min_value=2, max_value=5),
           st.integers(min_value=1, max_value=3))
    @settings(max_examples=30, deadline=None)
    def test_random_stacks_compose(self, out1, kernel, n_pool_blocks):
        layers = []
        c, length = 6, 64
        in_ch = c
        for _ in range(n_pool_blocks):
            layers.append(LayerSpec("conv1d", {"in_ch": in_ch, "out_ch": out1,
                                               "kernel": kernel, "stride": 1}))
            layers.append(LayerSpec("relu"))
            layers.append(LayerSpec("maxpool1d", {"size": 2}))
            in_ch = out1
        layers.append(LayerSpec("flatten"))
        shapes = trace_shapes(layers, (c, length))
        assert shapes[-1][0] == int(np.prod(shapes[-2]))
        # adjacent shapes compose by construction; a mismatched dense must fail
        bad = layers + [LayerSpec("dense", {"in_dim": shapes[-1][0] + 1, "out_dim": 2})]
        with pytest.raises(ShapeMismatch):
            trace_shapes(bad, (c, length))


class TestForward:
    def test_zero_weights_uniform_probs(self):
        model = default_architecture(23)
        for wts in model.weights:
            for key in wts:
                wts[key][:] = 0
        config = model.mfcc_config
        rng = np.random.default_rng(0)
        feats = MfccMatrix(values=rng.normal(0, 1, (config.n_frames, config.n_coeffs)),
                           config=config)
        pred = forward(model, feats)
        assert np.allclose(pred.probs, 1.0 / 23.0, atol=1e-9)
        assert pred.top_label == model.class_labels[0]  # tie -> lowest index

    def test_probs_sum_to_one(self):
        model = small_model()
        rng = np.random.default_rng(1)
        for _ in range(5):
            pred = forward(model, random_features(rng))
            assert pred.probs.sum() == pytest.approx(1.0, abs=1e-6)
            assert pred.confidence == pred.probs.max()

    @given(st.lists(st.floats(min_value=-30, max_value=30), min_size=2, max_size=24))
    @settings(max_examples=50, deadline=None)
    def test_softmax_normalizes(self, logits):
        probs = softmax(np.array(logits))
        assert probs.sum() == pytest.approx(1.0, abs=1e-6)
        assert (probs >= 0).all()

    def test_hand_computed_conv(self):
        # one conv layer, kernel [1, 0, -1], bias 0.5, input [1, 2, 3, 4]
        config = MfccConfig(frame_len_samples=4000, hop_samples=4000, fft_size=4096,
                            n_mel_filters=4, n_coeffs=1)
        assert config.n_frames == 4
        layers = [
            LayerSpec("conv1d", {"in_ch": 1, "out_ch": 1, "kernel": 3, "stride": 1}),
            LayerSpec("flatten"),
            LayerSpec("softmax"),
        ]
        weights = [{"w": np.array([[[1.0, 0.0, -1.0]]], dtype=np.float32),
                    "b": np.array([0.5], dtype=np.float32)}, {}, {}]
        model = FloatModel(layers=layers, weights=weights, class_labels=("a", "b"),
                           mfcc_config=config, feature_stats=FeatureStats.identity(1))
        x = np.array([[[1.0, 2.0, 3.0, 4.0]]])
        logits, _ = forward_pass(model, x)
        # out[t] = x[t] - x[t+2] + 0.5
        assert np.allclose(logits, [[1 - 3 + 0.5, 2 - 4 + 0.5]])

    def test_shape_mismatch(self):
        model = small_model()
        wrong = MfccMatrix(values=np.zeros((98, 13)), config=MfccConfig())
        with pytest.raises(ShapeMismatch):
            forward(model, wrong)


class TestGradients:
    def test_max_rel_error_small(self):
        rng = np.random.default_rng(0)
        model = small_model(seed=1)
        err = gradient_check(model, (random_features(rng), "c1"))
        assert err <= 1e-4

    def test_ten_seeds(self):
        for seed in range(10):
            rng = np.random.default_rng(100 + seed)
            model = small_model(seed=seed)
            err = gradient_check(model, (random_features(rng), "c0"))
            assert err <= 1e-4, f"seed {seed}: {err}"

    def test_zero_model_bias_gradient_is_probs_minus_onehot(self):
        model = small_model()
        for wts in model.weights:
            for key in wts:
                wts[key][:] = 0
        x = np.zeros((1, 3, 8))
        logits, caches = forward_pass(model, x)
        loss, dlogits = cross_entropy(logits, np.array([2]))
        from kwspot.model import backward_pass
        grads = backward_pass(model, caches, dlogits)
        probs = softmax(logits)[0]
        onehot = np.zeros(3)
        onehot[2] = 1
        assert np.allclose(grads[4]["b"], probs - onehot, atol=1e-12)

    def test_check_is_deterministic(self):
        rng = np.random.default_rng(7)
        model = small_model(seed=3)
        sample = (random_features(rng), "c2")
        assert gradient_check(model, sample) == gradient_check(model, sample)


def toy_tone_examples(n_per_class=20, seed=0):
    """Two linearly separable classes: near-silence vs a loud 1 kHz tone."""
    from kwspot.audio import AudioClip
    from kwspot.features import extract_mfcc

    rng = np.random.default_rng(seed)
    t = np.arange(16000) / 16000.0
    examples = []
    for i in range(n_per_class):
        quiet = rng.normal(0, 80, 16000)
        examples.append((extract_mfcc(AudioClip(samples=quiet.astype(np.int16))), "hush"))
        tone = 9000 * np.sin(2 * np.pi * 1000 * t + rng.uniform(0, 2 * np.pi))
        tone += rng.normal(0, 200, 16000)
        examples.append((extract_mfcc(AudioClip(samples=tone.astype(np.int16))), "tone"))
    return examples


@pytest.fixture(scope="module")
def toy():
    return toy_tone_examples()


class TestTraining:

    def test_toy_two_class_accuracy(self, toy):
        model = default_architecture(2, class_labels=("hush", "tone"), seed=0)
        trained, log = train(model, toy, TrainConfig(epochs=30, batch=8, lr=1e-3, seed=0))
        assert log[-1]["accuracy"] >= 0.95
        assert len(log) == 30

    def test_zero_lr_leaves_weights(self, toy):
        model = default_architecture(2, class_labels=("hush", "tone"), seed=1)
        before = [{k: v.copy() for k, v in w.items()} for w in model.weights]
        trained, _ = train(model, toy[:8], TrainConfig(epochs=3, batch=4, lr=0.0, seed=0))
        for wa, wb in zip(before, trained.weights):
            for key in wa:
                assert np.array_equal(wa[key], wb[key])

    def test_seed_reproducible(self, toy):
        model = default_architecture(2, class_labels=("hush", "tone"), seed=2)
        t1, _ = train(model, toy[:16], TrainConfig(epochs=3, batch=4, lr=1e-3, seed=9))
        t2, _ = train(model, toy[:16], TrainConfig(epochs=3, batch=4, lr=1e-3, seed=9))
        for wa, wb in zip(t1.weights, t2.weights):
            for key in wa:
                assert np.array_equal(wa[key], wb[key])

    def test_missing_class_raises(self, toy):
        model = default_architecture(2, class_labels=("hush", "tone"))
        only_hush = [ex for ex in toy if ex[1] == "hush"]
        with pytest.raises(EmptyClass):
            train(model, only_hush, TrainConfig(epochs=1))

    def test_diverged_loss_raises(self, toy):
        # a non-finite weight state (e.g. a damaged checkpoint) must be caught
        # on the first batch instead of silently training on NaNs
        model = default_architecture(2, class_labels=("hush", "tone"), seed=0)
        model.weights[0]["w"][0, 0, 0] = np.inf
        with np.errstate(invalid="ignore"), pytest.raises(DivergedLoss):
            train(model, toy[:8], TrainConfig(epochs=1, batch=4, lr=1e-3, seed=0))

    def test_shuffled_labels_stay_near_chance(self):
        rng = np.random.default_rng(12)
        config = MfccConfig()
        labels = tuple(f"k{i}" for i in range(10))
        examples = []
        for _ in range(600):
            m = MfccMatrix(values=rng.normal(0, 1, (config.n_frames, config.n_coeffs)),
                           config=config)
            examples.append((m, labels[rng.integers(0, 10)]))
        model = default_architecture(10, class_labels=labels, seed=0)
        _, log = train(model, examples, TrainConfig(epochs=1, batch=32, lr=1e-3, seed=0))
        assert log[0]["accuracy"] <= 0.2  # 2x chance


class TestArtifacts:
    def test_roundtrip_bit_identical(self, tmp_path):
        model = small_model(seed=5)
        rng = np.random.default_rng(5)
        feats = random_features(rng)
        before = forward(model, feats)
        path = tmp_path / "m.kws"
        save_model(model, path)
        again = load_model(path)
        after = forward(again, feats)
        assert np.array_equal(before.probs, after.probs)
        assert again.class_labels == model.class_labels
        assert again.mfcc_config == model.mfcc_config
        assert np.array_equal(again.feature_stats.mean, model.feature_stats.mean)

    def test_truncated_file(self, tmp_path):
        path = tmp_path / "m.kws"
        save_model(small_model(), path)
        blob = path.read_bytes()
        path.write_bytes(blob[:len(blob) - 20])
        with pytest.raises(CorruptArtifact):
            load_model(path)

    def test_bitflip_fails_checksum(self, tmp_path):
        path = tmp_path / "m.kws"
        save_model(small_model(), path)
        blob = bytearray(path.read_bytes())
        blob[-1] ^= 0xFF
        path.write_bytes(bytes(blob))
        with pytest.raises(CorruptArtifact):
            load_model(path)

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "m.kws"
        save_model(small_model(), path)
        blob = path.read_bytes()
        (header_len,) = struct.unpack("<I", blob[4:8])
        header = json.loads(blob[8:8 + header_len])
        header["version"] = 99
        new_header = json.dumps(header, sort_keys=True).encode()
        path.write_bytes(blob[:4] + struct.pack("<I", len(new_header)) + new_header
                         + blob[8 + header_len:])
        with pytest.raises(VersionMismatch):
            load_model(path)
